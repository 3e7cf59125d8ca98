"""LRU cache of compiled programs, keyed by (expression text, mode)."""

from __future__ import annotations

import threading
from collections import OrderedDict
from typing import Callable

from .semantics import SemanticsMode
from .vm import Program, build_program


class ProgramCache:
    """Least-recently-used program cache.

    Compilation happens at most once per (expr, mode) while the entry is
    resident; a hit returns the identical Program object.  Lookups are
    thread-safe; parse and typecheck errors propagate uncached.
    """

    def __init__(
        self,
        capacity: int = 64,
        build: Callable[[str, SemanticsMode], Program] = build_program,
    ):
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        self.capacity = capacity
        self._build = build
        self._entries: OrderedDict[tuple[str, SemanticsMode], Program] = OrderedDict()
        self._lock = threading.Lock()

    def get(self, expr: str, mode: SemanticsMode) -> Program:
        key = (expr, mode)
        with self._lock:
            program = self._entries.get(key)
            if program is not None:
                self._entries.move_to_end(key)
                return program
        program = self._build(expr, mode)
        with self._lock:
            resident = self._entries.get(key)
            if resident is not None:
                self._entries.move_to_end(key)
                return resident
            self._entries[key] = program
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)
        return program

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def __contains__(self, key: tuple[str, SemanticsMode]) -> bool:
        with self._lock:
            return key in self._entries
