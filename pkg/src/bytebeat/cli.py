"""Command-line front end.

A thin layer over the same core the HTTP service wraps: render to WAV or
raw bytes on stdout (pipe straight into aplay), run the analyses as
JSON, plot amplitude bitmaps, list presets, start the server, or bench
the VM against the reference interpreter.

Exit codes: 0 success, 1 expression/limit error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .analysis import (
    PitchReference,
    bit_band_matrix,
    estimate_pitch,
    render_bitmap,
    series,
)
from .audio import write_wav
from .corpus import presets
from .expr import ParseError, parse
from .semantics import SemanticsMode, TypecheckError, eval_ast_sample
from .service import Settings, create_app
from .vm import build_program, render_range


class _LimitError(Exception):
    def __init__(self, msg: str):
        self.msg = msg
        super().__init__(msg)


def _mode(raw: str) -> SemanticsMode:
    try:
        return SemanticsMode(raw.lower())
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown mode {raw!r}; expected c32, c64 or js")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="bytebeat", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, with_range: bool = True) -> None:
        p.add_argument("expr", help="expression over t")
        p.add_argument("-m", "--mode", type=_mode, default=SemanticsMode.C32)
        if with_range:
            p.add_argument("-t", "--t0", type=int, default=0, help="start sample index")

    render = sub.add_parser("render", help="render samples to a WAV file or raw stdout")
    add_common(render)
    render.add_argument("-n", type=int, default=8000, help="sample count")
    render.add_argument("-r", "--rate", type=int, default=8000, help="sample rate in Hz")
    out = render.add_mutually_exclusive_group(required=True)
    out.add_argument("-o", "--output", help="WAV file to write")
    out.add_argument("--raw", action="store_true", help="raw bytes to stdout")

    analyze = sub.add_parser("analyze", help="run an analysis, JSON to stdout")
    what = analyze.add_subparsers(dest="what", required=True)

    pitch = what.add_parser("pitch", help="autocorrelation pitch track")
    add_common(pitch)
    pitch.add_argument("-n", type=int, default=8192)
    pitch.add_argument("-r", "--rate", type=int, default=8000)
    pitch.add_argument("--window", type=int, default=1024)
    pitch.add_argument("--ref", choices=["a440", "c256"], default="a440")

    bits = what.add_parser("bits", help="per-bit band activity")
    add_common(bits)
    bits.add_argument("-n", type=int, default=8192)
    bits.add_argument("--window", type=int, default=256)

    ser = what.add_parser("series", help="pre-truncation values at stride boundaries")
    ser.add_argument("expr")
    ser.add_argument("-m", "--mode", type=_mode, default=SemanticsMode.C32)
    ser.add_argument("--stride", type=int, default=1024)
    ser.add_argument("--count", type=int, default=16)

    plot = sub.add_parser("plot", help="amplitude bitmap as a P6 pixmap")
    add_common(plot)
    plot.add_argument("-n", type=int, required=True)
    plot.add_argument("-o", "--output", required=True, help="PPM file to write")

    sub.add_parser("presets", help="list the built-in formulas").add_argument(
        "--json", action="store_true", dest="as_json"
    )

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)
    serve.add_argument("--max-samples", type=int, default=None)
    serve.add_argument("--cache-size", type=int, default=None)

    bench = sub.add_parser("bench", help="samples/sec for the VM and the reference interpreter")
    add_common(bench, with_range=False)
    bench.add_argument("-n", type=int, default=1_000_000)

    return top


def _check_limit(n: int) -> None:
    limit = Settings.from_env().max_samples
    if n > limit:
        raise _LimitError(f"n exceeds the limit of {limit} (set BB_MAX_SAMPLES to raise it)")
    if n < 0:
        raise _LimitError("n must be non-negative")


def _print_error(expr: str | None, kind: str, pos: int | None, msg: str) -> None:
    print(f"error ({kind}): {msg}", file=sys.stderr)
    if expr is not None and pos is not None and "\n" not in expr:
        print(f"    {expr}", file=sys.stderr)
        print(f"    {' ' * pos}^", file=sys.stderr)


def _cmd_render(args) -> int:
    _check_limit(args.n)
    program = build_program(args.expr, args.mode)
    if args.raw:
        stream = sys.stdout.buffer
        pos, remaining = args.t0, args.n
        while remaining > 0:
            count = min(65536, remaining)
            stream.write(render_range(program, pos, count).data)
            pos += count
            remaining -= count
        stream.flush()
        return 0
    chunk = render_range(program, args.t0, args.n, rate=args.rate)
    write_wav(chunk, args.rate, args.output)
    return 0


def _cmd_analyze(args) -> int:
    if args.what == "series":
        values = series(parse(args.expr), args.mode, args.stride, args.count)
        print(json.dumps(values))
        return 0
    _check_limit(args.n)
    program = build_program(args.expr, args.mode)
    if args.what == "pitch":
        chunk = render_range(program, args.t0, args.n, rate=args.rate)
        events = estimate_pitch(chunk, args.window, ref=PitchReference(args.ref))
        print(
            json.dumps(
                [
                    {
                        "t_start": ev.t_start,
                        "t_len": ev.t_len,
                        "freq": ev.freq,
                        "note": ev.note,
                        "octave": ev.octave,
                        "cents": ev.cents,
                    }
                    for ev in events
                ]
            )
        )
        return 0
    matrix = bit_band_matrix(program, args.t0, args.n, args.window)
    print(
        json.dumps(
            {
                "window_len": matrix.window_len,
                "rows": [
                    [{"duty": act.duty, "toggles": act.toggles} for act in row]
                    for row in matrix.rows
                ],
            }
        )
    )
    return 0


def _cmd_plot(args) -> int:
    _check_limit(args.n)
    program = build_program(args.expr, args.mode)
    render_bitmap(program, args.t0, args.n, args.output)
    return 0


def _cmd_presets(args) -> int:
    entries = presets()
    if args.as_json:
        print(json.dumps([p.to_json() for p in entries], indent=2))
        return 0
    id_width = max(len(p.id) for p in entries)
    for p in entries:
        credit = f"  ({p.credit})" if p.credit else ""
        flag = "" if p.status == "verbatim" else f"  [{p.status}]"
        print(f"{p.id:<{id_width}}  {p.source}{credit}{flag}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    settings = Settings.from_env(
        host=args.host,
        port=args.port,
        max_samples=args.max_samples,
        cache_capacity=args.cache_size,
    )
    uvicorn.run(create_app(settings), host=settings.host, port=settings.port)
    return 0


def _cmd_bench(args) -> int:
    program = build_program(args.expr, args.mode)
    tree = parse(args.expr)

    start = time.perf_counter()
    render_range(program, 0, args.n)
    vm_elapsed = time.perf_counter() - start

    start = time.perf_counter()
    mode = args.mode
    for t in range(args.n):
        eval_ast_sample(tree, t, mode)
    oracle_elapsed = time.perf_counter() - start

    vm_rate = args.n / vm_elapsed
    oracle_rate = args.n / oracle_elapsed
    print(f"vm:     {vm_rate:>12.0f} samples/s  ({vm_elapsed:.3f}s for {args.n})")
    print(f"oracle: {oracle_rate:>12.0f} samples/s  ({oracle_elapsed:.3f}s for {args.n})")
    print(f"ratio:  {vm_rate / oracle_rate:.2f}x")
    return 0


_COMMANDS = {
    "render": _cmd_render,
    "analyze": _cmd_analyze,
    "plot": _cmd_plot,
    "presets": _cmd_presets,
    "serve": _cmd_serve,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    expr = getattr(args, "expr", None)
    try:
        return _COMMANDS[args.command](args)
    except ParseError as err:
        _print_error(expr, "parse", err.pos, str(err))
    except TypecheckError as err:
        _print_error(expr, "type", err.pos, err.msg)
    except _LimitError as err:
        _print_error(None, "range", None, err.msg)
    except (ValueError, OSError) as err:
        _print_error(None, "range", None, str(err))
    return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
