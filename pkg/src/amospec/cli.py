"""Command-line interface: ``amospec {spectrum,butterfly,verify,thouless}``.

Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import spectrum as sp
from .rational_core import Frequency, frequencies_up_to, reduce
from .suites import SUITES, detect_sign_convention, run_suite

log = logging.getLogger("amospec")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
REPS = {"std": "standard", "chiral": "chiral", "both": "both"}


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    """17 significant digits: round-trips every double."""
    return "%.17g" % x


@dataclass(frozen=True)
class ButterflyRow:
    p0: int
    q0: int
    band_index: int
    e_lo: float
    e_hi: float

    def csv(self) -> str:
        return f"{self.p0},{self.q0},{self.band_index},{fmt(self.e_lo)},{fmt(self.e_hi)}"


CSV_HEADER = "p0,q0,band_index,e_lo,e_hi"


def band_rows(freq: Frequency, bs: sp.BandSet) -> list[ButterflyRow]:
    return [ButterflyRow(freq.p0, freq.q0, j, float(lo), float(hi)) for j, (lo, hi) in enumerate(bs.bands)]


def _frequency(p0: int, q0: int) -> Frequency:
    if q0 < 1 or p0 < 1:
        raise UsageError(f"--p0 and --q0 must be positive integers, got {p0}/{q0}")
    freq = reduce(p0, q0)
    if (freq.p0, freq.q0) != (p0, q0):
        print(f"note: {p0}/{q0} reduced to {freq}", file=sys.stderr)
    return freq


def _bands_json(bs: sp.BandSet) -> list:
    return [[float(lo), float(hi)] for lo, hi in bs.bands]


def cmd_spectrum(args, out) -> int:
    freq = _frequency(args.p0, args.q0)
    rep = REPS[args.rep]
    report = sp.bounds_report(freq, checks=rep != "standard")
    chiral = report.chiral_bands
    primary = chiral if rep == "chiral" else report.bands
    m = sp.measure(primary)
    if args.format == "csv":
        if rep == "both":
            print("note: CSV carries the standard bands only; use JSON for both", file=sys.stderr)
        out.write(CSV_HEADER + "\n")
        for row in band_rows(freq, primary):
            out.write(row.csv() + "\n")
        return EXIT_OK
    doc = {
        "p0": freq.p0,
        "q0": freq.q0,
        "bands": _bands_json(primary),
        "measure": m,
        "lower_bound": report.lower_bound,
        "upper_bound": report.upper_bound,
        "thouless_ratio": freq.q0 * m,
        "flags": dict(sorted(report.flags.items())),
    }
    if rep == "both":
        doc["chiral_bands"] = _bands_json(chiral)
        doc["max_edge_deviation"] = sp.representations_agree(report.bands, chiral)[1]
    out.write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def _cell(freq: Frequency) -> list[ButterflyRow]:
    return band_rows(freq, sp.band_edges_standard(freq))


def _workers() -> int:
    n = os.cpu_count() or 1
    cap = os.environ.get("AMO_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise UsageError(f"AMO_THREADS must be an integer, got {cap!r}")
    return n


def butterfly_rows(qmax: int, workers: int = 1) -> list[ButterflyRow]:
    """Rows for every coprime p0/q0 with q0 <= qmax, sorted by (q0, p0, band)."""
    freqs = list(frequencies_up_to(qmax))
    if workers > 1 and len(freqs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            cells = list(ex.map(_cell, freqs, chunksize=8))
    else:
        cells = [_cell(f) for f in freqs]
    rows = [r for cell in cells for r in cell]
    rows.sort(key=lambda r: (r.q0, r.p0, r.band_index))
    return rows


def butterfly_svg(rows: list[ButterflyRow], qmax: int, width: int, height: int) -> str:
    """Each band as a horizontal segment: energy in [-4, 4] across, alpha up."""
    stroke = max(0.5, height / (2.0 * qmax * qmax))
    buf = io.StringIO()
    buf.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    buf.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
    )
    buf.write(f'<rect width="{width}" height="{height}" fill="white"/>\n')
    buf.write(f'<g stroke="black" stroke-width="{stroke:.4f}" stroke-linecap="butt">\n')
    for r in rows:
        x1 = (r.e_lo + 4.0) / 8.0 * width
        x2 = (r.e_hi + 4.0) / 8.0 * width
        y = (1.0 - r.p0 / r.q0) * height
        buf.write(f'<line x1="{x1:.4f}" y1="{y:.4f}" x2="{x2:.4f}" y2="{y:.4f}"/>\n')
    buf.write("</g>\n</svg>\n")
    return buf.getvalue()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_butterfly(args, out) -> int:
    if args.qmax < 1:
        raise UsageError("--qmax must be >= 1")
    if args.width < 1 or args.height < 1:
        raise UsageError("--width and --height must be positive")
    rows = butterfly_rows(args.qmax, _workers())
    _write(args.out, CSV_HEADER + "\n" + "".join(r.csv() + "\n" for r in rows))
    if args.svg:
        _write(args.svg, butterfly_svg(rows, args.qmax, args.width, args.height))
    out.write(f"wrote {len(rows)} rows to {args.out}\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    sign = detect_sign_convention(args.qmax, args.seed)
    out.write(f"{'suite':<12} {'cases':>7} {'failures':>8} {'worst_residual':>24}  sign\n")
    failed = 0
    for name in names:
        o = run_suite(name, args.qmax, args.seed, args.tol, sign)
        failed += o.failures
        out.write(
            f"{o.suite:<12} {o.cases_run:>7} {o.failures:>8} {fmt(o.worst_residual):>24}  "
            f"{o.detected_sign_convention.value}\n"
        )
    out.write(f"detected sign convention: {sign.value}\n")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def cmd_thouless(args, out) -> int:
    c = sp.thouless_constant()
    out.write(f"# c = 32 C / pi = {fmt(c)}\n")
    out.write("q0,measure,ratio,abs_dev\n")
    for q0, ratio in sp.thouless_sweep(args.p0, args.q0_list):
        out.write(f"{q0},{fmt(ratio / q0)},{fmt(ratio)},{fmt(abs(ratio - c))}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="amospec", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", help="bands, measure and bounds for one frequency")
    s.add_argument("--p0", type=int, required=True)
    s.add_argument("--q0", type=int, required=True)
    s.add_argument("--rep", choices=sorted(REPS), default="both")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_spectrum)

    b = sub.add_parser("butterfly", help="all bands for q0 <= qmax as CSV (and SVG)")
    b.add_argument("--qmax", type=int, required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--svg")
    b.add_argument("--width", type=int, default=1200)
    b.add_argument("--height", type=int, default=1200)
    b.set_defaults(func=cmd_butterfly)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", choices=("all",) + SUITES, default="all")
    v.add_argument("--qmax", type=int, default=40)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--tol", type=float, default=1e-8)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("thouless", help="q0 |S(p0/q0)| against 32 C / pi")
    t.add_argument("--p0", type=int, required=True)
    t.add_argument("--q0-list", type=_int_list, required=True)
    t.set_defaults(func=cmd_thouless)
    return p


def main(argv=None, out=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except (UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
