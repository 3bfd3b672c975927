"""Command-line entry point.

Exit codes: 0 ok, 1 a validation check failed, 2 usage error, 3 domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import dist, mc, outage
from .core import GramMatrix2, PartialProfile, VarianceProfile, classify, profile_transpose
from .errors import DegenerateParameters, Gram2x2Error

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3
FIG1_PROFILE = "0.01,0.99,1.5,1.5"


# ---------------------------------------------------------------- parsing


def _float_list(n=None):
    def parse(text):
        try:
            values = [float(t) for t in text.split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
        if not all(math.isfinite(v) for v in values):
            raise argparse.ArgumentTypeError(f"non-finite value in {text!r}")
        if n is not None and len(values) != n:
            raise argparse.ArgumentTypeError(f"expected {n} values, got {len(values)}")
        return values
    return parse


def _snr_grid(text):
    """``start:stop:step`` (inclusive stop) or a comma-separated list, in dB."""
    if ":" in text:
        parts = text.split(":")
        try:
            start, stop, step = (float(t) for t in parts)
        except ValueError:
            raise argparse.ArgumentTypeError(f"SNR grid must be start:stop:step, got {text!r}")
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError(f"empty SNR grid {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + k * step for k in range(count)]
    return _float_list()(text)


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gram2x2",
        description="Exact statistics of 2x2 Gram matrices with a variance profile.")
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--format", choices=("csv", "json"), default="csv")
    out.add_argument("--output", "-o", help="write to this file instead of stdout")
    phi_help = "variances phi11,phi12,phi21,phi22 (row-major)"
    sub = parser.add_subparsers(dest="command", required=True)

    pdf = sub.add_parser("pdf", help="evaluate a density")
    pdf_sub = pdf.add_subparsers(dest="which", required=True)
    pm = pdf_sub.add_parser("matrix", parents=[out], help="density of W")
    pm.add_argument("--phi", type=_float_list(4), required=True, help=phi_help)
    pm.add_argument("--w", type=_float_list(4), required=True, help="w1,w2,Re w3,Im w3")
    pe = pdf_sub.add_parser("eig", parents=[out], help="joint density of ordered eigenvalues")
    pe.add_argument("--phi", type=_float_list(4), required=True, help=phi_help)
    pe.add_argument("--l1", type=float, required=True)
    pe.add_argument("--l2", type=float, required=True)
    pe.add_argument("--method", choices=("general", "partial"), default="general")

    cdf = sub.add_parser("cdf", parents=[out], help="CDF of an extreme eigenvalue")
    cdf.add_argument("which", choices=("min", "max"))
    cdf.add_argument("--phi3profile", type=_float_list(3), required=True,
                     help="phi1,phi2,phi3 of a profile ((phi1,phi2),(phi3,phi3))")
    cdf.add_argument("--x", type=float, required=True)
    cdf.add_argument("--expansion", action="store_true", help="also print the small-x expansion")
    cdf.add_argument("--auto-perturb", action="store_true",
                     help="nudge coinciding variances apart instead of failing")

    val = sub.add_parser("validate", parents=[out], help="Monte Carlo self-checks")
    val.add_argument("--phi", type=_float_list(4), required=True, help=phi_help)
    val.add_argument("--samples", type=_positive_int, default=100_000)
    val.add_argument("--seed", type=_seed, default=0)
    val.add_argument("--inject-wrong-phi3", type=float, default=None, help=argparse.SUPPRESS)

    fig = sub.add_parser("fig1", parents=[out], help="outage rate vs SNR sweep")
    fig.add_argument("--phi", type=_float_list(4), default=_float_list(4)(FIG1_PROFILE), help=phi_help)
    fig.add_argument("--eps", type=_float_list(), default=[0.01, 0.1, 0.5])
    fig.add_argument("--snr-db", type=_snr_grid, default=_snr_grid("0:30:1"))
    fig.add_argument("--samples", type=_positive_int, default=100_000)
    fig.add_argument("--seed", type=_seed, default=0)

    tab = sub.add_parser("table1", parents=[out], help="fractional loss due to asymmetry")
    tab.add_argument("--snr-db", type=float, default=30.0)
    tab.add_argument("--eps", type=float, default=0.01)
    tab.add_argument("--samples", type=_positive_int, default=100_000)
    tab.add_argument("--seed", type=_seed, default=0)
    return parser


# ---------------------------------------------------------------- output


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, str):
        return value
    return f"{float(value):.15g}"


def render(rows, columns, fmt):
    if fmt == "json":
        data = [{c: (None if r[c] is None else (r[c] if isinstance(r[c], str) else float(r[c])))
                 for c in columns} for r in rows]
        return json.dumps(data[0] if len(data) == 1 else data, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def emit(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gram2x2-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


# ---------------------------------------------------------------- commands


def _partial_of(profile):
    cls = classify(profile)
    if not cls.is_partial:
        raise DegenerateParameters(f"profile {profile.as_tuple()} is {cls.kind}, not partially asymmetric")
    return cls.partial


def cmd_pdf(args):
    p = VarianceProfile(*args.phi)
    if args.which == "matrix":
        w1, w2, re3, im3 = args.w
        value = dist.matrix_pdf(p, GramMatrix2(w1, w2, complex(re3, im3)))
    elif args.method == "partial":
        value = dist.eig_pdf_partial(_partial_of(p), args.l1, args.l2)
    else:
        value = dist.eig_pdf_general(p, args.l1, args.l2)
    return [{"density": value}], ["density"], EXIT_OK


def cmd_cdf(args):
    pp = PartialProfile.from_unordered(*args.phi3profile)
    if args.auto_perturb:
        pp = dist.perturb_distinct(pp)
    if args.x < 0:
        raise ValueError("x must be >= 0")
    try:
        if args.which == "min":
            value = dist.cdf_min(pp, args.x)
            approx = dist.cdf_min_small_x(pp, args.x)
        else:
            value = dist.cdf_max(pp, args.x)
            approx = dist.cdf_max_small_x(pp, args.x)
    except DegenerateParameters as exc:
        raise DegenerateParameters(f"{exc} (rerun with --auto-perturb)") from exc
    row = {"x": args.x, "cdf": value}
    columns = ["x", "cdf"]
    if args.expansion:
        row["expansion"] = approx
        columns.append("expansion")
    return [row], columns, EXIT_OK


def validation_checks(p, samples, seed, wrong_phi3=None):
    """Run the self-checks; returns a list of ``(name, statistic, threshold, passed)``."""
    checks = []
    mass = dist.eig_pdf_normalization(p)
    checks.append(("eig_pdf_normalization", abs(mass - 1.0), 1e-6, abs(mass - 1.0) <= 1e-6))

    c = mc.SampleConfig(samples, seed)
    h = mc.sample_channels(p, c, key=(0,))
    l1, l2 = mc.eigenvalues_batch(*mc.gram_entries(h))
    ks_crit = float(mc.ks_threshold(samples))

    cls = classify(p)
    if cls.is_partial:
        pp = dist.perturb_distinct(cls.partial)
        if wrong_phi3 is not None:
            pp = PartialProfile(pp.phi1, pp.phi2, pp.phi3 * wrong_phi3)
        d_min = mc.ks_distance(mc.empirical_cdf(l2), lambda x: dist.cdf_min(pp, x))
        d_max = mc.ks_distance(mc.empirical_cdf(l1), lambda x: dist.cdf_max(pp, x))
        checks.append(("lambda_min_ks", d_min, ks_crit, d_min <= ks_crit))
        checks.append(("lambda_max_ks", d_max, ks_crit, d_max <= ks_crit))

    ht = mc.sample_channels(profile_transpose(p), c, key=(1,))
    _, l2t = mc.eigenvalues_batch(*mc.gram_entries(ht))
    d_t = mc.ks_two_sample(l2, l2t)
    t_crit = 1.95 * math.sqrt(2.0 / samples)
    checks.append(("transpose_ks", d_t, t_crit, d_t <= t_crit))

    violations = 0
    for form in ("hh", "w"):
        gains = mc.zf_gains_batch(h, form).min(axis=1)
        violations += int(np.count_nonzero(gains < l2 - 1e-9))
    checks.append(("zf_bound_violations", violations, 0, violations == 0))
    return checks


def cmd_validate(args):
    p = VarianceProfile(*args.phi)
    checks = validation_checks(p, args.samples, args.seed, args.inject_wrong_phi3)
    rows = [{"check": name, "statistic": stat, "threshold": thr, "result": "PASS" if ok else "FAIL"}
            for name, stat, thr, ok in checks]
    code = EXIT_OK if all(ok for *_, ok in checks) else EXIT_FAIL
    return rows, ["check", "statistic", "threshold", "result"], code


def cmd_fig1(args):
    for eps in args.eps:
        if not 0.0 < eps < 1.0:
            raise ValueError(f"eps must lie in (0, 1), got {eps}")
    p = VarianceProfile(*args.phi)
    points = outage.fig1_sweep(p, args.eps, args.snr_db, mc.SampleConfig(args.samples, args.seed))
    points.sort(key=lambda pt: (pt.eps, pt.snr_db))
    rows = [{"eps": pt.eps, "snr_db": pt.snr_db, "r_emp": pt.r_emp,
             "r_check": pt.r_check, "r_tilde": pt.r_tilde} for pt in points]
    return rows, ["eps", "snr_db", "r_emp", "r_check", "r_tilde"], EXIT_OK


def cmd_table1(args):
    if not 0.0 < args.eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {args.eps}")
    rows = [{"phi3": phi3, "fl_emp": fl_emp, "fl_tilde": fl_tilde}
            for phi3, fl_emp, fl_tilde in outage.table1(args.snr_db, args.eps, args.samples, args.seed)]
    return rows, ["phi3", "fl_emp", "fl_tilde"], EXIT_OK


COMMANDS = {
    "pdf": cmd_pdf,
    "cdf": cmd_cdf,
    "validate": cmd_validate,
    "fig1": cmd_fig1,
    "table1": cmd_table1,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        rows, columns, code = COMMANDS[args.command](args)
    except (Gram2x2Error, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    emit(render(rows, columns, args.format), args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
