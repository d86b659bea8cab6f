"""Command line surface: construct frames, compute erased moments, verify
bounds, tabulate the MANOVA law, and sweep parameter grids to plot-ready CSV.

Conventions
-----------
- Exit codes: 0 success, 1 a bound violation was detected, 2 usage or
  validation error.
- --seed falls back to the EWB_DEFAULT_SEED environment variable, then 0.
- Every float is printed with 17 significant digits so identical runs diff
  byte-for-byte.
- Each artifact embeds its run manifest (command, parameters, seeds, library
  version, generator name); a timestamped copy of the manifest goes to
  stderr so artifact bytes stay deterministic.
- CSV outputs are long format (one observation per row), with manifest and
  metadata carried on leading '#' comment lines.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from contextlib import nullcontext
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .bounds import VIOLATION, check_theorem
from .erasure_moments import (
    BRUTEFORCE_MAX_N,
    ErasureModel,
    bruteforce_table,
    expected_moment,
    moment_polynomial,
    montecarlo_moment,
)
from .frames import (
    Frame,
    coherence,
    harmonic_etf,
    is_etf,
    is_utf,
    load_frame,
    nearest_utf,
    random_frame,
    repeated_onb,
    save_frame,
    simplex_etf,
)
from .manova import (
    AtomicOnlyError,
    ManovaParams,
    density,
    moment_closed,
    moment_numeric,
    support,
)
from .rng import GENERATOR_NAME
from .spectral import ks_distance, pool_eigenvalues, subset_spectrum_samples


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def _float_list(text: str):
    try:
        vals = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated float list, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("list must be nonempty")
    return vals


def _int_list(text: str):
    try:
        vals = [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated int list, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("list must be nonempty")
    return vals


def _resolve_seed(args) -> int:
    seed = getattr(args, "seed", None)
    if seed is not None:
        return seed
    env = os.environ.get("EWB_DEFAULT_SEED")
    if env is not None and env != "":
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"EWB_DEFAULT_SEED must be an integer, got {env!r}")
    return 0


def _manifest(args, seed=None) -> dict:
    params = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("func", "command") and v is not None
    }
    man = {
        "command": args.command,
        "params": params,
        "version": __version__,
        "generator": GENERATOR_NAME,
    }
    if seed is not None:
        man["seed"] = seed
    return man


def _log_manifest(man: dict) -> None:
    stamped = dict(man)
    stamped["timestamp"] = datetime.now(timezone.utc).isoformat()
    print("manifest: " + json.dumps(stamped, sort_keys=True), file=sys.stderr)


def _out_stream(path):
    if path:
        return open(path, "w", newline="")
    return nullcontext(sys.stdout)


def _load_frame_meta(path) -> dict:
    try:
        raw = json.loads(open(path).read())
        meta = raw.get("construction")
        return meta if isinstance(meta, dict) else {}
    except (OSError, ValueError):
        return {}


# ---------------------------------------------------------------------------
# construct
# ---------------------------------------------------------------------------


def cmd_construct(args) -> int:
    kind = args.kind
    meta = {"kind": kind}
    seed = None
    if kind == "random":
        if args.m is None or args.n is None:
            raise ValueError("random construction needs --m and --n")
        seed = _resolve_seed(args)
        frame = random_frame(args.m, args.n, args.field, seed)
        meta.update(m=args.m, n=args.n, field=args.field, seed=seed, generator=GENERATOR_NAME)
    elif kind == "simplex":
        if args.m is None:
            raise ValueError("simplex construction needs --m")
        frame = simplex_etf(args.m)
        meta.update(m=args.m)
    elif kind == "harmonic":
        if args.q is None:
            raise ValueError("harmonic construction needs --q")
        frame = harmonic_etf(args.q)
        meta.update(q=args.q)
    elif kind == "repeated-onb":
        if args.m is None:
            raise ValueError("repeated-onb construction needs --m")
        frame = repeated_onb(args.m, args.copies)
        meta.update(m=args.m, copies=args.copies)
    elif kind == "nearest-utf":
        if args.frame is None:
            raise ValueError("nearest-utf needs --frame with the input frame file")
        result = nearest_utf(load_frame(args.frame), max_iters=args.max_iters, tol=args.tol)
        frame = result.frame
        meta.update(
            source=args.frame,
            residual=result.residual,
            iterations=result.iterations,
            converged=result.converged,
        )
        if not result.converged:
            print(
                f"warning: projection residual {result.residual:.3e} above tolerance "
                f"after {result.iterations} iterations",
                file=sys.stderr,
            )
    else:
        raise ValueError(f"unknown construction kind {kind!r}")

    man = _manifest(args, seed=seed)
    save_frame(frame, args.out, extra={"construction": meta, "manifest": man})
    _log_manifest(man)

    print(f"m={frame.m} n={frame.n} field={frame.field}")
    print(f"is_utf={is_utf(frame)} is_etf={is_etf(frame)}")
    if frame.n >= 2:
        rep = coherence(frame)
        print(
            f"rms_sq={_fmt(rep.rms_sq)} max_sq={_fmt(rep.max_sq)} "
            f"welch_floor={_fmt(rep.welch_floor)}"
        )
    return 0


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------


def cmd_moments(args) -> int:
    frame = load_frame(args.frame)
    ps = sorted(args.p)
    ds = sorted(args.d)
    if any(d < 1 for d in ds):
        raise ValueError("moment orders must be positive")
    if args.method == "poly" and any(d > 4 for d in ds):
        raise ValueError("method poly supports orders 1..4 only; no closed coefficient form above 4 is shipped")
    if args.method == "brute" and frame.n > BRUTEFORCE_MAX_N:
        raise ValueError(
            f"brute force enumerates 2^n patterns and needs n <= {BRUTEFORCE_MAX_N}; this frame has n={frame.n}"
        )
    seed = None
    if args.method == "mc":
        if args.trials is None:
            raise ValueError("method mc needs --trials")
        seed = _resolve_seed(args)

    man = _manifest(args, seed=seed)
    rows = []
    if args.method == "poly":
        polys = {d: moment_polynomial(frame, d) for d in ds}
        for p in ps:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"keep probability must be in [0, 1], got {p}")
            for d in ds:
                rows.append((p, d, polys[d].evaluate(p), ""))
    elif args.method == "brute":
        table = bruteforce_table(frame, d_max=max(ds))
        for p in ps:
            for d in ds:
                rows.append((p, d, table.moment(p, d), ""))
    else:
        for p in ps:
            for d in ds:
                est = montecarlo_moment(frame, ErasureModel(p=p, seed=seed), d, args.trials)
                rows.append((p, d, est.value, _fmt(est.stderr)))

    with _out_stream(args.out) as fh:
        fh.write("# manifest: " + json.dumps(man, sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["p", "d", "method", "value", "stderr"])
        for p, d, value, stderr in rows:
            writer.writerow([_fmt(p), d, args.method, _fmt(value), stderr])
    _log_manifest(man)
    return 0


# ---------------------------------------------------------------------------
# bound
# ---------------------------------------------------------------------------


def cmd_bound(args) -> int:
    frame = load_frame(args.frame)
    for d in args.d:
        if d not in (2, 3, 4):
            raise ValueError("bound orders must be in 2..4")
    man = _manifest(args)
    reports = [
        check_theorem(frame, p, d, tol=args.tol)
        for p in sorted(args.p)
        for d in sorted(args.d)
    ]
    obj = {
        "manifest": man,
        "frame": {
            "source": args.frame,
            "m": frame.m,
            "n": frame.n,
            "field": frame.field,
            "construction": _load_frame_meta(args.frame),
        },
        "reports": [r.to_dict() for r in reports],
    }
    with _out_stream(args.out) as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")
    _log_manifest(man)
    if any(r.equality_class == VIOLATION for r in reports):
        print("error: bound violation detected", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# manova
# ---------------------------------------------------------------------------


def cmd_manova(args) -> int:
    params = ManovaParams(gamma=args.gamma, p=args.p)
    sup = support(params)
    man = _manifest(args)
    with _out_stream(args.out) as fh:
        fh.write("# manifest: " + json.dumps(man, sort_keys=True) + "\n")
        fh.write(
            f"# atom_location={_fmt(sup.atom_location)} atom_weight={_fmt(sup.atom_weight)}\n"
        )
        writer = csv.writer(fh)
        if args.grid is not None:
            ts = np.linspace(sup.r_minus, sup.r_plus, args.grid)
            try:
                vals = [density(t, params) for t in ts]
            except AtomicOnlyError as exc:
                fh.write(f"# atomic-only: {exc}\n")
                writer.writerow(["t", "density"])
                _log_manifest(man)
                return 0
            writer.writerow(["t", "density"])
            for t, v in zip(ts, vals):
                writer.writerow([_fmt(t), _fmt(v)])
        else:
            ds = sorted(args.d) if args.d is not None else [1, 2, 3, 4]
            writer.writerow(["gamma", "p", "d", "closed", "numeric", "abs_err"])
            for d in ds:
                closed = moment_closed(params, d)
                numeric = moment_numeric(params, d)
                writer.writerow(
                    [
                        _fmt(params.gamma),
                        _fmt(params.p),
                        d,
                        _fmt(closed),
                        _fmt(numeric),
                        _fmt(abs(closed - numeric)),
                    ]
                )
    _log_manifest(man)
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _sweep_frames(args, seed: int):
    """Deterministically ordered (label, m_or_q, frame_seed, Frame) tuples."""
    fam = args.family
    out = []
    if fam == "random":
        if args.m is None or args.n is None:
            raise ValueError("random sweep needs --m and --n lists")
        for m in sorted(args.m):
            for n in sorted(args.n):
                if n < m:
                    continue
                for i in range(args.num_seeds):
                    out.append((m, n, seed + i, random_frame(m, n, args.field, seed + i)))
        if not out:
            raise ValueError("no valid (m, n) pairs with n >= m in the sweep grid")
    elif fam == "simplex":
        if args.m is None:
            raise ValueError("simplex sweep needs --m list")
        for m in sorted(args.m):
            frame = simplex_etf(m)
            out.append((m, frame.n, None, frame))
    elif fam == "harmonic":
        if args.q is None:
            raise ValueError("harmonic sweep needs --q list")
        for q in sorted(args.q):
            frame = harmonic_etf(q)
            out.append((frame.m, frame.n, None, frame))
    elif fam == "repeated-onb":
        if args.m is None:
            raise ValueError("repeated-onb sweep needs --m list")
        for m in sorted(args.m):
            frame = repeated_onb(m, args.copies)
            out.append((m, frame.n, None, frame))
    else:
        raise ValueError(f"unknown family {fam!r}")
    return out


def cmd_sweep(args) -> int:
    for d in args.d:
        if d not in (2, 3, 4):
            raise ValueError("sweep orders must be in 2..4")
    seed = _resolve_seed(args)
    frames = _sweep_frames(args, seed)
    man = _manifest(args, seed=seed)

    violations = 0
    rows = []
    counter = 0
    for m, n, frame_seed, frame in frames:
        for p in sorted(args.p):
            ks = ""
            err_ks = ""
            if args.trials:
                # per-row erasure seed, fixed by position in the sorted grid
                ks_seed = seed + 1_000_003 * counter
                try:
                    spectra = subset_spectrum_samples(
                        frame, ErasureModel(p=p, seed=ks_seed), args.trials
                    )
                    pooled = pool_eigenvalues(spectra, frame.m)
                    ks = _fmt(ks_distance(pooled, ManovaParams(gamma=frame.m / frame.n, p=p)))
                except ValueError as exc:
                    err_ks = f"ks: {exc}"
            counter += 1
            for d in sorted(args.d):
                base = [args.family, m, n, "" if frame_seed is None else frame_seed, _fmt(p), d]
                try:
                    rep = check_theorem(frame, p, d)
                    if rep.equality_class == VIOLATION:
                        violations += 1
                    rows.append(
                        base + [_fmt(rep.moment), _fmt(rep.bound), _fmt(rep.slack), ks, err_ks]
                    )
                except ValueError as exc:
                    rows.append(base + ["", "", "", ks, str(exc)])

    with _out_stream(args.out) as fh:
        fh.write("# manifest: " + json.dumps(man, sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(
            ["family", "m", "n", "seed", "p", "d", "moment", "bound", "slack", "ks_distance", "error"]
        )
        writer.writerows(rows)
    _log_manifest(man)
    if violations:
        print(f"error: {violations} bound violation(s) detected", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ewb",
        description="Erased-frame moments, MANOVA law tables, and Welch-type bound checks.",
        epilog="Seeds: --seed wins, then the EWB_DEFAULT_SEED environment variable, then 0.",
    )
    parser.add_argument("--version", action="version", version=f"ewb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a frame and write it as JSON")
    c.add_argument("--kind", required=True,
                   choices=["random", "simplex", "harmonic", "repeated-onb", "nearest-utf"])
    c.add_argument("--m", type=int)
    c.add_argument("--n", type=int)
    c.add_argument("--q", type=int)
    c.add_argument("--copies", type=int, default=2)
    c.add_argument("--field", choices=["real", "complex"], default="real")
    c.add_argument("--seed", type=int)
    c.add_argument("--frame", help="input frame file (nearest-utf only)")
    c.add_argument("--max-iters", type=int, default=500)
    c.add_argument("--tol", type=float, default=1e-9)
    c.add_argument("--out", required=True, help="output frame JSON path")
    c.set_defaults(func=cmd_construct)

    mo = sub.add_parser("moments", help="erased-moment table for a frame file")
    mo.add_argument("--frame", required=True)
    mo.add_argument("--p", type=_float_list, required=True, help="comma list of keep probabilities")
    mo.add_argument("--d", type=_int_list, required=True, help="comma list of moment orders")
    mo.add_argument("--method", choices=["poly", "brute", "mc"], default="poly")
    mo.add_argument("--trials", type=int)
    mo.add_argument("--seed", type=int)
    mo.add_argument("--out")
    mo.set_defaults(func=cmd_moments)

    b = sub.add_parser("bound", help="erasure Welch bound reports for a frame file")
    b.add_argument("--frame", required=True)
    b.add_argument("--p", type=_float_list, required=True)
    b.add_argument("--d", type=_int_list, required=True)
    b.add_argument("--tol", type=float, default=1e-9)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bound)

    ma = sub.add_parser("manova", help="MANOVA moment table or density grid as CSV")
    ma.add_argument("--gamma", type=float, required=True)
    ma.add_argument("--p", type=float, required=True)
    ma.add_argument("--d", type=_int_list, help="moment orders (default 1,2,3,4)")
    ma.add_argument("--grid", type=int, help="emit the density on this many bulk grid points instead")
    ma.add_argument("--out")
    ma.set_defaults(func=cmd_manova)

    s = sub.add_parser("sweep", help="long-format CSV over a family / p / d grid")
    s.add_argument("--family", required=True,
                   choices=["random", "simplex", "harmonic", "repeated-onb"])
    s.add_argument("--m", type=_int_list)
    s.add_argument("--n", type=_int_list)
    s.add_argument("--q", type=_int_list)
    s.add_argument("--copies", type=int, default=2)
    s.add_argument("--field", choices=["real", "complex"], default="real")
    s.add_argument("--num-seeds", type=int, default=1, help="random frames per (m, n)")
    s.add_argument("--p", type=_float_list, required=True)
    s.add_argument("--d", type=_int_list, required=True)
    s.add_argument("--trials", type=int, help="erasure trials per row for the KS column")
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
