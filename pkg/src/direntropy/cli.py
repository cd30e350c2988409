"""Command-line entry point: ``direntropy <command> [options]``.

Every experiment command writes its CSV output next to a JSON manifest that
records the full configuration, tool version, seeds, precision cap and the
sha256 of each CSV.  ``--from-manifest`` replays a stored configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from ._numeric import MAX_PRECISION
from .boxes import coeff_box
from .chamber import (
    Direction,
    Group,
    SignPattern,
    check_pattern,
    min_zero_sum_deficit,
    partition_deficit,
    proper_partitions,
    reciprocal_deficit,
)
from .entropy import count_curve, dumps, fit_entropy, records_csv, sha256
from .errors import (
    BoxError,
    CensusCapError,
    DeterminantError,
    DirectionError,
    EnumerationCapError,
    NotSquarefreeError,
    PrecisionError,
    WallError,
)
from .factor import IrreducibleCensus, is_irreducible, irreducible_fraction, reciprocal_factor_census
from .intpoly import IntPolynomial
from .realize import IntMatrix, cartan_projection, companion, jordan_data, sp_verify
from .roots import disc_growth, discriminant

EXIT_USAGE = 2
HANDLED = (
    DirectionError, BoxError, EnumerationCapError, NotSquarefreeError, PrecisionError,
    DeterminantError, WallError, CensusCapError, ValueError, KeyError,
)


class UsageError(ValueError):
    pass


# -- parsing helpers -----------------------------------------------------------

def parse_grid(text: str) -> list[Fraction]:
    """``start:stop:step`` (inclusive stop), ``geom:start:stop:count`` or a comma list."""
    text = text.strip()
    if text.startswith("geom:"):
        _, a, b, k = text.split(":")
        a, b, k = float(a), float(b), int(k)
        return [Fraction(repr(float(x))) for x in np.geomspace(a, b, k)]
    if ":" in text:
        parts = [Fraction(p) for p in text.split(":")]
        if len(parts) == 2:
            parts.append(Fraction(1))
        start, stop, step = parts
        if step <= 0:
            raise UsageError("grid step must be positive")
        out, x = [], start
        while x <= stop:
            out.append(x)
            x += step
        return out
    return [Fraction(p) for p in text.split(",") if p.strip()]


def parse_number(text: str) -> int:
    """Integer, also accepting forms like 1e6."""
    return int(float(text)) if any(c in text for c in "eE.") else int(text)


def parse_direction(args) -> Direction:
    coords = tuple(Fraction(c) for c in args.v.split(","))
    d = Direction(Group.parse(args.group), coords)
    if args.n is not None and d.n != args.n:
        raise DirectionError(f"--n {args.n} does not match {d.n} coordinates in --v")
    return d


def parse_pattern(args, d: Direction) -> SignPattern:
    if args.m is None:
        return SignPattern.positive(d.n)
    return check_pattern(d, args.m)


def parse_poly(text: str) -> IntPolynomial:
    return IntPolynomial.from_coeffs([int(c) for c in text.split(",")])


def _add_direction(p, with_m=True, req=True):
    p.add_argument("--group", required=req, help="sl or sp")
    p.add_argument("--n", type=int, help="rank (checked against --v)")
    p.add_argument("--v", required=req, help="comma-separated rationals, e.g. 1,0,-1")
    if with_m:
        p.add_argument("--m", help="comma-separated signs, e.g. +,-,- (default all +)")


def _write(out_dir: Path, name: str, text: str) -> str:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text, encoding="utf-8", newline="")
    return sha256(text)


def _manifest(args, command: str, extra: dict, outputs: dict) -> dict:
    config = {k: v for k, v in vars(args).items() if k not in ("func", "from_manifest", "out")}
    return {
        "tool": "direntropy",
        "version": __version__,
        "command": command,
        "config": config,
        "precision_cap": MAX_PRECISION,
        "outputs": outputs,
        **extra,
    }


def _emit(obj) -> None:
    print(dumps(obj))


# -- commands ------------------------------------------------------------------------

def cmd_count(args) -> int:
    d = parse_direction(args)
    m = parse_pattern(args, d)
    grid = parse_grid(args.T)
    eps_list = [Fraction(e) for e in args.eps.split(",")]
    target = d.rho()
    mode = args.mode
    if mode == "sampled" and args.seed is None and args.filter != "box":
        raise UsageError("--seed is required for sampled counts")
    out = Path(args.out)
    outputs, fits, t0s = {}, {}, {}
    for eps in eps_list:
        recs = count_curve(
            d, m, eps, grid, args.filter, mode, k=args.samples, seed=args.seed,
            cap=args.cap, jobs=args.jobs,
        )
        tag = f"count_eps{eps}".replace("/", "_")
        outputs[f"{tag}.csv"] = _write(out, f"{tag}.csv", records_csv(recs))
        try:
            fit = fit_entropy(recs, target)
            fits[str(eps)] = fit.to_json()
        except ValueError as exc:
            fits[str(eps)] = {"error": str(exc)}
        t0s[str(eps)] = _empirical_t0(recs) if args.filter == "q-member" else None
    summary = {
        "direction": str(d),
        "target_rho": str(target),
        "fits": {e: {k: f.get(k) for k in ("slope", "relative_error", "slope_se", "sampling_se", "error") if k in f} for e, f in fits.items()},
    }
    man = _manifest(args, "count", {"seeds": [args.seed], "empirical_T0": t0s, "fit": fits, "target_rho": str(target)}, outputs)
    _write(out, "count_manifest.json", dumps(man))
    _emit(summary)
    return 0


def _empirical_t0(recs):
    """Smallest grid T from which every checked polynomial was a tube member."""
    t0 = None
    for r in reversed(recs):
        if r.mode == "exhaustive":
            ok = r.box_count > 0 and r.count == r.box_count
        else:
            ok = r.mode == "sampled" and r.count == r.k and r.uncertain == 0
        if not ok:
            break
        t0 = r.T
    return t0


def cmd_realize(args) -> int:
    p = parse_poly(args.poly)
    M = companion(p)
    jd = jordan_data(M)
    _emit({"poly": str(p), "matrix": M.to_json(), "jordan": jd.to_json()})
    return 0


def _matrix(args) -> IntMatrix:
    return IntMatrix.from_json(json.loads(args.matrix))


def cmd_jordan(args) -> int:
    M = _matrix(args)
    out = jordan_data(M, precision=args.precision).to_json()
    if M.size % 2 == 0:
        chk = sp_verify(M)
        out["symplectic"] = chk.symplectic
        out["reciprocal_charpoly"] = chk.reciprocal_charpoly
    _emit(out)
    return 0


def cmd_cartan(args) -> int:
    _emit(cartan_projection(_matrix(args), precision=args.precision).to_json())
    return 0


def cmd_irreducible(args) -> int:
    if args.poly:
        _emit(is_irreducible(parse_poly(args.poly)).to_json())
        return 0
    if not (args.group and args.v and args.T and args.eps):
        raise UsageError("give --poly, or --group/--v/--T/--eps for a box census")
    d = parse_direction(args)
    m = parse_pattern(args, d)
    eps = Fraction(args.eps)
    mode = "sample" if args.samples else "exhaustive"
    if mode == "sample" and args.seed is None:
        raise UsageError("--seed is required with --samples")
    rows = []
    recip = []
    for i, T in enumerate(parse_grid(args.T)):
        box = coeff_box(d, m, T, eps)
        seed = None if args.seed is None else args.seed + i
        c = irreducible_fraction(box, mode, args.samples, seed) if box.count else IrreducibleCensus()
        rows.append((T, c))
        if d.group is Group.SP and box.count:
            rc = reciprocal_factor_census(box, mode, args.samples, seed)
            recip.append({"T": str(T), **{k: v for k, v in rc.classes.items()}})
    shapes = sorted({s for _, c in rows for s in c.by_shape})
    lines = ["T,eps,total,irreducible," + ",".join(f"reducible_deg{s}" for s in shapes) + ("," if shapes else "") + "deferred"]
    for T, c in rows:
        cells = [str(T), str(eps), str(c.total), str(c.irreducible)] + [str(c.by_shape.get(s, 0)) for s in shapes] + [str(c.deferred)]
        lines.append(",".join(cells))
    text = "\r\n".join(lines) + "\r\n"
    out = Path(args.out)
    outputs = {"irreducible.csv": _write(out, "irreducible.csv", text)}
    eta = min_zero_sum_deficit(d) if d.group is Group.SL else None
    extra = {"seeds": [args.seed], "eta_hat": None if eta is None else str(eta), "reciprocal_classes": recip}
    _write(out, "irreducible_manifest.json", dumps(_manifest(args, "irreducible", extra, outputs)))
    _emit({"rows": [{"T": str(T), "fraction": c.fraction, "total": c.total, "deferred": c.deferred} for T, c in rows],
           "eta_hat": extra["eta_hat"], "reciprocal_classes": recip})
    return 0


def cmd_disc(args) -> int:
    if args.poly:
        p = parse_poly(args.poly)
        _emit({"poly": str(p), "discriminant": str(discriminant(p))})
        return 0
    if not (args.group and args.v and args.T):
        raise UsageError("give --poly, or --group/--v/--T for the model discriminant growth")
    d = parse_direction(args)
    m = parse_pattern(args, d)
    out = []
    for T in parse_grid(args.T):
        g = disc_growth(d, m, T, args.precision)
        out.append({"T": str(T), "growth": str(g.value), "half": str(g.half_value), "target": str(g.target)})
    _emit(out)
    return 0


def cmd_volume(args) -> int:
    from .volume import volume_slope

    if args.seed is None:
        raise UsageError("--seed is required for volume estimates")
    d = parse_direction(args)
    grid = parse_grid(args.T)
    samples = parse_number(args.samples)
    slope, est = volume_slope(d, grid, float(Fraction(args.eps)), samples, args.seed, norm=args.norm, method=args.method)
    lines = ["T,log_volume,log_se,samples"]
    for T, e in zip(grid, est):
        lines.append(f"{T},{e.log_volume!r},{e.log_se!r},{e.samples}")
    text = "\r\n".join(lines) + "\r\n"
    out = Path(args.out)
    outputs = {"volume.csv": _write(out, "volume.csv", text)}
    target = 2 * d.rho()
    rel = abs(slope - float(target)) / float(target)
    extra = {"seeds": [args.seed + i for i in range(len(grid))], "fit": {"slope": slope, "target": str(target), "relative_error": rel}}
    _write(out, "volume_manifest.json", dumps(_manifest(args, "volume", extra, outputs)))
    _emit({"slope": slope, "target_2rho": str(target), "relative_error": rel})
    return 0


def cmd_census(args) -> int:
    from .volume import census_slopes, histogram_csv, sl2_census

    c = sl2_census(args.X, cap=args.cap, jobs=args.jobs)
    edges = np.linspace(0, float(np.ceil(max(c.mu.max(), 1.0))), args.bins + 1)
    out = Path(args.out)
    outputs = {
        "census_jordan.csv": _write(out, "census_jordan.csv", histogram_csv(*c.jordan_histogram(edges))),
        "census_cartan.csv": _write(out, "census_cartan.csv", histogram_csv(*c.cartan_histogram(edges))),
    }
    L = parse_grid(args.L) if args.L else None
    R = parse_grid(args.R) if args.R else None
    slopes = None
    if L and R:
        a, b = census_slopes(c, [float(x) for x in L], [float(x) for x in R])
        slopes = {"distinct_trace_vs_lambda1": a, "matrices_vs_mu": b}
    extra = {"matrix_count": c.matrix_count, "distinct_trace_count": c.distinct_trace_count, "slopes": slopes, "seeds": []}
    _write(out, "census_manifest.json", dumps(_manifest(args, "census", extra, outputs)))
    _emit({"X": args.X, "matrix_count": c.matrix_count, "loxodromic": int(c.loxodromic.sum()),
           "distinct_trace_count": c.distinct_trace_count, "slopes": slopes})
    return 0


def cmd_deficit(args) -> int:
    d = parse_direction(args)
    if d.group is Group.SP:
        if args.S1:
            S1 = [int(i) - 1 for i in args.S1.split(",")]
            _emit({"direction": str(d), "S1": args.S1, "reciprocal_deficit": str(reciprocal_deficit(d, S1))})
            return 0
        rows = [{"S1": [i + 1 for i in sorted(s)], "reciprocal_deficit": str(reciprocal_deficit(d, s))}
                for s in proper_partitions(d.n)]
        _emit({"direction": str(d), "partitions": rows})
        return 0
    if args.S1:
        pd = partition_deficit(d, [int(i) - 1 for i in args.S1.split(",")])
        _emit({"direction": str(d), "S1": sorted(i + 1 for i in pd.S1), "S2": sorted(i + 1 for i in pd.S2),
               "deficit": str(pd.deficit), "zero_block_sums": pd.zero_block_sums})
        return 0
    rows = []
    for s in proper_partitions(d.n):
        pd = partition_deficit(d, s)
        rows.append({"S1": sorted(i + 1 for i in pd.S1), "deficit": str(pd.deficit), "zero_block_sums": pd.zero_block_sums})
    eta = min_zero_sum_deficit(d)
    _emit({"direction": str(d), "partitions": rows, "eta_hat": None if eta is None else str(eta)})
    return 0


# -- parser -----------------------------------------------------------------------------

def build_parser(replay: bool = False) -> argparse.ArgumentParser:
    """With ``replay`` set, options otherwise required may come from a manifest."""
    req = not replay
    ap = argparse.ArgumentParser(prog="direntropy", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="count curve over a T grid and growth-slope fit")
    _add_direction(p, req=req)
    p.add_argument("--eps", required=req, help="one or more comma-separated eps values")
    p.add_argument("--T", required=req, help="grid start:stop:step, geom:a:b:k or comma list")
    p.add_argument("--filter", default="box", choices=["box", "q-member", "irreducible", "units"])
    p.add_argument("--mode", default="auto", choices=["exact", "exhaustive", "sampled", "auto"])
    p.add_argument("--samples", type=parse_number, default=None, help="sample size per T (sampled mode)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--cap", type=parse_number, default=10**6, help="largest box enumerated exhaustively")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="out")
    p.add_argument("--from-manifest", help="replay the configuration stored in a manifest")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("realize", help="companion matrix and spectral data of a polynomial")
    p.add_argument("--poly", required=True, help="descending coefficients, e.g. 1,-3,1")
    p.set_defaults(func=cmd_realize)

    for name, fn, helptext in (("jordan", cmd_jordan, "Jordan projection of an integer matrix"),
                               ("cartan", cmd_cartan, "Cartan projection of an integer matrix")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--matrix", required=True, help="JSON array of rows, e.g. '[[2,1],[1,1]]'")
        p.add_argument("--precision", type=int, default=64)
        p.set_defaults(func=fn)

    p = sub.add_parser("irreducible", help="irreducibility of a polynomial or census of a box")
    p.add_argument("--poly", help="descending coefficients")
    p.add_argument("--group")
    p.add_argument("--n", type=int)
    p.add_argument("--v")
    p.add_argument("--m")
    p.add_argument("--T")
    p.add_argument("--eps")
    p.add_argument("--samples", type=parse_number, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="out")
    p.add_argument("--from-manifest")
    p.set_defaults(func=cmd_irreducible)

    p = sub.add_parser("disc", help="exact discriminant, or growth of the model discriminant")
    p.add_argument("--poly")
    p.add_argument("--group")
    p.add_argument("--n", type=int)
    p.add_argument("--v")
    p.add_argument("--m")
    p.add_argument("--T")
    p.add_argument("--precision", type=int, default=256)
    p.set_defaults(func=cmd_disc)

    p = sub.add_parser("volume", help="Monte Carlo Haar volume of chamber tubes")
    _add_direction(p, with_m=False, req=req)
    p.add_argument("--T", required=req)
    p.add_argument("--eps", required=req)
    p.add_argument("--samples", default="1e6")
    p.add_argument("--seed", type=int, default=None, help="required")
    p.add_argument("--norm", default="euclidean", choices=["euclidean", "max"])
    p.add_argument("--method", default="sobol", choices=["sobol", "random"])
    p.add_argument("--out", default="out")
    p.add_argument("--from-manifest")
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("census", help="exhaustive SL_2(Z) census by entry height")
    p.add_argument("--X", type=int, required=req)
    p.add_argument("--cap", type=int, default=300)
    p.add_argument("--bins", type=int, default=40)
    p.add_argument("--L", help="lambda_1 thresholds for the distinct-trace slope")
    p.add_argument("--R", help="||mu|| thresholds for the matrix-count slope")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="out")
    p.add_argument("--from-manifest")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("deficit", help="partition deficits of a direction")
    _add_direction(p, with_m=False)
    p.add_argument("--S1", help="1-based indices of the first block, e.g. 1,4")
    p.set_defaults(func=cmd_deficit)
    return ap


def _replay(args):
    path = getattr(args, "from_manifest", None)
    if not path:
        return args
    man = json.loads(Path(path).read_text(encoding="utf-8"))
    if man.get("command") != args.command:
        raise UsageError(f"manifest is for {man.get('command')!r}, not {args.command!r}")
    for k, v in man["config"].items():
        setattr(args, k, v)
    return args


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    replay = any(a == "--from-manifest" or a.startswith("--from-manifest=") for a in argv)
    args = build_parser(replay).parse_args(argv)
    try:
        args = _replay(args)
        return args.func(args)
    except HANDLED as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        print(json.dumps(err), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
