"""Count curves over T-grids and least-squares growth slopes.

Filters are nested: ``box`` counts integer points of the coefficient box,
``q-member`` keeps those whose roots pass the tube test, ``irreducible`` keeps
irreducible tube members, and ``units`` keeps irreducible tube members with
constant term +-1 (SL only).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from ._numeric import as_rational
from .boxes import coeff_box, enumerate_box, sample_box
from .chamber import Direction, Group, SignPattern, Surd, check_pattern
from .errors import EnumerationCapError, NotSquarefreeError
from .factor import IRREDUCIBLE, REDUCIBLE, is_irreducible
from .intpoly import IntPolynomial
from .roots import Verdict, check_q_membership, isolate_real_roots, model_hints

FILTERS = ("box", "q-member", "irreducible", "units")
MODES = ("exact", "exhaustive", "sampled", "auto")
DEFAULT_SAMPLES = 10_000


@dataclass
class CountRecord:
    group: str
    v: tuple[str, ...]
    m: str
    eps: str
    T: str
    filter: str
    mode: str
    count: int
    box_count: int
    estimate: float
    se: float = 0.0
    log_se: float = 0.0
    k: int = 0
    seed: int | None = None
    uncertain: int = 0
    deferred: int = 0
    band_hi: int | None = None

    @property
    def t(self) -> float:
        return float(Fraction(self.T))

    @property
    def value(self) -> float:
        """Exact count, or the scaled estimate for sampled records."""
        return self.estimate if self.mode == "sampled" else float(self.count)

    def log_value(self) -> float:
        if self.mode == "sampled":
            return math.log(self.estimate)
        return log_int(self.count)


def log_int(n: int) -> float:
    """log of a positive integer too large for float conversion."""
    if n < 1 << 1000:
        return math.log(n)
    shift = n.bit_length() - 64
    return math.log(n >> shift) + shift * math.log(2)


def _passes(p: IntPolynomial, direction: Direction, m, T, eps, filt: str, radius, hints):
    """(passed, uncertain, deferred) for a single polynomial under ``filt``."""
    try:
        cluster = isolate_real_roots(p, hints)
    except NotSquarefreeError:
        return False, filt != "box", False
    res = check_q_membership(p, direction, m, T, eps, radius=radius, cluster=cluster)
    if res.verdict is Verdict.UNCERTAIN:
        return False, True, False
    if not res.member:
        return False, False, False
    if filt == "q-member":
        return True, False, False
    if filt == "units" and abs(p.constant_term) != 1:
        return False, False, False
    cert = is_irreducible(p, cluster, screen=False)
    if cert.verdict == IRREDUCIBLE:
        return True, False, False
    return False, False, cert.verdict != REDUCIBLE


def count_at(
    direction: Direction,
    m,
    eps,
    T,
    filt: str = "box",
    mode: str = "auto",
    k: int | None = None,
    seed: int | None = None,
    cap: int = 10**6,
    radius=None,
) -> CountRecord:
    if filt not in FILTERS:
        raise ValueError(f"unknown filter {filt!r}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    m = check_pattern(direction, m)
    if filt == "units" and direction.group is not Group.SL:
        raise ValueError("the units filter needs an SL direction")
    T, eps = as_rational(T), as_rational(eps)
    box = coeff_box(direction, m, T, eps)
    base = dict(group=direction.group.value, v=tuple(str(c) for c in direction.coords), m=str(m), eps=str(eps), T=str(T), filter=filt)
    N = box.count
    if filt == "box" or N == 0:
        return CountRecord(**base, mode="exact", count=N, box_count=N, estimate=float(N))
    if mode == "exact":
        raise ValueError("exact mode is only available for the box filter")
    if mode == "auto":
        mode = "exhaustive" if N <= cap else "sampled"
    hints = model_hints(direction, m, T)
    if mode == "exhaustive":
        polys = enumerate_box(box, cap)
    else:
        if seed is None:
            raise ValueError("sampled mode needs a seed")
        k = k or DEFAULT_SAMPLES
        polys = sample_box(box, k, seed)
    hits = unc = dfr = total = 0
    for p in polys:
        ok, u, d = _passes(p, direction, m, T, eps, filt, radius, hints)
        hits += ok
        unc += u
        dfr += d
        total += 1
    band = math.factorial(direction.n) * hits if filt == "units" else None
    if mode == "exhaustive":
        return CountRecord(**base, mode=mode, count=hits, box_count=N, estimate=float(hits), uncertain=unc, deferred=dfr, band_hi=band)
    frac = hits / total
    est = frac * N
    se = N * math.sqrt(frac * (1 - frac) / total)
    log_se = se / est if est > 0 else math.inf
    return CountRecord(
        **base, mode=mode, count=hits, box_count=N, estimate=float(est), se=float(se), log_se=log_se,
        k=total, seed=seed, uncertain=unc, deferred=dfr, band_hi=band,
    )


def _count_job(args):
    return count_at(*args[:4], **args[4])


def count_curve(
    direction: Direction,
    m,
    eps,
    T_grid: Sequence,
    filt: str = "box",
    mode: str = "auto",
    k: int | None = None,
    seed: int | None = None,
    cap: int = 10**6,
    radius=None,
    jobs: int = 1,
) -> list[CountRecord]:
    """One record per grid point, in grid order.

    Sampled points use seed + (grid index) so that the curve does not depend
    on the number of workers.
    """
    grid = [as_rational(T) for T in T_grid]
    if any(a >= b for a, b in zip(grid, grid[1:])):
        raise ValueError("T grid must be strictly increasing")
    tasks = []
    for i, T in enumerate(grid):
        s = None if seed is None else seed + i
        tasks.append((direction, check_pattern(direction, m), eps, T, dict(filt=filt, mode=mode, k=k, seed=s, cap=cap, radius=radius)))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_count_job, tasks))
    return [_count_job(t) for t in tasks]


def target_value(target) -> float:
    if isinstance(target, Surd):
        return float(target)
    return float(as_rational(target) if not isinstance(target, float) else target)


@dataclass
class EntropyFit:
    T: list[float]
    log_counts: list[float]
    slope: float
    intercept: float
    max_residual: float
    target: float
    relative_error: float
    slope_se: float
    sampling_se: float
    excluded: list[float] = field(default_factory=list)
    degenerate: bool = False

    def within(self, tol: float) -> bool:
        return self.relative_error <= tol

    def to_json(self) -> dict:
        return asdict(self)


def fit_entropy(records: Sequence[CountRecord], target) -> EntropyFit:
    """Least-squares slope of log(count) against T over records with positive counts."""
    used = [r for r in records if r.value > 0]
    excluded = [r.t for r in records if r.value <= 0]
    if len(used) < 3:
        raise ValueError(f"need at least 3 positive counts, got {len(used)}")
    t = np.array([r.t for r in used])
    y = np.array([r.log_value() for r in used])
    A = np.vstack([t, np.ones_like(t)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * t + intercept)
    sxx = float(np.sum((t - t.mean()) ** 2))
    dof = len(t) - 2
    slope_se = math.sqrt(float(np.sum(resid**2)) / dof / sxx) if dof > 0 else math.inf
    w = (t - t.mean()) / sxx
    log_se = np.array([r.log_se for r in used])
    sampling_se = float(math.sqrt(np.sum((w * log_se) ** 2)))
    tv = target_value(target)
    rel = abs(slope - tv) / abs(tv) if tv else abs(slope)
    degenerate = bool(np.ptp(y) == 0 or abs(slope) < 1e-9)
    return EntropyFit(
        t.tolist(), y.tolist(), float(slope), float(intercept), float(np.max(np.abs(resid))),
        tv, float(rel), slope_se, sampling_se, excluded, degenerate,
    )


def slope_stability(direction: Direction, m, eps_list, T_grid, target) -> dict:
    """Box-count slopes for several eps and their largest relative spread."""
    slopes = {}
    for eps in eps_list:
        fit = fit_entropy(count_curve(direction, m, eps, T_grid), target)
        slopes[str(as_rational(eps))] = fit.slope
    vals = list(slopes.values())
    spread = (max(vals) - min(vals)) / abs(target_value(target))
    return {"slopes": slopes, "spread": spread}


def unit_log_embedding(p: IntPolynomial, roots=None, precision: int = 64) -> tuple[mpmath.mpf, ...]:
    """(log|x_1|, ..., log|x_n|) in decreasing order for a totally real unit's minimal polynomial."""
    if abs(p.constant_term) != 1:
        raise ValueError(f"{p} is not a unit polynomial (constant term {p.constant_term})")
    try:
        cluster = roots or isolate_real_roots(p, precision=precision)
    except NotSquarefreeError:
        raise ValueError(f"{p} has a repeated root") from None
    if not cluster.certified:
        raise ValueError(f"{p} has non-real roots")
    if not is_irreducible(p, cluster).irreducible:
        raise ValueError(f"{p} is reducible")
    bounds = cluster.log_abs_bounds(precision)
    ctx = mpmath.MPContext()
    ctx.prec = precision
    out = []
    for b in bounds:
        mid = b.mid
        out.append(ctx.mpf(mid.numerator) / mid.denominator)
    lo = sum(b.lo for b in bounds)
    hi = sum(b.hi for b in bounds)
    assert lo <= 0 <= hi, "log-embedding does not sum to zero"
    return tuple(sorted(out, reverse=True))


# -- persistence ----------------------------------------------------------------

CSV_FIELDS = [
    "group", "v", "m", "eps", "T", "filter", "mode", "count", "box_count",
    "estimate", "se", "log_se", "k", "seed", "uncertain", "deferred", "band_hi",
]


def records_csv(records: Sequence[CountRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_FIELDS)
    for r in records:
        row = asdict(r)
        row["v"] = ";".join(r.v)
        row["estimate"] = repr(r.estimate)
        row["se"] = repr(r.se)
        row["log_se"] = repr(r.log_se)
        w.writerow(["" if row[f] is None else row[f] for f in CSV_FIELDS])
    return buf.getvalue()


def sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def dumps(obj) -> str:
    """JSON with big integers as decimal strings."""

    def conv(x):
        if isinstance(x, bool) or x is None:
            return x
        if isinstance(x, int):
            return str(x) if abs(x) >= 2**53 else x
        if isinstance(x, (Fraction, mpmath.mpf)):
            return str(x)
        if isinstance(x, float):
            return x if math.isfinite(x) else str(x)
        if isinstance(x, dict):
            return {str(k): conv(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [conv(v) for v in x]
        if isinstance(x, (Direction, SignPattern)):
            return str(x)
        return x

    return json.dumps(conv(obj), indent=2, sort_keys=True)
