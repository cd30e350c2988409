"""Haar volume of chamber tubes and an exhaustive SL_2(Z) census.

In KAK coordinates the Haar measure has density prod_alpha sinh(alpha(u)) over
the positive roots.  The tube volume is the integral of that density over a
small ball around T v in the chamber, estimated here by (quasi-)Monte Carlo.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import gammaln, logsumexp
from scipy.stats import qmc

from ._numeric import as_rational
from .chamber import Direction, Group
from .errors import CensusCapError, WallError


def positive_roots(group: Group, n: int) -> np.ndarray:
    """Positive roots as rows of coefficient vectors on (u_1, ..., u_n)."""
    group = Group.parse(group)
    rows = []
    for i, j in itertools.combinations(range(n), 2):
        r = np.zeros(n)
        r[i], r[j] = 1, -1
        rows.append(r)
        if group is Group.SP:
            r = np.zeros(n)
            r[i], r[j] = 1, 1
            rows.append(r)
    if group is Group.SP:
        for i in range(n):
            r = np.zeros(n)
            r[i] = 2
            rows.append(r)
    return np.array(rows).reshape(-1, n)


def _mpf(q):
    return mpmath.mpf(q.numerator) / q.denominator


def haar_density(group, u) -> mpmath.mpf:
    """prod over positive roots of sinh(alpha(u)); zero on a wall."""
    group = Group.parse(group)
    u = [x if isinstance(x, mpmath.mpf) else _mpf(as_rational(x)) for x in u]
    n = len(u)
    out = mpmath.mpf(1)
    for i, j in itertools.combinations(range(n), 2):
        out *= mpmath.sinh(u[i] - u[j])
        if group is Group.SP:
            out *= mpmath.sinh(u[i] + u[j])
    if group is Group.SP:
        for x in u:
            out *= mpmath.sinh(2 * x)
    return out


def log_haar_density(group, U: np.ndarray) -> np.ndarray:
    """Vectorised sum of log sinh(alpha(u)) over rows of U; -inf off the open chamber."""
    U = np.atleast_2d(np.asarray(U, dtype=float))
    roots = positive_roots(group, U.shape[1])
    A = U @ roots.T
    with np.errstate(divide="ignore", invalid="ignore"):
        ls = np.where(A > 0, A + np.log(-np.expm1(-2 * np.abs(A))) - math.log(2), -np.inf)
    return ls.sum(axis=1)


def _sl_basis(n: int) -> np.ndarray:
    """Orthonormal basis (rows) of the trace-zero hyperplane in R^n."""
    M = np.eye(n) - 1.0 / n
    q, _ = np.linalg.qr(M[:, : n - 1])
    return q.T


@dataclass(frozen=True)
class TubeSpec:
    direction: Direction
    T: float
    eps: float
    norm: str = "euclidean"

    @property
    def group(self) -> Group:
        return self.direction.group

    @property
    def dim(self) -> int:
        return self.direction.n - 1 if self.group is Group.SL else self.direction.n

    @property
    def center(self) -> np.ndarray:
        return float(self.T) * np.array(self.direction.as_floats())

    def _dual(self, alpha: np.ndarray) -> float:
        if self.norm == "euclidean":
            return float(np.linalg.norm(alpha))
        if self.norm == "max":
            return float(np.abs(alpha).sum())
        raise ValueError(f"unknown norm {self.norm!r}")

    def wall_margin(self) -> float:
        """min over simple roots of T alpha(v) - eps ||alpha||_*; positive iff the ball avoids all walls."""
        n = self.direction.n
        v = np.array(self.direction.as_floats())
        simple = []
        for i in range(n - 1):
            a = np.zeros(n)
            a[i], a[i + 1] = 1, -1
            simple.append(a)
        if self.group is Group.SP:
            a = np.zeros(n)
            a[-1] = 2
            simple.append(a)
        return min(float(self.T) * float(a @ v) - float(self.eps) * self._dual(a) for a in simple)

    def check(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.wall_margin() <= 0:
            raise WallError(f"ball of radius {self.eps} around {self.T}*v touches a chamber wall")

    def half_width(self) -> float:
        """Half-width of a cube (in chamber coordinates) containing the ball."""
        if self.norm == "euclidean":
            return float(self.eps)
        return float(self.eps) * math.sqrt(self.direction.n)

    def to_points(self, W: np.ndarray) -> np.ndarray:
        """Offsets in chamber coordinates -> points u of R^n."""
        if self.group is Group.SL:
            return self.center + W @ _sl_basis(self.direction.n)
        return self.center + W

    def inside(self, U: np.ndarray) -> np.ndarray:
        D = U - self.center
        if self.norm == "euclidean":
            return np.linalg.norm(D, axis=1) < self.eps
        return np.abs(D).max(axis=1) < self.eps


@dataclass(frozen=True)
class VolumeEstimate:
    log_volume: float
    log_se: float
    samples: int
    method: str

    @property
    def estimate(self) -> float:
        return math.exp(self.log_volume)

    @property
    def se(self) -> float:
        return self.estimate * self.log_se


def tube_volume(spec: TubeSpec, samples: int, seed: int, replicas: int = 16, method: str = "sobol") -> VolumeEstimate:
    """Monte Carlo Haar volume of the ball b_{T,eps} in log form.

    ``method='sobol'`` uses independently scrambled Sobol replicas (their
    spread gives the error bar); ``'random'`` uses a seeded PRNG with the same
    replica layout.
    """
    spec.check()
    d = spec.dim
    h = spec.half_width()
    per = max(1, samples // replicas)
    m = max(1, round(math.log2(per)))
    rng = np.random.default_rng(seed)
    logs = []
    total = 0
    for r in range(replicas):
        if method == "sobol":
            eng = qmc.Sobol(d, scramble=True, seed=rng)
            X = eng.random_base2(m)
        elif method == "random":
            X = rng.random((per, d))
        else:
            raise ValueError(f"unknown method {method!r}")
        W = (2 * X - 1) * h
        U = spec.to_points(W)
        ld = log_haar_density(spec.group, U)
        ld = np.where(spec.inside(U), ld, -np.inf)
        total += len(X)
        logs.append(float(logsumexp(ld) - math.log(len(X))))
    logs = np.array(logs)
    log_cube = d * math.log(2 * h)
    if np.all(np.isneginf(logs)):
        return VolumeEstimate(-math.inf, math.inf, total, method)
    top = logs.max()
    vals = np.exp(logs - top)
    mean = vals.mean()
    se = vals.std(ddof=1) / math.sqrt(len(vals)) if len(vals) > 1 else math.inf
    return VolumeEstimate(float(top + math.log(mean) + log_cube), float(se / mean), total, method)


def ball_volume(dim: int, eps: float) -> float:
    """Euclidean ball volume, used for sanity checks."""
    return math.exp(dim / 2 * math.log(math.pi) - gammaln(dim / 2 + 1) + dim * math.log(eps))


def volume_slope(direction: Direction, T_grid, eps, samples: int, seed: int, norm: str = "euclidean", method: str = "sobol"):
    """(slope, estimates) of log tube volume against T."""
    est = [tube_volume(TubeSpec(direction, float(T), float(eps), norm), samples, seed + i, method=method) for i, T in enumerate(T_grid)]
    t = np.array([float(T) for T in T_grid])
    y = np.array([e.log_volume for e in est])
    slope, _ = np.polyfit(t, y, 1)
    return float(slope), est


# -- SL_2(Z) census -------------------------------------------------------------

DEFAULT_CENSUS_CAP = 300


def _egcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def _rows(X: int, a_values):
    """Traces and Frobenius norms^2 of all [[a,b],[c,d]] with |entries| <= X, det 1."""
    traces, frob = [], []
    for a in a_values:
        for b in range(-X, X + 1):
            if math.gcd(a, b) != 1:
                continue
            # a d - b c = 1 with a x + b y = 1 -> d = x, c = -y
            _, x, y = _egcd(a, b)
            d0, c0 = x, -y
            # general solution: c = c0 + k a, d = d0 + k b
            lo, hi = -10 * X - 10, 10 * X + 10
            for coef, base in ((a, c0), (b, d0)):
                if coef > 0:
                    lo = max(lo, math.ceil((-X - base) / coef))
                    hi = min(hi, math.floor((X - base) / coef))
                elif coef < 0:
                    lo = max(lo, math.ceil((X - base) / coef))
                    hi = min(hi, math.floor((-X - base) / coef))
                elif abs(base) > X:
                    hi = lo - 1
            if hi < lo:
                continue
            k = np.arange(lo, hi + 1)
            c = c0 + k * a
            d = d0 + k * b
            traces.append(a + d)
            frob.append(a * a + b * b + c * c + d * d)
    if not traces:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(traces), np.concatenate(frob)


def _rows_job(args):
    return _rows(*args)


def lambda1(trace) -> np.ndarray:
    """log of the spectral radius for |trace| > 2."""
    t = np.abs(np.asarray(trace, dtype=float))
    return np.log((t + np.sqrt(t * t - 4)) / 2)


def mu1(frob_sq) -> np.ndarray:
    """Top Cartan coordinate from s = a^2 + b^2 + c^2 + d^2 (eigenvalues of M^t M solve x^2 - s x + 1)."""
    s = np.asarray(frob_sq, dtype=float)
    return 0.5 * np.log((s + np.sqrt(np.maximum(s * s - 4, 0))) / 2)


@dataclass
class SL2Census:
    X: int
    traces: np.ndarray
    frob: np.ndarray

    @property
    def matrix_count(self) -> int:
        return int(len(self.traces))

    @property
    def loxodromic(self) -> np.ndarray:
        return np.abs(self.traces) > 2

    @property
    def lam(self) -> np.ndarray:
        return lambda1(self.traces[self.loxodromic])

    @property
    def mu(self) -> np.ndarray:
        """||mu||_max = mu_1 for every matrix (mu = (mu_1, -mu_1))."""
        return mu1(self.frob)

    @property
    def distinct_trace_count(self) -> int:
        return int(len(np.unique(self.traces[self.loxodromic])))

    def distinct_traces_upto(self, L) -> np.ndarray:
        t = np.unique(self.traces[self.loxodromic])
        lam = np.sort(lambda1(t))
        return np.searchsorted(lam, np.asarray(L, dtype=float), side="right")

    def matrices_upto(self, R) -> np.ndarray:
        mu = np.sort(self.mu)
        return np.searchsorted(mu, np.asarray(R, dtype=float), side="right")

    def jordan_histogram(self, bins) -> tuple[np.ndarray, np.ndarray]:
        return np.histogram(self.lam, bins=bins)

    def cartan_histogram(self, bins) -> tuple[np.ndarray, np.ndarray]:
        return np.histogram(self.mu, bins=bins)


def sl2_census(X: int, cap: int = DEFAULT_CENSUS_CAP, jobs: int = 1) -> SL2Census:
    """Every integer matrix with entries bounded by X in absolute value and determinant 1."""
    if X < 1:
        raise ValueError("X must be positive")
    if X > cap:
        raise CensusCapError(f"X = {X} exceeds the census cap {cap}")
    a_all = list(range(-X, X + 1))
    if jobs > 1:
        chunks = [a_all[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_rows_job, [(X, ch) for ch in chunks]))
    else:
        parts = [_rows(X, a_all)]
    traces = np.concatenate([p[0] for p in parts])
    frob = np.concatenate([p[1] for p in parts])
    order = np.lexsort((frob, traces))
    return SL2Census(X, traces[order], frob[order])


def census_slopes(census: SL2Census, L_grid, R_grid) -> tuple[float, float]:
    """Slopes of log(distinct traces) vs lambda_1 and log(matrix count) vs ||mu||."""
    L = np.asarray(L_grid, dtype=float)
    R = np.asarray(R_grid, dtype=float)
    a = np.polyfit(L, np.log(census.distinct_traces_upto(L)), 1)[0]
    b = np.polyfit(R, np.log(census.matrices_upto(R)), 1)[0]
    return float(a), float(b)


def histogram_csv(counts: np.ndarray, edges: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["bin_left", "bin_right", "count"])
    for c, lo, hi in zip(counts, edges[:-1], edges[1:]):
        w.writerow([repr(float(lo)), repr(float(hi)), int(c)])
    return buf.getvalue()
