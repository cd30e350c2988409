"""Integer matrices: companion realisation, Jordan and Cartan projections, symplectic check.

Spectral data always goes through the exact characteristic polynomial and the
certified root isolation in :mod:`direntropy.roots`; no floating eigensolver
is involved.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import mpmath

from . import intpoly
from .chamber import SignPattern
from .errors import DeterminantError, NotSquarefreeError
from .intpoly import IntPolynomial
from .roots import RootCluster, isolate_real_roots


@dataclass(frozen=True)
class IntMatrix:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ValueError("matrix must be square and non-empty")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def of(cls, rows) -> "IntMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        cols = list(zip(*other.rows))
        return IntMatrix(tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(tuple(tuple(-x for x in r) for r in self.rows))

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows)))

    def trace(self) -> int:
        return sum(self.rows[i][i] for i in range(self.size))

    def det(self) -> int:
        c = charpoly(self)
        n = self.size
        return (-1) ** n * c[-1]

    def to_json(self) -> list:
        return [[str(x) for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, data) -> "IntMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        return cls.of([[int(x) for x in r] for r in data])


def charpoly(M: IntMatrix) -> list[int]:
    """Descending coefficients of det(xI - M), by Berkowitz (division-free)."""
    A = [list(r) for r in M.rows]
    n = len(A)
    # Berkowitz: build the Toeplitz vectors for trailing principal submatrices
    vect = [1, -A[0][0]]
    for r in range(1, n):
        R = A[r][:r]  # row r, columns < r
        C = [A[i][r] for i in range(r)]  # column r, rows < r
        S = [row[:r] for row in A[:r]]
        a = A[r][r]
        # entries of the Toeplitz column: 1, -a, -R C, -R S C, -R S^2 C, ...
        col = [1, -a]
        v = C
        for _ in range(r):
            col.append(-sum(x * y for x, y in zip(R, v)))
            v = [sum(S[i][j] * v[j] for j in range(r)) for i in range(r)]
        new = []
        for i in range(r + 2):
            new.append(sum(col[i - j] * vect[j] for j in range(len(vect)) if 0 <= i - j < len(col)))
        vect = new
    return vect


def companion(p: IntPolynomial) -> IntMatrix:
    """Companion matrix with ones below the diagonal and signed coefficients in the last column.

    Row k of the last column holds (-1)^(n-k) a_{n-k+1}, so the matrix has
    characteristic polynomial p and determinant a_n.
    """
    n = p.degree
    if p.a[-1] != 1:
        raise DeterminantError(f"companion of {p} has determinant {p.a[-1]}, not +1")
    rows = [[0] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = 1
    for k in range(1, n + 1):
        rows[k - 1][n - 1] = (-1) ** (n - k) * p.a[n - k]
    M = IntMatrix.of(rows)
    assert charpoly(M) == p.coeffs(), "companion layout mismatch"
    return M


@dataclass(frozen=True)
class JordanData:
    lam: tuple[mpmath.mpf, ...]
    signs: SignPattern | None
    loxodromic: bool
    charpoly: IntPolynomial
    cluster: RootCluster | None = None

    def to_json(self) -> dict:
        return {
            "charpoly": [str(c) for c in self.charpoly.coeffs()],
            "loxodromic": self.loxodromic,
            "lambda": [mpmath.nstr(x, 20) for x in self.lam],
            "signs": list(self.signs.signs) if self.signs else None,
        }


def _log_abs(cluster: RootCluster, prec: int) -> list[mpmath.mpf]:
    ctx = mpmath.MPContext()
    ctx.prec = prec
    return [ctx.log(abs(x)) for x in cluster.midpoints(prec)]


def jordan_data(M: IntMatrix, precision: int = 64, hints=None) -> JordanData:
    """lambda_i = log|x_i| over the eigenvalues, in decreasing order.

    Loxodromic means squarefree with all roots real and no two of equal
    modulus (no pair x, -x, checked via Res(p(x), p(-x)) != 0).
    """
    c = charpoly(M)
    p = IntPolynomial.from_coeffs(c)
    if intpoly.discriminant(c) == 0:
        return JordanData((), None, False, p)
    cluster = isolate_real_roots(p, hints, precision)
    if not cluster.certified or any(e.lo <= 0 <= e.hi for e in cluster.enclosures):
        return JordanData((), None, False, p, cluster)
    lox = intpoly.resultant(c, intpoly.neg_x(c)) != 0
    lam = tuple(_log_abs(cluster, precision))
    return JordanData(lam, cluster.sign_pattern(), lox, p, cluster)


@dataclass(frozen=True)
class CartanData:
    mu: tuple[mpmath.mpf, ...]

    def to_json(self) -> dict:
        return {"mu": [mpmath.nstr(x, 20) for x in self.mu]}


def cartan_projection(M: IntMatrix, precision: int = 64) -> CartanData:
    """mu_i = (1/2) log of the eigenvalues of M^t M, decreasing.

    Repeated singular values are handled through the squarefree decomposition
    of the characteristic polynomial of M^t M.
    """
    G = M.T @ M
    c = charpoly(G)
    if c[-1] == 0:
        raise ValueError("matrix is singular")
    ctx = mpmath.MPContext()
    ctx.prec = precision
    mu = []
    for f, mult in intpoly.squarefree_decomposition(c):
        q = IntPolynomial.from_coeffs(f)
        cluster = isolate_real_roots(q, precision=precision)
        if not cluster.certified:
            raise NotSquarefreeError("M^t M has non-real eigenvalues")
        for x in cluster.midpoints(precision):
            mu.extend([ctx.log(x) / 2] * mult)
    mu.sort(reverse=True)
    return CartanData(tuple(mu))


def symplectic_form(n: int) -> IntMatrix:
    """J_n = [[0, I'], [-I', 0]] with I' the n x n anti-diagonal identity."""
    rows = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        rows[i][2 * n - 1 - i] = 1
        rows[n + i][n - 1 - i] = -1
    return IntMatrix.of(rows)


@dataclass(frozen=True)
class SpCheck:
    symplectic: bool
    reciprocal_charpoly: bool


def sp_verify(M: IntMatrix) -> SpCheck:
    if M.size % 2:
        raise ValueError("symplectic check needs even dimension")
    J = symplectic_form(M.size // 2)
    c = charpoly(M)
    return SpCheck(M.T @ J @ M == J, c == c[::-1])


def parse_matrix(s: str) -> IntMatrix:
    return IntMatrix.from_json(json.loads(s))
