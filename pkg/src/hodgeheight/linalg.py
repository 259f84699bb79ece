"""Subspace arithmetic over exact rationals and complex floats.

Subspaces are stored as reduced row echelon bases (rows = generators), which
makes the representation canonical for a fixed tolerance: pivots are leading
ones ordered by column.  Purely rational inputs (weight filtrations, nilpotent
monodromy matrices) keep an exact Fraction representation alongside the float
one, so rank decisions on that data never involve a threshold.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .config import default_tol
from .errors import DimensionMismatch, NotNilpotent

Matrix = np.ndarray

# the ambient field: complex scalars in the fixed rational coordinate basis,
# conjugated entrywise; working precision is Config.precision_bits (53 here,
# higher precision is routed through the special-function backends)
Scalar = complex

# ---------------------------------------------------------------------------
# scalar helpers


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float) and float(x).is_integer():
        return Fraction(int(x))
    raise TypeError(f"not an exact rational: {x!r}")


def is_rational_entry(x) -> bool:
    if isinstance(x, (Fraction, int, np.integer, str)):
        return True
    if isinstance(x, float):
        return float(x).is_integer()
    if isinstance(x, (complex, np.complexfloating)):
        return x.imag == 0 and float(x.real).is_integer()
    return False


def rational_rows(rows) -> list[list[Fraction]] | None:
    """Return a Fraction matrix when every entry is exactly rational, else None."""
    out = []
    for row in rows:
        r = []
        for x in row:
            if not is_rational_entry(x):
                return None
            if isinstance(x, (complex, np.complexfloating)):
                x = x.real
            r.append(as_fraction(x))
        out.append(r)
    return out


# ---------------------------------------------------------------------------
# echelon forms


def rref_float(M: Matrix, tol: float | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form with pivot threshold tol * (max absolute entry)."""
    tol = default_tol() if tol is None else tol
    M = np.array(M, dtype=complex)
    if M.ndim != 2:
        M = M.reshape(-1, M.shape[-1]) if M.size else M.reshape(0, 0)
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return M.reshape(max(rows, 0), cols), []
    scale = max(float(np.abs(M).max()), 1.0)
    M = M.copy()
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        i = r + int(np.argmax(np.abs(M[r:, c])))
        if abs(M[i, c]) <= tol * scale:
            continue
        if i != r:
            M[[r, i]] = M[[i, r]]
        M[r] = M[r] / M[r, c]
        for k in range(rows):
            if k != r and M[k, c] != 0:
                M[k] = M[k] - M[k, c] * M[r]
        pivots.append(c)
        r += 1
    # entries are kept at full precision: genuinely tiny coordinates (for
    # instance exponentially suppressed periods near a boundary point) carry
    # information, and all comparisons downstream are tolerance based
    return M[:r], pivots


def rref_exact(M: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over exact rationals."""
    M = [list(row) for row in M]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        sel = None
        for i in range(r, rows):
            if M[i][c] != 0:
                sel = i
                break
        if sel is None:
            continue
        M[r], M[sel] = M[sel], M[r]
        inv = Fraction(1) / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for k in range(rows):
            if k != r and M[k][c] != 0:
                f = M[k][c]
                M[k] = [a - f * b for a, b in zip(M[k], M[r])]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def nullspace_float(M: Matrix, tol: float | None = None) -> Matrix:
    """Basis (rows) of the right null space {v : M v = 0}."""
    M = np.array(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] == 0:
        n = M.shape[-1] if M.ndim == 2 else 0
        return np.eye(n, dtype=complex)
    R, piv = rref_float(M, tol)
    n = M.shape[1]
    free = [c for c in range(n) if c not in piv]
    basis = np.zeros((len(free), n), dtype=complex)
    for row, f in enumerate(free):
        basis[row, f] = 1.0
        for i, p in enumerate(piv):
            basis[row, p] = -R[i, f]
    return basis


def nullspace_exact(M: Sequence[Sequence[Fraction]], n: int) -> list[list[Fraction]]:
    if not M:
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, piv = rref_exact(M)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# subspaces


class Subspace:
    """An immutable linear subspace of C^n given by a canonical echelon basis.

    When the generators are exactly rational the subspace also carries an
    exact echelon basis and all operations between exact subspaces stay exact.
    """

    __slots__ = ("basis", "ambient_dim", "exact", "_pivots")

    def __init__(self, basis: Matrix, ambient_dim: int,
                 exact: list[list[Fraction]] | None = None,
                 pivots: list[int] | None = None):
        self.basis = basis
        self.ambient_dim = int(ambient_dim)
        self.exact = exact
        self._pivots = pivots

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_rows(rows, ambient_dim: int | None = None, tol: float | None = None) -> "Subspace":
        rows = [list(r) for r in rows]
        if ambient_dim is None:
            if not rows:
                raise DimensionMismatch("empty generator list needs an explicit ambient dimension")
            ambient_dim = len(rows[0])
        exact_rows = rational_rows(rows)
        if exact_rows is not None:
            R, piv = rref_exact(exact_rows) if exact_rows else ([], [])
            basis = np.array([[complex(x) for x in row] for row in R],
                             dtype=complex).reshape(len(R), ambient_dim)
            return Subspace(basis, ambient_dim, exact=R, pivots=piv)
        M = np.array(rows, dtype=complex).reshape(len(rows), ambient_dim)
        R, piv = rref_float(M, tol)
        return Subspace(R, ambient_dim, pivots=piv)

    @staticmethod
    def zero(ambient_dim: int) -> "Subspace":
        return Subspace(np.zeros((0, ambient_dim), dtype=complex), ambient_dim, exact=[], pivots=[])

    @staticmethod
    def full(ambient_dim: int) -> "Subspace":
        eye = [[Fraction(int(i == j)) for j in range(ambient_dim)] for i in range(ambient_dim)]
        return Subspace(np.eye(ambient_dim, dtype=complex), ambient_dim,
                        exact=eye, pivots=list(range(ambient_dim)))

    # -- basic queries -------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def pivots(self) -> list[int]:
        if self._pivots is None:
            _, self._pivots = rref_float(self.basis)
        return self._pivots

    def is_exact(self) -> bool:
        return self.exact is not None

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, exact={self.is_exact()})"

    def __eq__(self, other) -> bool:
        return self.equals(other)

    def __hash__(self):
        return hash((self.ambient_dim, self.dim))

    def equals(self, other: "Subspace", tol: float | None = None) -> bool:
        if self.ambient_dim != other.ambient_dim or self.dim != other.dim:
            return False
        if self.is_exact() and other.is_exact():
            return self.exact == other.exact
        tol = default_tol() if tol is None else tol
        if self.dim == 0:
            return True
        scale = max(float(np.abs(self.basis).max()), float(np.abs(other.basis).max()), 1.0)
        return bool(np.abs(self.basis - other.basis).max() <= 10 * tol * scale)

    def contains(self, other: "Subspace", tol: float | None = None) -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("ambient dimensions differ")
        if other.dim == 0:
            return True
        return self.add(other, tol).dim == self.dim

    def contains_vector(self, v, tol: float | None = None) -> bool:
        return self.contains(Subspace.from_rows([list(v)], self.ambient_dim, tol), tol)

    # -- operations ----------------------------------------------------------

    def _check_ambient(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch(
                f"ambient dimensions differ: {self.ambient_dim} vs {other.ambient_dim}")

    def add(self, other: "Subspace", tol: float | None = None) -> "Subspace":
        """Span of the union of the two bases."""
        self._check_ambient(other)
        if self.is_exact() and other.is_exact():
            return Subspace.from_rows(list(self.exact) + list(other.exact), self.ambient_dim)
        rows = np.vstack([self.basis, other.basis])
        R, piv = rref_float(rows, tol)
        return Subspace(R, self.ambient_dim, pivots=piv)

    def intersect(self, other: "Subspace", tol: float | None = None) -> "Subspace":
        """Largest subspace contained in both operands."""
        self._check_ambient(other)
        n = self.ambient_dim
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(n)
        if self.dim == n:
            return other
        if other.dim == n:
            return self
        if self.is_exact() and other.is_exact():
            A = self.exact
            B = other.exact
            cols = [[A[i][j] for i in range(len(A))] + [-B[i][j] for i in range(len(B))]
                    for j in range(n)]
            ker = nullspace_exact(cols, len(A) + len(B))
            vecs = []
            for coeffs in ker:
                vecs.append([sum(coeffs[i] * A[i][j] for i in range(len(A)))
                             for j in range(n)])
            return Subspace.from_rows(vecs, n) if vecs else Subspace.zero(n)
        S = np.vstack([self.basis, -other.basis])
        ker = nullspace_float(S.T, tol)
        if ker.shape[0] == 0:
            return Subspace.zero(n)
        vecs = ker[:, : self.dim] @ self.basis
        return Subspace.from_rows(vecs, n, tol)

    def conj(self) -> "Subspace":
        """Entrywise complex conjugation (Betti conjugation in rational coordinates)."""
        if self.is_exact():
            return self
        return Subspace.from_rows(np.conj(self.basis), self.ambient_dim)

    def annihilator(self, tol: float | None = None) -> "Subspace":
        """Row vectors phi with phi . v = 0 for every v in the subspace."""
        n = self.ambient_dim
        if self.dim == 0:
            return Subspace.full(n)
        if self.is_exact():
            return Subspace.from_rows(nullspace_exact(self.exact, n), n)
        return Subspace.from_rows(nullspace_float(self.basis, tol), n, tol)

    def image_under(self, A, tol: float | None = None) -> "Subspace":
        """Span of A v over basis vectors v; A may map into a different space."""
        n = self.ambient_dim
        out_dim = len(A) if not isinstance(A, np.ndarray) else A.shape[0]
        if self.dim == 0:
            return Subspace.zero(out_dim)
        exact_A = _exact_matrix(A)
        if self.is_exact() and exact_A is not None:
            rows = []
            for v in self.exact:
                rows.append([sum(exact_A[i][j] * v[j] for j in range(n))
                             for i in range(out_dim)])
            return Subspace.from_rows(rows, out_dim)
        A = np.array(A, dtype=complex)
        return Subspace.from_rows(self.basis @ A.T, out_dim, tol)

    def preimage_under(self, A, tol: float | None = None) -> "Subspace":
        """{v : A v in S}."""
        n = self.ambient_dim
        ann = self.annihilator(tol)
        if ann.dim == 0:
            return Subspace.full(n)
        exact_A = _exact_matrix(A)
        if ann.is_exact() and exact_A is not None:
            rows = []
            for phi in ann.exact:
                rows.append([sum(phi[i] * exact_A[i][j] for i in range(n)) for j in range(n)])
            return Subspace.from_rows(nullspace_exact(rows, n), n)
        M = ann.basis @ np.array(A, dtype=complex)
        return Subspace.from_rows(nullspace_float(M, tol), n, tol)

    def complement_in(self, bigger: "Subspace", tol: float | None = None) -> "Subspace":
        """A complement of self inside bigger, taken from echelon pivot rows."""
        self._check_ambient(bigger)
        if self.is_exact() and bigger.is_exact():
            sub_piv = set(self.pivots)
            rows = [r for r, p in zip(bigger.exact, bigger.pivots) if p not in sub_piv]
            return Subspace.from_rows(rows, self.ambient_dim)
        sub_piv = set(self.pivots)
        rows = [bigger.basis[i] for i, p in enumerate(bigger.pivots) if p not in sub_piv]
        if not rows:
            return Subspace.zero(self.ambient_dim)
        return Subspace.from_rows(rows, self.ambient_dim, tol)


def _exact_matrix(A) -> list[list[Fraction]] | None:
    if isinstance(A, np.ndarray):
        if A.dtype != object and np.iscomplexobj(A) and np.any(A.imag):
            return None
        A = A.tolist()
    return rational_rows(A)


def echelonize(vectors, ambient_dim: int | None = None, tol: float | None = None) -> Subspace:
    """Row-reduce a generator matrix into a canonical Subspace (rank 0 allowed)."""
    return Subspace.from_rows(vectors, ambient_dim, tol)


def intersect(a: Subspace, b: Subspace, tol: float | None = None) -> Subspace:
    return a.intersect(b, tol)


def subspace_sum(a: Subspace, b: Subspace, tol: float | None = None) -> Subspace:
    return a.add(b, tol)


# ---------------------------------------------------------------------------
# matrix helpers (nilpotent exponentials, adjoint actions, linear solves)


def maxabs(A) -> float:
    A = np.asarray(A)
    return float(np.abs(A).max()) if A.size else 0.0


def check_nilpotent(N: Matrix, tol: float | None = None) -> int:
    """Return the nilpotency index, raising NotNilpotent otherwise."""
    tol = default_tol() if tol is None else tol
    N = np.array(N, dtype=complex)
    n = N.shape[0]
    scale = max(maxabs(N), 1.0)
    P = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        P = P @ N
        if maxabs(P) <= tol * scale ** k:
            return k
    raise NotNilpotent("matrix is not nilpotent at the working tolerance")


def expm_nilpotent(A: Matrix) -> Matrix:
    """exp(A) as the finite polynomial series; A must be nilpotent."""
    A = np.array(A, dtype=complex)
    n = A.shape[0]
    E = np.eye(n, dtype=complex)
    T = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        T = T @ A / k
        if not np.any(T):
            break
        E = E + T
    return E


def logm_unipotent(G: Matrix) -> Matrix:
    """log(G) for unipotent G as the finite Mercator series."""
    G = np.array(G, dtype=complex)
    n = G.shape[0]
    X = G - np.eye(n)
    out = np.zeros_like(X)
    T = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        T = T @ X
        if not np.any(T):
            break
        out = out + ((-1) ** (k + 1)) * T / k
    return out


def vec(X: Matrix) -> np.ndarray:
    return np.asarray(X, dtype=complex).flatten(order="F")


def unvec(x: np.ndarray, n: int) -> Matrix:
    return np.asarray(x, dtype=complex).reshape((n, n), order="F")


def lin_ad(A: Matrix) -> Matrix:
    """Matrix of X -> A X - X A on column-major vectorized X."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    eye = np.eye(n)
    return np.kron(eye, A) - np.kron(A.T, eye)


def solve_linear(L: Matrix, rhs: np.ndarray, tol: float | None = None) -> tuple[np.ndarray, float]:
    """Least-squares solve returning (solution, residual max-abs)."""
    x, *_ = np.linalg.lstsq(np.asarray(L, dtype=complex), np.asarray(rhs, dtype=complex), rcond=None)
    res = maxabs(L @ x - rhs)
    return x, res
