"""Mixed Hodge structures and their Deligne bigrading.

A mixed Hodge structure is a pair of filtrations on a fixed coordinate space:
an increasing rational weight filtration W and a decreasing Hodge filtration F
on the complexification.  The rational structure is the coordinate basis, so
Betti conjugation is entrywise conjugation.

The canonical bigrading splits the complexified space as a direct sum of
pieces I^{p,q} with

    I^{p,q} = F^p  cap  W_{p+q}  cap  ( conj(F^q) cap W_{p+q} + conj(U^{q-1}_{p+q-2}) ),
    U^r_s   = sum_j F^{r-j} cap W_{s-j},

from which F and W are recovered by summing components.  Validity of the pair
(F, W) as a mixed Hodge structure is exactly the statement that this
decomposition works.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .config import default_tol
from .errors import MalformedFiltration, NotAnMHS
from .linalg import Subspace, echelonize, maxabs

# ---------------------------------------------------------------------------
# filtrations


class Filtration:
    """A filtration stored at its jump indices only.

    Queries between jumps resolve to the nearest stored subspace: for an
    increasing filtration, W_k is the largest stored index <= k (zero space
    below the bottom jump); for a decreasing one, F^p is the smallest stored
    index >= p (zero space above the top jump).
    """

    def __init__(self, steps: Iterable[tuple[int, Subspace]], increasing: bool,
                 ambient_dim: int):
        steps = sorted(((int(k), s) for k, s in steps), key=lambda t: t[0])
        self.increasing = bool(increasing)
        self.ambient_dim = int(ambient_dim)
        self.steps = tuple(steps)
        self._validate()

    def _validate(self) -> None:
        if not self.steps:
            raise MalformedFiltration("a filtration needs at least one step")
        dims = [s.dim for _, s in self.steps]
        spaces = [s for _, s in self.steps]
        for s in spaces:
            if s.ambient_dim != self.ambient_dim:
                raise MalformedFiltration("step has wrong ambient dimension")
        if self.increasing:
            for a, b in zip(spaces, spaces[1:]):
                if not b.contains(a) or b.dim <= a.dim:
                    raise MalformedFiltration("weight filtration steps must strictly increase")
            if spaces[-1].dim != self.ambient_dim:
                raise MalformedFiltration("weight filtration must top out at the full space")
            if spaces[0].dim == 0:
                raise MalformedFiltration("bottom jump of W must be nonzero")
        else:
            for a, b in zip(spaces, spaces[1:]):
                if not a.contains(b) or a.dim <= b.dim:
                    raise MalformedFiltration("Hodge filtration steps must strictly decrease")
            if spaces[0].dim != self.ambient_dim:
                raise MalformedFiltration("Hodge filtration must start at the full space")
            if spaces[-1].dim == 0:
                raise MalformedFiltration("top jump of F must be nonzero")

    @property
    def indices(self) -> list[int]:
        return [k for k, _ in self.steps]

    def at(self, k: int) -> Subspace:
        if self.increasing:
            best = None
            for idx, s in self.steps:
                if idx <= k:
                    best = s
            return best if best is not None else Subspace.zero(self.ambient_dim)
        best = None
        for idx, s in reversed(self.steps):
            if idx >= k:
                best = s
        return best if best is not None else Subspace.zero(self.ambient_dim)

    def shift(self, by: int) -> "Filtration":
        return Filtration([(k + by, s) for k, s in self.steps], self.increasing,
                          self.ambient_dim)

    def map_spaces(self, fn) -> "Filtration":
        return Filtration([(k, fn(s)) for k, s in self.steps], self.increasing,
                          self.ambient_dim)

    def __repr__(self) -> str:
        kind = "W" if self.increasing else "F"
        body = ", ".join(f"{k}:{s.dim}" for k, s in self.steps)
        return f"Filtration[{kind}]({body})"


def weight_filtration(steps: Iterable[tuple[int, Subspace]], dim: int) -> Filtration:
    return Filtration(steps, increasing=True, ambient_dim=dim)


def hodge_filtration(steps: Iterable[tuple[int, Subspace]], dim: int) -> Filtration:
    return Filtration(steps, increasing=False, ambient_dim=dim)


# ---------------------------------------------------------------------------
# the bigrading


@dataclass
class DeligneBigrading:
    """The decomposition V_C = (+) I^{p,q} with its projectors and grading."""

    components: dict[tuple[int, int], Subspace]
    basis: np.ndarray                     # columns: component bases in key order
    ambient_dim: int
    _proj: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)

    @property
    def keys(self) -> list[tuple[int, int]]:
        return sorted(self.components)

    @property
    def weights(self) -> list[int]:
        return sorted({p + q for p, q in self.components})

    def projector(self, p: int, q: int) -> np.ndarray:
        key = (p, q)
        if key not in self._proj:
            self._build_projectors()
        return self._proj[key]

    def weight_projector(self, k: int) -> np.ndarray:
        n = self.ambient_dim
        out = np.zeros((n, n), dtype=complex)
        for (p, q) in self.components:
            if p + q == k:
                out = out + self.projector(p, q)
        return out

    def _build_projectors(self) -> None:
        n = self.ambient_dim
        Cinv = np.linalg.inv(self.basis)
        idx = 0
        for key in self.keys:
            d = self.components[key].dim
            E = np.zeros((n, n), dtype=complex)
            for j in range(idx, idx + d):
                E[j, j] = 1.0
            self._proj[key] = self.basis @ E @ Cinv
            idx += d

    @property
    def Y(self) -> np.ndarray:
        n = self.ambient_dim
        out = np.zeros((n, n), dtype=complex)
        for (p, q) in self.components:
            out = out + (p + q) * self.projector(p, q)
        return out

    def ad_weight_component(self, A: np.ndarray, m: int) -> np.ndarray:
        """Component of A on which ad Y acts as multiplication by m."""
        n = self.ambient_dim
        out = np.zeros((n, n), dtype=complex)
        for k in self.weights:
            if k + m in self.weights:
                out = out + self.weight_projector(k + m) @ A @ self.weight_projector(k)
        return out

    def lift(self, vector, p: int, q: int, modulo: Subspace,
             tol: float | None = None) -> np.ndarray:
        """The element of I^{p,q} congruent to `vector` modulo `modulo`."""
        tol = default_tol() if tol is None else tol
        piece = self.components[(p, q)]
        A = np.vstack([piece.basis, modulo.basis]).T if modulo.dim else piece.basis.T
        x, *_ = np.linalg.lstsq(A, np.asarray(vector, dtype=complex), rcond=None)
        e = x[: piece.dim] @ piece.basis
        resid = maxabs(A @ x - np.asarray(vector, dtype=complex))
        scale = max(maxabs(vector), 1.0)
        if resid > 100 * tol * scale:
            raise NotAnMHS("vector has no lift into the requested component")
        return e


@dataclass
class ValidationReport:
    ok: bool
    failures: list[str]


class MixedHodgeStructure:
    """A pair (F, W) of filtrations on a fixed rational coordinate space."""

    def __init__(self, W: Filtration, F: Filtration):
        if W.ambient_dim != F.ambient_dim:
            raise MalformedFiltration("W and F live on different spaces")
        if not W.increasing or F.increasing:
            raise MalformedFiltration("W must be increasing and F decreasing")
        self.W = W
        self.F = F
        self.dim = W.ambient_dim
        self._bigrading: DeligneBigrading | None = None

    # -- ranges ---------------------------------------------------------------

    @property
    def weights(self) -> list[int]:
        return self.W.indices

    @property
    def levels(self) -> list[int]:
        return self.F.indices

    def __repr__(self) -> str:
        return f"MixedHodgeStructure(dim={self.dim}, W={self.weights}, F={self.levels})"

    # -- bigrading -------------------------------------------------------------

    def _component_candidates(self, tol: float | None) -> dict[tuple[int, int], Subspace]:
        n = self.dim
        pmin, pmax = min(self.levels), max(self.levels)
        wmin, wmax = min(self.weights), max(self.weights)

        def U(r: int, s: int) -> Subspace:
            total = Subspace.zero(n)
            j = 0
            while s - j >= wmin:
                total = total.add(self.F.at(r - j).intersect(self.W.at(s - j), tol), tol)
                j += 1
            return total

        comps: dict[tuple[int, int], Subspace] = {}
        for a in range(pmin, pmax + 1):
            for b in range(pmin, pmax + 1):
                k = a + b
                if k < wmin or k > wmax:
                    continue
                Ubar = U(b - 1, k - 2).conj()
                rhs = self.F.at(b).conj().intersect(self.W.at(k), tol).add(Ubar, tol)
                piece = self.F.at(a).intersect(self.W.at(k), tol).intersect(rhs, tol)
                if piece.dim > 0:
                    comps[(a, b)] = piece
        return comps

    def validate(self, tol: float | None = None) -> ValidationReport:
        """Check the three bigrading axioms; ok iff all hold."""
        tol = default_tol() if tol is None else tol
        failures: list[str] = []
        comps = self._component_candidates(tol)
        n = self.dim
        total = sum(s.dim for s in comps.values())
        if total != n:
            failures.append(f"direct-sum: component dimensions add to {total}, expected {n}")
        else:
            stacked = np.vstack([comps[k].basis for k in sorted(comps)])
            if echelonize(stacked, n, tol).dim != n:
                failures.append("direct-sum: components are not independent")
        if not failures:
            for p in range(min(self.levels), max(self.levels) + 1):
                span = Subspace.zero(n)
                for (a, b), s in comps.items():
                    if a >= p:
                        span = span.add(s, tol)
                if not span.equals(self.F.at(p), tol) :
                    failures.append(f"F-axiom: F^{p} is not the span of components with p >= {p}")
            for k in self.weights:
                span = Subspace.zero(n)
                for (a, b), s in comps.items():
                    if a + b <= k:
                        span = span.add(s, tol)
                if not span.equals(self.W.at(k), tol):
                    failures.append(f"W-axiom: W_{k} is not the span of components with p+q <= {k}")
            for (a, b), s in comps.items():
                target = comps.get((b, a), Subspace.zero(n))
                for (x, y), t in comps.items():
                    if x < b and y < a:
                        target = target.add(t, tol)
                if not target.contains(s.conj(), tol):
                    failures.append(f"conjugation-axiom: conj I^{(a, b)} escapes "
                                    f"I^{(b, a)} + lower terms")
        return ValidationReport(ok=not failures, failures=failures)

    def bigrading(self, tol: float | None = None) -> DeligneBigrading:
        if self._bigrading is not None:
            return self._bigrading
        report = self.validate(tol)
        if not report.ok:
            raise NotAnMHS("; ".join(report.failures))
        comps = self._component_candidates(tol)
        basis = np.vstack([comps[k].basis for k in sorted(comps)]).T
        self._bigrading = DeligneBigrading(comps, basis, self.dim)
        return self._bigrading


def deligne_bigrading(H: MixedHodgeStructure, tol: float | None = None) -> DeligneBigrading:
    return H.bigrading(tol)


def validate(H: MixedHodgeStructure, tol: float | None = None) -> ValidationReport:
    return H.validate(tol)


# ---------------------------------------------------------------------------
# functorial constructions


def rational_mhs(a: int = 0) -> MixedHodgeStructure:
    """The rank-one structure of weight -2a with Hodge level -a."""
    one = Subspace.full(1)
    W = weight_filtration([(-2 * a, one)], 1)
    F = hodge_filtration([(-a, one)], 1)
    return MixedHodgeStructure(W, F)


def tate_twist(H: MixedHodgeStructure, a: int) -> MixedHodgeStructure:
    """Shift weights by -2a and Hodge levels by -a (components move by (-a, -a))."""
    return MixedHodgeStructure(H.W.shift(-2 * a), H.F.shift(-a))


def conjugate(H: MixedHodgeStructure) -> MixedHodgeStructure:
    """Entrywise conjugation of F in the rational coordinates (W is real)."""
    return MixedHodgeStructure(H.W, H.F.map_spaces(lambda s: s.conj()))


def dual(H: MixedHodgeStructure, tol: float | None = None) -> MixedHodgeStructure:
    """The dual structure on the dual coordinate space.

    W_k(V*) annihilates W_{-k-1}(V) and F^p(V*) annihilates F^{1-p}(V); the
    dual bigrading is the annihilator pattern with weights negated.
    """
    n = H.dim
    wsteps = []
    for k in [-k for k in H.weights]:
        space = H.W.at(-k - 1).annihilator(tol)
        wsteps.append((k, space))
    fsteps = []
    for p in [-p for p in H.levels]:
        space = H.F.at(1 - p).annihilator(tol)
        fsteps.append((p, space))
    return MixedHodgeStructure(weight_filtration(wsteps, n), hodge_filtration(fsteps, n))


def is_morphism(T: np.ndarray, A: MixedHodgeStructure, B: MixedHodgeStructure,
                tol: float | None = None) -> bool:
    """True when the real matrix T respects both filtrations (type (0,0))."""
    tol = default_tol() if tol is None else tol
    T = np.asarray(T, dtype=complex)
    if maxabs(T.imag) > tol * max(1.0, maxabs(T)):
        return False
    for k in sorted(set(A.weights) | set(B.weights)):
        if not B.W.at(k).contains(A.W.at(k).image_under(T, tol), tol):
            return False
    for p in sorted(set(A.levels) | set(B.levels)):
        if not B.F.at(p).contains(A.F.at(p).image_under(T, tol), tol):
            return False
    return True


def is_hodge_tate(H: MixedHodgeStructure, tol: float | None = None) -> bool:
    return all(p == q for (p, q) in H.bigrading(tol).components)
