"""The splitting operator delta of a mixed Hodge structure.

delta is the unique real endomorphism, with all Hodge components in bidegrees
(a, b) with a < 0 and b < 0, conjugating the grading Y onto its complex
conjugate:

    conj(Y) = Ad(exp(-2i delta)) Y.

Two solvers are provided.  The primary one runs a fixed-point iteration on the
nilpotent group element w with Ad(exp(w)) Y = conj(Y), peeling the mismatch
depth by depth along the ad-Y eigenvalues (all <= -1 on the relevant
subalgebra, so each depth is solvable by division); nilpotency makes the
iteration terminate after at most the weight span.  The secondary solver finds
the group element by one linear solve and takes its exact nilpotent logarithm.
Both verify realness and the bidegree constraint post hoc.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import default_tol
from .errors import NoConvergence
from .linalg import expm_nilpotent, logm_unipotent, maxabs, nullspace_float
from .mhs import DeligneBigrading, MixedHodgeStructure


def gl_hodge_components(B: DeligneBigrading, M: np.ndarray) -> dict[tuple[int, int], np.ndarray]:
    """Decompose a square matrix by Hodge bidegree: the (a, b) part maps each
    I^{c,d} into I^{a+c, b+d}.  The components resolve M: their sum is M."""
    M = np.asarray(M, dtype=complex)
    n = B.ambient_dim
    if M.shape != (n, n):
        raise ValueError("matrix must be square of the ambient dimension")
    keys = B.keys
    out: dict[tuple[int, int], np.ndarray] = {}
    for (c, d) in keys:
        right = B.projector(c, d)
        for (p, q) in keys:
            a, b = p - c, q - d
            block = B.projector(p, q) @ M @ right
            if (a, b) in out:
                out[(a, b)] = out[(a, b)] + block
            else:
                out[(a, b)] = block
    return out


def component_support(components: dict[tuple[int, int], np.ndarray],
                      tol: float | None = None) -> list[tuple[int, int]]:
    """Keys of the components that are nonzero at the working tolerance."""
    tol = default_tol() if tol is None else tol
    scale = max([maxabs(m) for m in components.values()] + [1.0])
    return sorted(k for k, m in components.items() if maxabs(m) > tol * scale)


@dataclass
class Splitting:
    delta: np.ndarray                            # real in rational coordinates
    hodge_components: dict[tuple[int, int], np.ndarray]
    residual: float                              # max-abs defect of the defining relation

    def component(self, a: int, b: int) -> np.ndarray:
        n = self.delta.shape[0]
        return self.hodge_components.get((a, b), np.zeros((n, n), dtype=complex))


def _solve_group_element_fixed_point(B: DeligneBigrading, tol: float) -> np.ndarray:
    """w with Ad(exp(w)) Y = conj(Y), found depth by depth."""
    Y = B.Y
    Ybar = np.conj(Y)
    n = B.ambient_dim
    weights = B.weights
    span = max(weights) - min(weights)
    scale = max(maxabs(Y), 1.0)
    w = np.zeros((n, n), dtype=complex)
    for _ in range(span + 3):
        G = expm_nilpotent(w)
        R = Ybar - G @ Y @ np.linalg.inv(G)
        if maxabs(R) <= 1e-3 * tol * scale:
            return w
        for m in range(-1, -(span + 1), -1):
            w = w + B.ad_weight_component(R, m) / (-m)
    G = expm_nilpotent(w)
    if maxabs(Ybar - G @ Y @ np.linalg.inv(G)) > tol * scale:
        raise NoConvergence("splitting iteration did not reach its residual target")
    return w


def _solve_group_element_linear(B: DeligneBigrading, tol: float) -> np.ndarray:
    """g = 1 + x with g Y = conj(Y) g and x strictly lowering the weight
    filtration; then w = log g."""
    Y = B.Y
    Ybar = np.conj(Y)
    n = B.ambient_dim
    weights = B.weights
    span = max(weights) - min(weights)
    # strictly-lowering part of gl via ad-Y eigenprojections
    def lower(A):
        out = np.zeros_like(A)
        for m in range(-1, -(span + 1), -1):
            out = out + B.ad_weight_component(A, m)
        return out

    # unknown x constrained to the lowering subalgebra: parametrize by a basis
    basis = []
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = 1.0
            L = lower(E)
            if maxabs(L) > 1e-12:
                basis.append(L)
    if not basis:
        return np.zeros((n, n), dtype=complex)
    cols = np.array([(b @ Y - Ybar @ b).flatten() for b in basis]).T
    rhs = (Ybar - Y).flatten()
    coeff, *_ = np.linalg.lstsq(cols, rhs, rcond=None)
    x = sum(c * b for c, b in zip(coeff, basis))
    scale = max(maxabs(Y), 1.0)
    if maxabs(x @ Y - Ybar @ x - (Ybar - Y)) > tol * scale:
        raise NoConvergence("linear solve for the splitting group element failed")
    return logm_unipotent(np.eye(n) + x)


def deligne_delta(H: MixedHodgeStructure, tol: float | None = None,
                  solver: str = "fixed-point") -> Splitting:
    """Compute the splitting of a valid mixed Hodge structure.

    solver: "fixed-point" (default) or "group-log"; both must agree, which is
    exercised by the test suite on random structures.
    """
    tol = default_tol() if tol is None else tol
    B = H.bigrading(tol)
    if solver == "fixed-point":
        w = _solve_group_element_fixed_point(B, tol)
    elif solver == "group-log":
        w = _solve_group_element_linear(B, tol)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    delta = 0.5j * w
    comps = gl_hodge_components(B, delta)
    scale = max(maxabs(delta), 1.0)

    # post-hoc verification: realness, bidegree support, defining relation
    residual = 0.0
    residual = max(residual, maxabs(delta.imag) / scale)
    for (a, b), m in comps.items():
        if a >= 0 or b >= 0:
            residual = max(residual, maxabs(m) / scale)
    G = expm_nilpotent(-2j * delta)
    rel = np.conj(B.Y) - G @ B.Y @ np.linalg.inv(G)
    residual = max(residual, maxabs(rel) / max(maxabs(B.Y), 1.0))
    if residual > tol:
        raise NoConvergence(f"splitting residual {residual:.3e} exceeds tolerance {tol:.3e}")
    delta = delta.real.astype(float)
    return Splitting(delta=delta, hodge_components=comps, residual=residual)


def lowering_morphisms(H: MixedHodgeStructure, drop: int = 2,
                       tol: float | None = None) -> list[np.ndarray]:
    """Basis of real matrices N with N W_k <= W_{k-drop} and
    N F^p <= F^{p - drop/2}; for drop=2 these are the (-1,-1)-morphisms.

    Filtration compatibility of a real matrix forces pure Hodge type by
    functoriality of the bigrading, so no extra type constraint is needed.
    """
    tol = default_tol() if tol is None else tol
    n = H.dim
    if drop % 2:
        raise ValueError("drop must be even")
    fshift = drop // 2
    rows = []
    # a . (N v) = 0 for annihilator rows a of the target and basis vectors v of
    # the source; coefficient of N_ij in row-major vec(N) is a_i v_j.
    for k in H.weights:
        src = H.W.at(k)
        tgt_ann = H.W.at(k - drop).annihilator(tol)
        for avec in tgt_ann.basis:
            for v in src.basis:
                rows.append(np.kron(avec, v))
    for p in H.levels:
        src = H.F.at(p)
        tgt_ann = H.F.at(p - fshift).annihilator(tol)
        for avec in tgt_ann.basis:
            for v in src.basis:
                rows.append(np.kron(avec, v))
    if not rows:
        return [np.eye(n)[i].reshape(n, 1) * np.eye(n)[j] for i in range(n) for j in range(n)]
    M = np.array(rows)
    M = np.vstack([M.real, M.imag]).astype(complex)
    flat = nullspace_float(M, tol).real
    return [row.reshape(n, n) for row in flat]
