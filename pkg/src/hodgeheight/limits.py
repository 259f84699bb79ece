"""Nilpotent orbits, relative weight filtrations and limit heights.

monodromy_weight_filtration is the classical unique filtration W(N) with
N W_k <= W_{k-2} and N^j inducing isomorphisms between the graded pieces at
center+j and center-j; it is computed by the closed formula

    W(N)_k = sum_j N^j ( ker N^(k+2j+1) )

and verified against both axioms afterwards.  Purely rational input stays in
exact arithmetic throughout, so no rank decision involves a threshold.

relative_weight_filtration(N, W) peels the top weight of W: with W' the next
step down and M' computed recursively on it,

    M_(k+j)  = preimage of M'_(k-j-2) under N^(j+1)      (j >= 0)
    M_(k-j)  = N^j( M_(k+j) ) + M'_(k-j)                 (j >= 1)

where k is the top weight.  The two characterizing axioms are re-verified on
the result; failure raises DoesNotExist (admissibility failure).

deligne_system_grading builds the unique grading Y' of W commuting with a
given grading Y of M such that the zero eigencomponent N0 of N completes to
an sl2-triple (N0, Y - Y', N0+) commuting with the deeper components of N.
Starting from any grading of W that commutes with Y (built from Y-invariant
echelon complements), the defect [N - N0, N0+] is killed depth by depth with
corrections exp(gamma), gamma of the appropriate bidegree; each step is a
linear solve and nilpotency bounds the number of steps.  All bracket
identities are verified post hoc.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import default_tol
from .errors import (
    ConstructionFailed,
    DoesNotExist,
    MalformedFiltration,
    NotAnMHS,
    NotNilpotent,
)
from .linalg import (
    Subspace,
    check_nilpotent,
    expm_nilpotent,
    lin_ad,
    maxabs,
    rational_rows,
    solve_linear,
    unvec,
    vec,
)
from .mhs import Filtration, MixedHodgeStructure, weight_filtration
from .splitting import deligne_delta

# ---------------------------------------------------------------------------
# monodromy weight filtration


def _as_subspace_matrix(N) -> tuple[np.ndarray, list[list[Fraction]] | None]:
    """Float matrix plus an exact Fraction copy when the input is rational."""
    arr = np.asarray(N)
    exact = rational_rows(arr.tolist())
    if exact is None:
        return np.asarray(N, dtype=complex), None
    return np.array([[complex(x) for x in row] for row in exact]), exact


def monodromy_weight_filtration(N, center: int = 0,
                                tol: float | None = None) -> Filtration:
    """The unique filtration with N W_k <= W_{k-2} and N^j : Gr_{c+j} ~ Gr_{c-j}."""
    tol = default_tol() if tol is None else tol
    Nf, exact = _as_subspace_matrix(N)
    n = Nf.shape[0]
    m = check_nilpotent(Nf, tol)
    Nop = exact if exact is not None else Nf

    def kernel_power(j: int) -> Subspace:
        if j <= 0:
            return Subspace.zero(n)
        if j >= m:
            return Subspace.full(n)
        if exact is not None:
            from .linalg import nullspace_exact
            return Subspace.from_rows(nullspace_exact(_exact_power(exact, j), n), n)
        from .linalg import nullspace_float
        return Subspace.from_rows(nullspace_float(np.linalg.matrix_power(Nf, j), tol), n, tol)

    def image_power(space: Subspace, j: int) -> Subspace:
        out = space
        for _ in range(j):
            out = out.image_under(Nop, tol)
        return out

    steps: list[tuple[int, Subspace]] = []
    prev_dim = -1
    for k in range(-m, m + 1):
        total = Subspace.zero(n)
        for j in range(0, m + 1):
            total = total.add(image_power(kernel_power(k + 2 * j + 1), j), tol)
        if total.dim > prev_dim and total.dim > 0:
            steps.append((k + center, total))
            prev_dim = total.dim
    filt = weight_filtration(steps, n)
    _verify_centered(filt, Nop, Nf, center, m, n, tol)
    return filt


def _exact_power(M: list[list[Fraction]], j: int) -> list[list[Fraction]]:
    n = len(M)
    P = [[Fraction(int(i == k)) for k in range(n)] for i in range(n)]
    for _ in range(j):
        P = [[sum(P[i][t] * M[t][k] for t in range(n)) for k in range(n)] for i in range(n)]
    return P


def _verify_centered(filt: Filtration, Nmat, Nf: np.ndarray, center: int,
                     m: int, n: int, tol: float) -> None:
    for k in filt.indices:
        moved = filt.at(k).image_under(Nmat, tol)
        if not filt.at(k - 2).contains(moved, tol):
            raise NotNilpotent("monodromy filtration axiom N W_k <= W_{k-2} failed")
    for j in range(1, m + 1):
        hi = _gr_dim(filt, center + j)
        lo = _gr_dim(filt, center - j)
        if hi != lo:
            raise NotNilpotent("graded pieces are not symmetric around the center")
        if hi:
            # N^j must drop Gr_{c+j} isomorphically onto Gr_{c-j}
            img = filt.at(center + j).image_under(_power(Nmat, Nf, j), tol)
            covered = img.add(filt.at(center - j - 1), tol)
            if covered.dim - filt.at(center - j - 1).dim != hi:
                raise NotNilpotent("N^j does not induce an isomorphism on graded pieces")


def _power(Nmat, Nf, j):
    if isinstance(Nmat, list):
        return _exact_power(Nmat, j)
    return np.linalg.matrix_power(Nf, j)


def _gr_dim(filt: Filtration, k: int) -> int:
    return filt.at(k).dim - filt.at(k - 1).dim


# ---------------------------------------------------------------------------
# relative weight filtration


def relative_weight_filtration(N, W: Filtration, tol: float | None = None) -> Filtration:
    tol = default_tol() if tol is None else tol
    Nf, exact = _as_subspace_matrix(N)
    n = W.ambient_dim
    check_nilpotent(Nf, tol)
    Nmat = exact if exact is not None else Nf
    for k in W.indices:
        if not W.at(k).contains(W.at(k).image_under(Nmat, tol), tol):
            raise DoesNotExist("N does not preserve the weight filtration")

    M_steps = _relative_rec(Nmat, Nf, W, W.indices, n, tol)
    try:
        filt = _steps_to_filtration(M_steps, n)
    except MalformedFiltration as exc:
        # the downward/upward passes only interlock when the filtration exists
        raise DoesNotExist(f"candidate family is not a filtration: {exc}") from exc
    _verify_relative(filt, Nmat, Nf, W, n, tol)
    return filt


def _relative_rec(Nmat, Nf, W: Filtration, weights: list[int], n: int,
                  tol: float) -> dict[int, Subspace]:
    """Return M as a map k -> M_k (not yet reduced to jumps).

    Implements the top-weight peeling recursion; the base case is a single
    weight, where M is the monodromy filtration of N restricted to that piece
    shifted to be centered there.
    """
    k_top = weights[-1]
    top_space = W.at(k_top)
    if len(weights) == 1:
        return _centered_on_subspace(Nmat, Nf, top_space, k_top, n, tol)
    sub = W.at(weights[-2])
    Msub = _relative_rec(Nmat, Nf, W, weights[:-1], n, tol)

    lo = min(Msub) - 2 * n - 2
    hi = k_top + n + 1

    def msub_at(j: int) -> Subspace:
        best = Subspace.zero(n)
        for idx in sorted(Msub):
            if idx <= j:
                best = Msub[idx]
        return best

    M: dict[int, Subspace] = {}
    for j in range(0, hi - k_top + 1):
        target = msub_at(k_top - j - 2)
        pre = target.preimage_under(_power(Nmat, Nf, j + 1), tol)
        # the recursion lives on the subobject W_{k_top}, not the ambient space
        M[k_top + j] = pre.intersect(top_space, tol)
    for j in range(1, k_top - lo + 1):
        pushed = M[k_top + j].image_under(_power(Nmat, Nf, j), tol) if k_top + j in M \
            else Subspace.zero(n)
        M[k_top - j] = pushed.add(msub_at(k_top - j), tol)
    return M


def _centered_on_subspace(Nmat, Nf, space: Subspace, center: int, n: int,
                          tol: float) -> dict[int, Subspace]:
    """Monodromy filtration of N restricted to an N-stable subspace, expressed
    in ambient coordinates and centered at `center`."""
    if space.dim == n:
        filt = monodromy_weight_filtration(Nmat if isinstance(Nmat, list) else Nf,
                                           center, tol)
        return {k: filt.at(k) for k in filt.indices}
    # restrict: coordinates on the subspace via its echelon basis
    B = space.basis
    d = space.dim
    # N restricted: N b_i = sum_j c_ij b_j  ->  solve against the basis
    Bt = B.T
    coeffs = np.linalg.lstsq(Bt, (np.asarray(Nf) @ Bt), rcond=None)[0].T
    resid = maxabs(Bt @ coeffs.T - np.asarray(Nf) @ Bt)
    if resid > 1e3 * tol * max(1.0, maxabs(Nf)):
        raise DoesNotExist("subspace is not stable under N")
    small = monodromy_weight_filtration(coeffs, center, tol)
    return {k: Subspace.from_rows(small.at(k).basis @ B, n, tol) for k in small.indices}


def _steps_to_filtration(M: dict[int, Subspace], n: int) -> Filtration:
    steps = []
    prev = -1
    for k in sorted(M):
        if M[k].dim > prev and M[k].dim > 0:
            steps.append((k, M[k]))
            prev = M[k].dim
    return weight_filtration(steps, n)


def _verify_relative(M: Filtration, Nmat, Nf, W: Filtration, n: int, tol: float) -> None:
    for k in M.indices:
        if not M.at(k - 2).contains(M.at(k).image_under(Nmat, tol), tol):
            raise DoesNotExist("candidate filtration is not lowered by two under N")
    # induced filtration on each graded piece must be the shifted monodromy
    # filtration of the induced nilpotent
    for k in W.indices:
        Wk, Wk1 = W.at(k), W.at(k - 1)
        gr_dim = Wk.dim - Wk1.dim
        if gr_dim == 0:
            continue
        induced = _induced_on_graded(Nf, Wk, Wk1, tol)
        ref = monodromy_weight_filtration(induced, k, tol) if gr_dim else None
        for j in range(k - 2 * n, k + 2 * n + 1):
            want = ref.at(j).dim
            got_space = M.at(j).intersect(Wk, tol).add(Wk1, tol)
            got = got_space.dim - Wk1.dim
            if got != want:
                raise DoesNotExist(
                    f"induced filtration on Gr_{k} differs from the monodromy filtration")


def _induced_on_graded(Nf: np.ndarray, Wk: Subspace, Wk1: Subspace, tol: float) -> np.ndarray:
    """Matrix of N on W_k / W_{k-1} in the basis of pivot rows of W_k missing
    from W_{k-1}."""
    lift = Wk.basis[[i for i, p in enumerate(Wk.pivots) if p not in set(Wk1.pivots)]]
    d = lift.shape[0]
    cols = np.vstack([lift, Wk1.basis]).T if Wk1.dim else lift.T
    out = np.zeros((d, d), dtype=complex)
    for i in range(d):
        rhs = np.asarray(Nf, dtype=complex) @ lift[i]
        x, *_ = np.linalg.lstsq(cols, rhs, rcond=None)
        out[:, i] = x[:d]
    return out


# ---------------------------------------------------------------------------
# Deligne systems


@dataclass
class DeligneSystem:
    W: Filtration
    N: np.ndarray
    Y: np.ndarray
    Yprime: np.ndarray
    N_components: dict[int, np.ndarray]   # j -> N_{-j}
    sl2: tuple[np.ndarray, np.ndarray, np.ndarray]  # (N0, H, N0+)
    residual: float

    @property
    def N0(self) -> np.ndarray:
        return self.sl2[0]


def _grading_projectors(Y: np.ndarray, levels: list[int], tol: float):
    """Eigenprojectors of a (possibly non-diagonal) grading with the given
    integer eigenvalues."""
    from .linalg import nullspace_float

    n = Y.shape[0]
    spaces = {}
    for k in levels:
        E = nullspace_float(Y - k * np.eye(n), tol)
        if E.shape[0]:
            spaces[k] = E
    C = np.vstack([spaces[k] for k in sorted(spaces)]).T
    if C.shape[1] != n:
        raise ConstructionFailed("grading eigenspaces do not span")
    Cinv = np.linalg.inv(C)
    proj = {}
    idx = 0
    for k in sorted(spaces):
        d = spaces[k].shape[0]
        E = np.zeros((n, n), dtype=complex)
        for t in range(idx, idx + d):
            E[t, t] = 1.0
        proj[k] = C @ E @ Cinv
        idx += d
    return proj


def _ad_component(proj: dict[int, np.ndarray], A: np.ndarray, j: int) -> np.ndarray:
    out = np.zeros_like(np.asarray(A, dtype=complex))
    for k in proj:
        if k + j in proj:
            out = out + proj[k + j] @ A @ proj[k]
    return out


def _initial_w_grading(W: Filtration, Y: np.ndarray, tol: float) -> np.ndarray:
    """A grading of W commuting with Y: Y-invariant echelon complements of
    consecutive weight steps.  When Y already grades W it is returned as is."""
    from .linalg import nullspace_float

    n = W.ambient_dim
    evs = sorted({int(round(x.real)) for x in np.linalg.eigvals(Y)})
    # fast path: Y itself grades W
    cums = {}
    total = Subspace.zero(n)
    grades_w = True
    for mu in evs:
        E = Subspace.from_rows(nullspace_float(Y - mu * np.eye(n), tol), n, tol)
        total = total.add(E, tol)
        cums[mu] = total
    for k in W.indices:
        lower = [cums[mu] for mu in evs if mu <= k]
        space = lower[-1] if lower else Subspace.zero(n)
        if space.dim != W.at(k).dim or not W.at(k).contains(space, tol):
            grades_w = False
            break
    if grades_w:
        return np.asarray(Y, dtype=complex)

    pieces = []
    weights = []
    prev = Subspace.zero(n)
    for k in W.indices:
        Wk = W.at(k)
        for mu in evs:
            E = Subspace.from_rows(nullspace_float(Y - mu * np.eye(n), tol), n, tol)
            big = E.intersect(Wk, tol)
            small = E.intersect(prev, tol)
            comp = small.complement_in(big, tol)
            if comp.dim:
                pieces.append(comp.basis)
                weights.extend([k] * comp.dim)
        prev = Wk
    C = np.vstack(pieces).T
    if C.shape[1] != n:
        raise ConstructionFailed("initial grading construction did not span")
    return C @ np.diag(np.array(weights, dtype=complex)) @ np.linalg.inv(C)


def deligne_system_grading(W: Filtration, N: np.ndarray, Y: np.ndarray,
                           tol: float | None = None) -> DeligneSystem:
    """The unique grading Y' of W commuting with Y whose sl2 completion
    satisfies [N - N0, N0+] = 0; all invariants re-verified before returning."""
    tol = default_tol() if tol is None else tol
    N = np.asarray(N, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    n = W.ambient_dim
    scale = max(maxabs(N), maxabs(Y), 1.0)
    if maxabs(Y @ N - N @ Y + 2 * N) > 1e3 * tol * scale:
        raise ConstructionFailed("[Y, N] = -2N fails on the input")
    check_nilpotent(N, tol)

    Yp = _initial_w_grading(W, Y, tol)
    levels = W.indices
    span = levels[-1] - levels[0]

    for _ in range(span + 3):
        proj = _grading_projectors(Yp, levels, tol)
        N0 = _ad_component(proj, N, 0)
        H = Y - Yp
        # Jacobson-Morozov completion: [Y',X] = 0, [H,X] = 2X, [X,N0] = H
        eye2 = np.eye(n * n)
        L = np.vstack([lin_ad(Yp), lin_ad(H) - 2 * eye2, -lin_ad(N0)])
        rhs = np.concatenate([np.zeros(n * n), np.zeros(n * n), vec(H)])
        x, res = solve_linear(L, rhs)
        if res > 1e3 * tol * scale:
            raise ConstructionFailed("sl2 completion system is inconsistent")
        N0p = unvec(x, n)
        R = (N - N0) @ N0p - N0p @ (N - N0)
        if maxabs(R) <= 10 * tol * scale:
            break
        j0, Rj0 = None, None
        for j in range(1, span + 1):
            Rj = _ad_component(proj, R, -j)
            if maxabs(Rj) > 10 * tol * scale:
                j0, Rj0 = j, Rj
                break
        if j0 is None:
            break
        # correction gamma: [Y,g] = 0, [Y',g] = -j0 g, ad(N0+) ad(N0) g = R_{-j0}
        L2 = np.vstack([lin_ad(Y), lin_ad(Yp) + j0 * np.eye(n * n),
                        lin_ad(N0p) @ lin_ad(N0)])
        rhs2 = np.concatenate([np.zeros(n * n), np.zeros(n * n), vec(Rj0)])
        g, res2 = solve_linear(L2, rhs2)
        if res2 > 1e3 * tol * scale:
            raise ConstructionFailed("depth correction system is inconsistent")
        gamma = unvec(g, n)
        G = expm_nilpotent(gamma)
        Yp = G @ Yp @ np.linalg.inv(G)
    else:
        raise ConstructionFailed("grading iteration did not converge")

    proj = _grading_projectors(Yp, levels, tol)
    comps = {}
    for j in range(0, span + 1):
        part = _ad_component(proj, N, -j)
        if maxabs(part) > tol * scale:
            comps[j] = part
    N0 = comps.get(0, np.zeros((n, n), dtype=complex))
    H = Y - Yp

    residual = 0.0
    residual = max(residual, maxabs(Y @ Yp - Yp @ Y))
    residual = max(residual, maxabs(sum(comps.values()) - N) if comps else maxabs(N))
    for j, part in comps.items():
        residual = max(residual, maxabs(Yp @ part - part @ Yp + j * part))
    residual = max(residual, maxabs(H @ N0 - N0 @ H + 2 * N0))
    residual = max(residual, maxabs(N0p @ N0 - N0 @ N0p - H))
    residual = max(residual, maxabs(H @ N0p - N0p @ H - 2 * N0p))
    residual = max(residual, maxabs((N - N0) @ N0p - N0p @ (N - N0)))
    # Y' must grade W: projector images (column spaces) with eigenvalue <= k
    # must span exactly W_k
    for k in levels:
        rows = [proj[m].T for m in proj if m <= k]
        space = Subspace.from_rows(np.vstack(rows), n, tol) if rows else Subspace.zero(n)
        if space.dim != W.at(k).dim or not W.at(k).contains(space, tol):
            raise ConstructionFailed("result does not grade the weight filtration")
    residual /= scale
    if residual > 1e3 * tol:
        raise ConstructionFailed(f"bracket identities fail at {residual:.3e}")
    return DeligneSystem(W=W, N=N, Y=Y, Yprime=Yp, N_components=comps,
                         sl2=(N0, H, N0p), residual=float(residual))


# ---------------------------------------------------------------------------
# nilpotent orbits


class NilpotentOrbit:
    """(W, N, F_inf) with N nilpotent, preserving W and horizontal for F_inf."""

    def __init__(self, W: Filtration, N, F_inf: Filtration, tol: float | None = None):
        tol = default_tol() if tol is None else tol
        self.W = W
        self.F_inf = F_inf
        self.dim = W.ambient_dim
        Nf, exact = _as_subspace_matrix(N)
        self.N = Nf
        self.N_exact = exact
        check_nilpotent(Nf, tol)
        for k in W.indices:
            if not W.at(k).contains(W.at(k).image_under(Nf, tol), tol):
                raise NotNilpotent("N must preserve the weight filtration")
        for p in F_inf.indices:
            moved = F_inf.at(p).image_under(Nf, tol)
            if not F_inf.at(p - 1).contains(moved, tol):
                raise NotNilpotent("N must shift the Hodge filtration by one (horizontality)")

    def fiber(self, z: complex, tol: float | None = None) -> MixedHodgeStructure:
        G = expm_nilpotent(complex(z) * self.N)
        F = self.F_inf.map_spaces(lambda s: s.image_under(G, tol))
        H = MixedHodgeStructure(self.W, F)
        if not H.validate(tol).ok:
            raise NotAnMHS(f"orbit fiber at z = {z} is not a mixed Hodge structure")
        return H


def limit_mhs(orbit: NilpotentOrbit, tol: float | None = None) -> MixedHodgeStructure:
    M = relative_weight_filtration(orbit.N_exact if orbit.N_exact is not None else orbit.N,
                                   orbit.W, tol)
    H = MixedHodgeStructure(M, orbit.F_inf)
    report = H.validate(tol)
    if not report.ok:
        raise NotAnMHS("; ".join(report.failures))
    return H


def limit_height(orbit: NilpotentOrbit, orientation, tol: float | None = None) -> float:
    """Height of the orbit: the coefficient of the deepest Y'-eigencomponent of
    the limit splitting against the bottom generator.

    The grading Y' and the generators refer to W while the splitting comes
    from the limit structure (F_inf, M)."""
    tol = default_tol() if tol is None else tol
    weights = orbit.W.indices
    length = weights[-1] - weights[0]
    if length % 2:
        raise NotAnMHS("length of W must be even for a signed height")
    Hlim = limit_mhs(orbit, tol)
    Y = Hlim.bigrading(tol).Y
    system = deligne_system_grading(orbit.W, orbit.N, Y, tol)
    spl = deligne_delta(Hlim, tol)
    proj = _grading_projectors(system.Yprime, weights, tol)
    deep = _ad_component(proj, spl.delta.astype(complex), -length)
    vec_out = deep @ np.asarray(orientation.top, dtype=complex)
    bottom = np.asarray(orientation.bottom, dtype=complex)
    j = int(np.argmax(np.abs(bottom)))
    coeff = vec_out[j] / bottom[j]
    scale = max(maxabs(spl.delta), 1.0)
    if maxabs(vec_out - coeff * bottom) > 1e3 * tol * max(scale, abs(coeff)):
        raise NotAnMHS("deep splitting component is not proportional to the bottom generator")
    return float(coeff.real)


# ---------------------------------------------------------------------------
# seeded generator for admissible systems (test vectors)


def random_deligne_system(rng: np.random.Generator, max_dim: int = 6,
                          tol: float | None = None):
    """A random Deligne system (W, N, Y), built from weighted shift strings and
    conjugated by a random rational change of basis; retries until the grading
    data verifies as admissible."""
    tol = default_tol() if tol is None else tol
    for _ in range(200):
        strings = []
        total = 0
        while total < max_dim - 1 and (total == 0 or rng.random() < 0.7):
            length = int(rng.integers(1, min(4, max_dim - total) + 1))
            strings.append(length)
            total += length
        n = total
        Wlev = []
        Mlev = []
        N = np.zeros((n, n))
        idx = 0
        for length in strings:
            top_m = int(rng.integers(-1, 2)) * 2 + (length - 1)
            kind = rng.random()
            for j in range(length):
                mu = top_m - 2 * j
                Mlev.append(mu)
                if kind < 0.45:
                    Wlev.append(mu)           # Hodge-Tate-like: W follows M
                elif kind < 0.8:
                    Wlev.append(top_m - (length - 1))   # pure W block
                else:
                    Wlev.append(mu + int(rng.integers(0, 2)) * 2 - 1)
                if j + 1 < length:
                    N[idx + j + 1, idx + j] = 1.0
            idx += length
        Y = np.diag(np.array(Mlev, dtype=float))
        wvals = sorted(set(Wlev))
        steps = []
        for k in wvals:
            rows = [np.eye(n)[i] for i in range(n) if Wlev[i] <= k]
            steps.append((k, Subspace.from_rows(rows, n)))
        try:
            W = weight_filtration(steps, n)
        except Exception:
            continue
        # N must preserve W
        ok = all(W.at(k).contains(W.at(k).image_under(N, tol), tol) for k in W.indices)
        if not ok:
            continue
        try:
            M = relative_weight_filtration(N, W, tol)
        except DoesNotExist:
            continue
        # Y must grade M
        if [int(x) for x in sorted(set(Mlev))] != M.indices:
            continue
        good = True
        for k in M.indices:
            span = Subspace.from_rows([np.eye(n)[i] for i in range(n) if Mlev[i] <= k], n)
            if not span.equals(M.at(k), tol):
                good = False
                break
        if not good:
            continue
        # random rational coordinate change preserving nothing in particular
        g = np.eye(n) + np.triu(rng.integers(-2, 3, size=(n, n)), 1).astype(float)
        perm = rng.permutation(n)
        g = g[perm][:, perm]
        ginv = np.linalg.inv(g)
        N2 = g @ N @ ginv
        Y2 = g @ Y @ ginv
        W2 = W.map_spaces(lambda s: s.image_under(g, tol))
        return W2, N2, Y2
    raise ConstructionFailed("random system generation failed repeatedly")
