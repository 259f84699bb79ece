"""Generalized biextensions with prescribed splitting invariants.

A generalized biextension has three graded pieces, of weights 2a > b > 2c with
rank-one ends.  Its real-MHS class is pinned down by the graded blocks of the
splitting: delta1 (top to middle), delta2 (middle to bottom) and the height
coefficient delta3 (top to bottom).  The constructor realizes prescribed
blocks on a split real reference structure as (exp(i delta) . F0, W); by the
rigidity of that construction the splitting of the result is exactly the
assembled delta, which makes the build/extract round trip testable.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import default_tol
from .errors import InvalidBlockType, NotGeneralizedBiextension
from .height import Orientation, OrientedMHS
from .linalg import Subspace, expm_nilpotent
from .mhs import MixedHodgeStructure, hodge_filtration, weight_filtration
from .splitting import deligne_delta

MiddleType = tuple[tuple[int, int], int]  # ((p, q) with p >= q, multiplicity)


@dataclass(frozen=True)
class BiextensionSpec:
    """Weights (2a, b, 2c), middle Hodge types, splitting blocks, height.

    The middle is a list of Hodge types (p, q) with p + q = b and p >= q; a
    type with p > q occupies a conjugate pair of bigrading pieces and
    contributes two real reference vectors.  delta1 and delta2 are real
    vectors against the real middle basis; entries must vanish on coordinates
    whose type is not strictly dominated by both ends (Lambda constraint).
    """

    weights: tuple[int, int, int]
    middle: tuple[MiddleType, ...]
    delta1: tuple[float, ...]
    delta2: tuple[float, ...]
    ht: float

    def __post_init__(self):
        two_a, b, two_c = self.weights
        if not (two_a > b > two_c):
            raise InvalidBlockType("weights must satisfy 2a > b > 2c")
        if two_a % 2 or two_c % 2:
            raise InvalidBlockType("end weights must be even")
        for (p, q), mult in self.middle:
            if p + q != b or p < q or mult < 1:
                raise InvalidBlockType(f"bad middle type {(p, q)} x {mult}")
        dim = self.middle_dim
        if len(self.delta1) != dim or len(self.delta2) != dim:
            raise InvalidBlockType("block length does not match the middle dimension")
        a, c = two_a // 2, two_c // 2
        for idx, (p, q) in enumerate(self.coordinate_types):
            if not (p < a and q < a) and (self.delta1[idx] != 0):
                raise InvalidBlockType(f"delta1 entry {idx} sits in a forbidden type slot")
            if not (p > c and q > c) and (self.delta2[idx] != 0):
                raise InvalidBlockType(f"delta2 entry {idx} sits in a forbidden type slot")

    @property
    def middle_dim(self) -> int:
        return sum((1 if p == q else 2) * mult for (p, q), mult in self.middle)

    @property
    def coordinate_types(self) -> list[tuple[int, int]]:
        """Hodge type governing each real middle coordinate (pairs repeat)."""
        out = []
        for (p, q), mult in self.middle:
            out.extend([(p, q)] * ((1 if p == q else 2) * mult))
        return out

    @property
    def dim(self) -> int:
        return self.middle_dim + 2


def spec_allclose(s1: BiextensionSpec, s2: BiextensionSpec, tol: float) -> bool:
    return (s1.weights == s2.weights and s1.middle == s2.middle
            and np.allclose(s1.delta1, s2.delta1, atol=tol)
            and np.allclose(s1.delta2, s2.delta2, atol=tol)
            and abs(s1.ht - s2.ht) <= tol)


def _split_reference(spec: BiextensionSpec):
    """Split real structure: basis u0, middle block, u_last with W and F0."""
    n = spec.dim
    two_a, b, two_c = spec.weights
    a, c = two_a // 2, two_c // 2
    eye = np.eye(n)
    # complex bigrading pieces of the reference: pair types use x +- i y
    pieces: dict[tuple[int, int], list[np.ndarray]] = {(a, a): [eye[0]],
                                                       (c, c): [eye[n - 1]]}
    col = 1
    for (p, q), mult in spec.middle:
        for _ in range(mult):
            if p == q:
                pieces.setdefault((p, p), []).append(eye[col])
                col += 1
            else:
                x, y = eye[col], eye[col + 1]
                pieces.setdefault((p, q), []).append(x + 1j * y)
                pieces.setdefault((q, p), []).append(x - 1j * y)
                col += 2
    levels = sorted({p for p, _ in pieces})
    fsteps = []
    for lev in levels:
        rows = [v for (p, q), vs in pieces.items() if p >= lev for v in vs]
        fsteps.append((lev, Subspace.from_rows(rows, n)))
    F0 = hodge_filtration(fsteps, n)
    W = weight_filtration([
        (two_c, Subspace.from_rows([eye[n - 1]], n)),
        (b, Subspace.from_rows(eye[1:], n)),
        (two_a, Subspace.full(n)),
    ], n)
    return W, F0


def assemble_delta(spec: BiextensionSpec) -> np.ndarray:
    n = spec.dim
    delta = np.zeros((n, n))
    delta[1:n - 1, 0] = np.asarray(spec.delta1, dtype=float)
    delta[n - 1, 1:n - 1] = np.asarray(spec.delta2, dtype=float)
    delta[n - 1, 0] = spec.ht
    return delta


def build_biextension(spec: BiextensionSpec) -> OrientedMHS:
    """Realize the spec as (exp(i delta) . F0, W) on the split reference."""
    W, F0 = _split_reference(spec)
    delta = assemble_delta(spec)
    G = expm_nilpotent(1j * delta)
    F = F0.map_spaces(lambda s: s.image_under(G))
    H = MixedHodgeStructure(W, F)
    n = spec.dim
    top = np.zeros(n)
    top[0] = 1.0
    bottom = np.zeros(n)
    bottom[n - 1] = 1.0
    return OrientedMHS(H, Orientation.of(top, bottom))


def _graded_middle_basis(om: OrientedMHS, tol: float):
    """Canonical lift basis of the middle graded piece: echelon rows of W_b
    whose pivots are not pivots of W_bottom."""
    H = om.mhs
    weights = H.weights
    b = weights[1]
    Wb = H.W.at(b)
    Wbot = H.W.at(weights[0])
    rows = [Wb.basis[i] for i, p in enumerate(Wb.pivots) if p not in set(Wbot.pivots)]
    return np.array(rows).reshape(len(rows), H.dim)


def extract_invariants(om: OrientedMHS, tol: float | None = None) -> BiextensionSpec:
    """Read the splitting blocks of a generalized biextension back off.

    delta1 comes from (i/2) Pi_b(conj e - e) as a class in the middle graded
    piece, the height from -(1/2) Im Pi_min(conj e), and delta2 from the
    corresponding graded block of the full splitting; the middle Hodge types
    are the bigrading dimensions in weight b.
    """
    tol = default_tol() if tol is None else tol
    H = om.mhs
    weights = H.weights
    if len(weights) != 3:
        raise NotGeneralizedBiextension(
            f"need exactly three nonzero weights, found {len(weights)}")
    two_c, b, two_a = weights
    B = H.bigrading(tol)
    # middle types with p >= q and multiplicities
    mids: dict[tuple[int, int], int] = {}
    for (p, q), piece in B.components.items():
        if p + q == b and p >= q:
            mids[(p, q)] = piece.dim
    middle = tuple(sorted(mids.items()))

    from .height import top_lift
    e = top_lift(om, tol)
    mid_basis = _graded_middle_basis(om, tol)
    mdim = mid_basis.shape[0]
    bottom = om.orientation.bottom

    def middle_class(vector: np.ndarray) -> np.ndarray:
        """Coordinates of a W_b vector in the canonical lift basis mod bottom."""
        cols = np.vstack([mid_basis, H.W.at(two_c).basis]).T
        x, *_ = np.linalg.lstsq(cols, vector, rcond=None)
        return x[:mdim]

    v1 = 0.5j * (B.weight_projector(b) @ (np.conj(e) - e))
    d1 = middle_class(v1)

    spl = deligne_delta(H, tol)
    d2 = np.array([_bottom_coeff(spl.delta @ m, bottom, tol) for m in mid_basis])

    vmin = B.weight_projector(two_c) @ np.conj(e)
    ht_vec = -((vmin - np.conj(vmin)) / 2j) / 2
    ht = _bottom_coeff(ht_vec, bottom, tol)

    def clean(x: np.ndarray) -> tuple[float, ...]:
        scale = max(1.0, float(np.abs(x).max()) if x.size else 0.0)
        out = np.where(np.abs(np.asarray(x)) <= tol * scale, 0.0, np.real(x))
        return tuple(float(t) for t in out)

    return BiextensionSpec(weights=(two_a, b, two_c), middle=middle,
                           delta1=clean(d1), delta2=clean(d2), ht=float(ht))


def _bottom_coeff(vector: np.ndarray, bottom: np.ndarray, tol: float) -> float:
    j = int(np.argmax(np.abs(bottom)))
    coeff = vector[j] / bottom[j]
    return float(np.real(coeff))


# ---------------------------------------------------------------------------
# seeded generators used by the property suites


def random_spec(rng: np.random.Generator, max_middle: int = 4) -> BiextensionSpec:
    """Random buildable spec with dimension at most max_middle + 2."""
    two_a = 2 * int(rng.integers(-1, 2))
    gap_top = int(rng.integers(1, 3))
    b = two_a - gap_top
    # bottom weight: even and strictly below b
    two_c = b - 1 if (b - 1) % 2 == 0 else b - 2
    a, c = two_a // 2, two_c // 2
    # middle types of weight b
    types = []
    if b % 2 == 0:
        types.append(((b // 2, b // 2), int(rng.integers(1, max_middle + 1))))
        if max_middle >= 3 and rng.random() < 0.3 and b // 2 + 1 < a and b // 2 - 1 > c:
            types.append(((b // 2 + 1, b // 2 - 1), 1))
    else:
        types.append((((b + 1) // 2, (b - 1) // 2), max(1, int(rng.integers(1, max_middle // 2 + 1)))))
    spec_types = tuple(sorted(types))
    tmp = BiextensionSpec(weights=(two_a, b, two_c), middle=spec_types,
                          delta1=(0.0,) * _mdim(spec_types),
                          delta2=(0.0,) * _mdim(spec_types), ht=0.0)
    coord_types = tmp.coordinate_types
    d1 = np.zeros(tmp.middle_dim)
    d2 = np.zeros(tmp.middle_dim)
    for i, (p, q) in enumerate(coord_types):
        if p < a and q < a:
            d1[i] = rng.normal()
        if p > c and q > c:
            d2[i] = rng.normal()
    return BiextensionSpec(weights=(two_a, b, two_c), middle=spec_types,
                           delta1=tuple(d1), delta2=tuple(d2),
                           ht=float(rng.normal()))


def _mdim(types) -> int:
    return sum((1 if p == q else 2) * m for (p, q), m in types)


def random_oriented_mhs(rng: np.random.Generator, max_middle: int = 4) -> OrientedMHS:
    return build_biextension(random_spec(rng, max_middle))


def embed_into_padded(om_spec: BiextensionSpec, extra: int = 1):
    """Inclusion of a built biextension into the same build with extra split
    middle coordinates: a morphism with d_max = d_min = 1 and equal heights."""
    two_a, b, two_c = om_spec.weights
    if b % 2:
        pad_type = ((b + 1) // 2, (b - 1) // 2)
    else:
        pad_type = (b // 2, b // 2)
    mids = dict(om_spec.middle)
    mids[pad_type] = mids.get(pad_type, 0) + extra
    middle_big = tuple(sorted(mids.items()))
    # place the small delta entries at the coordinates of the matching type
    # copies inside the (sorted) enlarged middle; padded columns stay zero
    skeleton = BiextensionSpec(weights=om_spec.weights, middle=middle_big,
                               delta1=(0.0,) * _mdim(middle_big),
                               delta2=(0.0,) * _mdim(middle_big), ht=om_spec.ht)
    small_cols = _type_positions(om_spec)
    big_cols = _type_positions(skeleton)
    d1 = np.zeros(skeleton.middle_dim)
    d2 = np.zeros(skeleton.middle_dim)
    n_a, n_b = om_spec.dim, skeleton.dim
    f = np.zeros((n_b, n_a))
    f[0, 0] = 1.0
    f[n_b - 1, n_a - 1] = 1.0
    for t, src_positions in small_cols.items():
        for s_i, dst in zip(src_positions, big_cols[t]):
            d1[dst] = om_spec.delta1[s_i]
            d2[dst] = om_spec.delta2[s_i]
            f[1 + dst, 1 + s_i] = 1.0
    big = BiextensionSpec(weights=om_spec.weights, middle=middle_big,
                          delta1=tuple(d1), delta2=tuple(d2), ht=om_spec.ht)
    A = build_biextension(om_spec)
    B = build_biextension(big)
    return f, A, B


def _type_positions(spec: BiextensionSpec) -> dict[tuple[int, int], list[int]]:
    pos: dict[tuple[int, int], list[int]] = {}
    for i, t in enumerate(spec.coordinate_types):
        pos.setdefault(t, []).append(i)
    return pos
