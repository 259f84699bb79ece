import numpy as np
import pytest
from math import e, log, pi

from hodgeheight.biextension import (
    BiextensionSpec,
    build_biextension,
    extract_invariants,
    random_spec,
    spec_allclose,
)
from hodgeheight.errors import InvalidBlockType, NotGeneralizedBiextension
from hodgeheight.height import dual_oriented, height, height_biextension
from hodgeheight.mhs import validate
from hodgeheight.splitting import deligne_delta


def test_zero_spec_builds_split_structure():
    spec = BiextensionSpec(weights=(0, -2, -4), middle=(((-1, -1), 2),),
                           delta1=(0.0, 0.0), delta2=(0.0, 0.0), ht=0.0)
    om = build_biextension(spec)
    assert validate(om.mhs).ok
    assert height(om) == pytest.approx(0.0, abs=1e-13)


def test_dim_zero_pair_roundtrip():
    a, b = 2.0, 3.0
    s1, s2 = log(abs(a)) / (2 * pi), log(abs(b)) / (2 * pi)
    spec = BiextensionSpec(weights=(0, -2, -4), middle=(((-1, -1), 2),),
                           delta1=(s1, s2), delta2=(s2, s1), ht=0.0)
    om = build_biextension(spec)
    back = extract_invariants(om)
    assert spec_allclose(back, spec, 1e-12)
    assert back.delta1[0] == pytest.approx(log(2) / (2 * pi), abs=1e-12)
    assert back.delta1[1] == pytest.approx(log(3) / (2 * pi), abs=1e-12)
    assert back.ht == pytest.approx(0.0, abs=1e-12)


def test_projective_plane_middle_slot():
    # middle with one cohomology slot plus nine point slots; the height slot
    # drives the signed height of the build
    ht = 0.1392
    spec = BiextensionSpec(weights=(0, -2, -4), middle=(((-1, -1), 10),),
                           delta1=tuple(np.linspace(-1, 1, 10)),
                           delta2=tuple(np.linspace(0.5, -0.5, 10)), ht=ht)
    om = build_biextension(spec)
    assert height(om) == pytest.approx(ht, abs=1e-11)
    assert height_biextension(om) == pytest.approx(ht, abs=1e-11)


def test_forbidden_block_slots_raise():
    with pytest.raises(InvalidBlockType):
        BiextensionSpec(weights=(0, -1, -2), middle=(((0, -1), 1),),
                        delta1=(0.3, 0.0), delta2=(0.0, 0.0), ht=0.0)
    with pytest.raises(InvalidBlockType):
        BiextensionSpec(weights=(0, -2, -4), middle=(((0, -2), 1),),
                        delta1=(0.1, 0.0), delta2=(0.0, 0.0), ht=0.0)
    # non-sorted type or bad weights
    with pytest.raises(InvalidBlockType):
        BiextensionSpec(weights=(0, -2, -2), middle=(((-1, -1), 1),),
                        delta1=(0.0,), delta2=(0.0,), ht=0.0)


def test_roundtrip_fifty_random_specs(rng):
    for _ in range(50):
        spec = random_spec(rng)
        om = build_biextension(spec)
        back = extract_invariants(om)
        assert spec_allclose(back, spec, 1e-10), (spec, back)


def test_build_delta_roundtrip(rng):
    from hodgeheight.biextension import assemble_delta
    from hodgeheight.linalg import maxabs

    for _ in range(10):
        spec = random_spec(rng)
        om = build_biextension(spec)
        spl = deligne_delta(om.mhs)
        assert maxabs(spl.delta - assemble_delta(spec)) < 1e-10


def test_height_equals_spec_slot(rng):
    for _ in range(20):
        spec = random_spec(rng)
        om = build_biextension(spec)
        assert height(om) == pytest.approx(spec.ht, abs=1e-10)
        assert height_biextension(om) == pytest.approx(spec.ht, abs=1e-10)


def test_dual_negates_height_slot(rng):
    for _ in range(10):
        spec = random_spec(rng)
        om = build_biextension(spec)
        dn = dual_oriented(om)
        back = extract_invariants(dn)
        assert back.ht == pytest.approx(-spec.ht, abs=1e-10)


def test_extract_rejects_too_many_weights():
    from hodgeheight.scenarios import cubic_orbit
    from hodgeheight.height import OrientedMHS
    from hodgeheight.limits import limit_mhs

    orbit, orient = cubic_orbit()
    om = OrientedMHS(limit_mhs(orbit), orient)
    with pytest.raises(NotGeneralizedBiextension):
        extract_invariants(om)


def test_extract_of_split_build_is_zero_spec():
    spec = BiextensionSpec(weights=(0, -2, -4), middle=(((-1, -1), 3),),
                           delta1=(0.0,) * 3, delta2=(0.0,) * 3, ht=0.0)
    back = extract_invariants(build_biextension(spec))
    assert back.ht == 0.0
    assert all(x == 0.0 for x in back.delta1)
    assert all(x == 0.0 for x in back.delta2)
