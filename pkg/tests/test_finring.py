import random

import pytest

from exal2.errors import AxiomViolation, NotAnIdeal
from exal2.finring import (
    F4,
    PRESET_RING_NAMES,
    FiniteModule,
    FiniteRing,
    ModuleHom,
    RingHom,
    Zn,
    exact_at,
    fiber_product,
    find_ring_iso,
    ideal_generated_by,
    identity_hom,
    is_ideal,
    module_from_ideal,
    module_from_ring,
    monomial_truncation,
    preset_ring,
    product_ring,
    quotient_by_ideal,
    quotient_module,
    restrict_scalars,
    submodule,
    univariate_quotient,
    validate_module,
    validate_module_hom,
    validate_ring,
    validate_ring_hom,
)


@pytest.mark.parametrize("name", PRESET_RING_NAMES)
def test_presets_are_rings(name):
    R = preset_ring(name)
    assert validate_ring(R)


def test_preset_orders():
    assert preset_ring("Z4").n == 4
    assert preset_ring("F4").n == 4
    assert preset_ring("Z2xZ2").n == 4
    assert preset_ring("F2[x]/(x^2)").n == 4
    assert preset_ring("F2[x,y]/(x^2,xy,y^2)").n == 8
    assert preset_ring("F2[x]/(x^4)").n == 16


def test_char():
    assert Zn(4).char == 4
    assert F4().char == 2
    assert preset_ring("F2[x]/(x^3)").char == 2


def test_validate_catches_broken_table():
    R = Zn(4)
    bad = [list(r) for r in R.mul]
    bad[2][3] = 0  # breaks 2*3 = 2
    broken = FiniteRing(n=4, add=R.add, mul=tuple(tuple(r) for r in bad), zero=0, one=1)
    with pytest.raises(AxiomViolation):
        validate_ring(broken)


def test_quotient_z8_by_4_is_z4():
    R = Zn(8)
    ideal = ideal_generated_by(R, [4])
    assert ideal == (0, 4)
    q = quotient_by_ideal(R, ideal)
    assert validate_ring(q.ring)
    assert validate_ring_hom(q.proj)
    assert find_ring_iso(q.ring, Zn(4)) is not None


def test_ideal_machinery():
    R = Zn(12)
    assert ideal_generated_by(R, [4]) == (0, 4, 8)
    assert is_ideal(R, [0, 6])
    assert not is_ideal(R, [0, 1])
    with pytest.raises(NotAnIdeal):
        quotient_by_ideal(R, [0, 5])


def test_fiber_product_universal_property():
    # Z4 -> Z2 <- F2[x]/(x^2)
    R, S = Zn(4), preset_ring("F2[x]/(x^2)")
    B = Zn(2)
    f = RingHom(src=R, dst=B, table=(0, 1, 0, 1))
    validate_ring_hom(f)
    g = RingHom(src=S, dst=B, table=tuple(_s_to_z2(S, a) for a in range(S.n)))
    validate_ring_hom(g)
    fp = fiber_product(f, g)
    assert validate_ring(fp.ring)
    assert validate_ring_hom(fp.p1)
    assert validate_ring_hom(fp.p2)
    assert fp.ring.n == R.n * S.n // B.n
    for i, (a, b) in enumerate(fp.pairs):
        assert f(a) == g(b)
        assert fp.p1(i) == a and fp.p2(i) == b


def _s_to_z2(S, a):
    # surjection F2[x]/(x^2) -> Z2 reading off the constant coefficient:
    # identify via additive order and multiplicative structure
    # element 'a' is invertible iff constant term is 1
    return 1 if a in S.units else 0


def test_product_ring_projections():
    P, values, index, p1, p2 = product_ring(Zn(2), Zn(3))
    assert validate_ring(P)
    assert validate_ring_hom(p1) and validate_ring_hom(p2)
    assert find_ring_iso(P, Zn(6)) is not None


def test_iso_distinguishes_order_four_rings():
    rings = [Zn(4), F4(), preset_ring("Z2xZ2"), preset_ring("F2[x]/(x^2)")]
    for i, R in enumerate(rings):
        for j, S in enumerate(rings):
            got = find_ring_iso(R, S)
            if i == j:
                assert got is not None
            else:
                assert got is None


def test_iso_found_on_shuffled_copy():
    rng = random.Random(2)
    for name in ("Z4", "F4", "F2[x,y]/(x^2,xy,y^2)"):
        R = preset_ring(name)
        perm = list(range(R.n))
        rng.shuffle(perm)
        inv = [0] * R.n
        for i, p in enumerate(perm):
            inv[p] = i
        add = tuple(tuple(perm[R.add[inv[i]][inv[j]]] for j in range(R.n)) for i in range(R.n))
        mul = tuple(tuple(perm[R.mul[inv[i]][inv[j]]] for j in range(R.n)) for i in range(R.n))
        S = FiniteRing(n=R.n, add=add, mul=mul, zero=perm[R.zero], one=perm[R.one], name="shuffled")
        assert validate_ring(S)
        iso = find_ring_iso(R, S)
        assert iso is not None
        assert validate_ring_hom(iso)
        assert iso.is_bijective()


def test_monomial_truncation_multiplication():
    R, values, index, basis = monomial_truncation(2, ("x", "y"), [(0, 0), (1, 0), (0, 1)])
    assert validate_ring(R)
    x = index[(0, 1, 0)]
    y = index[(0, 0, 1)]
    assert R.mul[x][x] == R.zero
    assert R.mul[x][y] == R.zero
    one = R.one
    assert R.mul[one][x] == x


def test_univariate_quotient_f8_is_a_field():
    R, _, _ = univariate_quotient(2, [1, 1, 0, 1])  # x^3 + x + 1
    assert validate_ring(R)
    assert len(R.units) == 7


def test_module_validation_and_ideal_module():
    R = Zn(8)
    mod, elems = module_from_ideal(R, ideal_generated_by(R, [2]))
    assert validate_module(mod)
    assert mod.n == 4
    full = module_from_ring(R)
    assert validate_module(full)


def test_restrict_scalars():
    B = Zn(2)
    M = module_from_ring(B)
    f = RingHom(src=Zn(4), dst=B, table=(0, 1, 0, 1))
    MM = restrict_scalars(M, f)
    assert validate_module(MM)
    assert MM.ring == Zn(4)


def test_submodule_quotient_exactness():
    R = Zn(4)
    M = module_from_ring(R)
    sub = submodule(M, [0, 2])
    q = quotient_module(M, [2])
    assert validate_module(sub.module)
    assert validate_module(q.module)
    assert validate_module_hom(sub.include)
    assert validate_module_hom(q.proj)
    assert exact_at(sub.include, q.proj)
    # not exact if we quotient by everything
    q2 = quotient_module(M, [1])
    assert not exact_at(sub.include, q2.proj)


def test_module_hom_validation_catches_bad_map():
    R = Zn(2)
    M = module_from_ring(R)
    bad = ModuleHom(src=M, dst=M, table=(0, 0))
    assert validate_module_hom(bad)  # zero map is fine
    worse = ModuleHom(src=M, dst=M, table=(1, 0))
    with pytest.raises(AxiomViolation):
        validate_module_hom(worse)


def test_identity_and_composition():
    R = Zn(4)
    idr = identity_hom(R)
    assert validate_ring_hom(idr)
    f = RingHom(src=R, dst=Zn(2), table=(0, 1, 0, 1))
    assert f.then(identity_hom(Zn(2))).table == f.table
    assert idr.then(f).table == f.table
    assert f.kernel() == (0, 2)
    assert f.is_surjective()
