import pytest

from exal2.errors import (
    NotConfluent,
    NotFiniteDimensional,
    ShapeMismatch,
    TargetMismatch,
    UsageError,
)
from exal2.ext2 import exal2_classify
from exal2.extn import derivations, exal_classify
from exal2.finring import (
    RingHom,
    Zn,
    find_ring_iso,
    module_from_ring,
    product_ring,
    restrict_scalars,
)
from exal2.tfunctors import (
    LSComplex,
    PresentedAlgebra,
    build_ls_complex,
    t_dimensions,
    t_functor,
)


def dual_numbers():
    return PresentedAlgebra(2, ("x",), [(((2,), 1),)], [((2,), ())], 2)


def square_free_plane():
    return PresentedAlgebra(
        2,
        ("x", "y"),
        [(((2, 0), 1),), (((1, 1), 1),), (((0, 2), 1),)],
        [((2, 0), ()), ((1, 1), ()), ((0, 2), ())],
        2,
    )


def cubic_line():
    return PresentedAlgebra(2, ("x",), [(((3,), 1),)], [((3,), ())], 3)


def split_point():
    # x^2 = x presents two glued points
    return PresentedAlgebra(
        2, ("x",), [(((2,), 1), ((1,), 1))], [((2,), (((1,), 1),))], 2
    )


def ground_field():
    return PresentedAlgebra(2, (), [], [], 1)


def residue_module(pres):
    ring, values, _ = pres.ring()
    pos = pres.basis.index(tuple([0] * pres.nvars))
    eps = RingHom(
        src=ring, dst=Zn(pres.char), table=tuple(v[pos] for v in values), name="eps"
    )
    return restrict_scalars(module_from_ring(Zn(pres.char)), eps)


def unit_hom(ring, p):
    return RingHom(src=Zn(p), dst=ring, table=(ring.zero, ring.one), name="unit")


def test_normal_form_and_vector():
    dn = dual_numbers()
    assert dn.basis == ((0,), (1,))
    assert dn.normal_form({(2,): 1}) == {}
    # (x + 1)^2 = 1 in characteristic 2
    assert dn.normal_form({(2,): 1, (1,): 2, (0,): 1}) == {(0,): 1}
    assert dn.vector({(1,): 1, (2,): 1}) == (0, 1)


def test_realized_ring_tables():
    dn = dual_numbers()
    ring, values, index = dn.ring()
    assert ring.n == 4
    x = index[(0, 1)]
    assert ring.mul[x][x] == ring.zero
    one = index[(1, 0)]
    assert ring.one == one
    assert dn.element({(2,): 1}) == ring.zero


def test_split_point_is_a_product():
    ring, _, _ = split_point().ring()
    prod, _, _, _, _ = product_ring(Zn(2), Zn(2))
    assert find_ring_iso(ring, prod) is not None


def test_presentation_guards():
    with pytest.raises(UsageError):
        PresentedAlgebra(4, ("x",), [], [], 1)
    with pytest.raises(UsageError):
        PresentedAlgebra(2, ("x", "x"), [], [], 1)
    with pytest.raises(UsageError):
        PresentedAlgebra(2, ("x",), [()], [], 2)
    with pytest.raises(ShapeMismatch):
        PresentedAlgebra(2, ("x",), [(((2, 0), 1),)], [], 2)
    with pytest.raises(UsageError):
        # replacement not smaller than its lead
        PresentedAlgebra(2, ("x",), [], [((1,), (((2,), 1),))], 3)
    with pytest.raises(UsageError):
        # constant lead
        PresentedAlgebra(2, ("x",), [], [((0,), ())], 2)
    with pytest.raises(UsageError):
        # rules do not kill the relation x^2 + x
        PresentedAlgebra(2, ("x",), [(((2,), 1), ((1,), 1))], [((2,), ())], 2)
    with pytest.raises(UsageError):
        PresentedAlgebra(2, ("x",), [], [], 0)


def test_confluence_check():
    with pytest.raises(NotConfluent):
        PresentedAlgebra(
            2,
            ("x", "y"),
            [],
            [((2, 0), (((0, 1), 1),)), ((1, 1), (((1, 0), 1),))],
            3,
        )


def test_infinite_quotient_rejected():
    with pytest.raises(NotFiniteDimensional):
        PresentedAlgebra(2, ("x",), [], [], 3)


def test_complex_dual_numbers():
    dn = dual_numbers()
    ls = build_ls_complex(dn)
    assert (ls.l0_rank, ls.l1_rank, ls.l2_dim) == (1, 1, 0)
    assert ls.d2 == ()
    assert t_dimensions(dn, residue_module(dn)) == (1, 1, 0)


def test_complex_ground_field_is_zero():
    f2 = ground_field()
    ls = build_ls_complex(f2)
    assert (ls.l0_rank, ls.l1_rank, ls.l2_dim) == (0, 0, 0)
    assert t_dimensions(f2, residue_module(f2)) == (0, 0, 0)


def test_complex_square_free_plane():
    m2 = square_free_plane()
    ls = build_ls_complex(m2)
    assert (ls.l0_rank, ls.l1_rank, ls.l2_dim) == (2, 3, 3)
    assert ls.u_dim - ls.u0_dim == ls.l2_dim
    assert t_dimensions(m2, residue_module(m2)) == (2, 3, 2)


def test_shallow_depth_fails_to_stabilize():
    with pytest.raises(NotFiniteDimensional):
        build_ls_complex(square_free_plane(), depth=1)


def test_composite_differential_vanishes():
    m2 = square_free_plane()
    ls = build_ls_complex(m2)
    ring, _, _ = m2.ring()
    for row in ls.d2:
        for k in range(ls.l0_rank):
            acc = ring.zero
            for i in range(ls.l1_rank):
                acc = ring.add[acc][ring.mul[row[i]][ls.d1[i][k]]]
            assert acc == ring.zero


@pytest.mark.parametrize(
    "make", [dual_numbers, square_free_plane, cubic_line, split_point]
)
def test_degree_zero_counts_derivations(make):
    pres = make()
    ring, _, _ = pres.ring()
    mod = residue_module(pres)
    t0 = t_functor(pres, mod, 0)
    assert pres.char ** t0 == len(derivations(ring, mod).tables)


@pytest.mark.parametrize("make", [dual_numbers, square_free_plane, cubic_line])
def test_degree_one_counts_extension_classes(make):
    pres = make()
    ring, _, _ = pres.ring()
    mod = residue_module(pres)
    t1 = t_functor(pres, mod, 1)
    rel = exal_classify(ring, mod, base_hom=unit_hom(ring, pres.char))
    assert pres.char ** t1 == len(rel.reps)


@pytest.mark.parametrize("make", [dual_numbers, cubic_line])
def test_degree_two_counts_2extension_classes(make):
    pres = make()
    ring, _, _ = pres.ring()
    mod = residue_module(pres)
    t2 = t_functor(pres, mod, 2)
    assert t2 == 0
    cl = exal2_classify(
        ring, mod, base_hom=unit_hom(ring, pres.char), presentation=pres
    )
    assert cl.size == 1


def test_bigger_coefficient_module_agrees():
    dn = dual_numbers()
    ring, _, _ = dn.ring()
    mod = module_from_ring(ring)
    dims = t_dimensions(dn, mod)
    assert 2 ** dims[0] == len(derivations(ring, mod).tables)
    rel = exal_classify(ring, mod, base_hom=unit_hom(ring, 2))
    assert 2 ** dims[1] == len(rel.reps)


def test_t_functor_guards():
    dn = dual_numbers()
    with pytest.raises(UsageError):
        t_functor(dn, residue_module(dn), 3)
    with pytest.raises(TargetMismatch):
        t_functor(dn, module_from_ring(Zn(2)), 0)


def test_dimensions_wrapper_matches_single_calls():
    m2 = square_free_plane()
    mod = residue_module(m2)
    ls = build_ls_complex(m2)
    triple = tuple(t_functor(m2, mod, d, complex=ls) for d in (0, 1, 2))
    assert t_dimensions(m2, mod) == triple
