import types

from dataclasses import replace

import pytest

from exal2.crossed import ideal_as_crossed
from exal2.errors import (
    AxiomViolation,
    ButterflyViolation,
    NoSection,
    NotComposable,
    NotInvertible,
    NotSurjective,
    ShapeMismatch,
    TargetMismatch,
    TwoExtViolation,
    UsageError,
)
from exal2.ext2 import (
    baer_sum_2ext,
    butterflies_isomorphic,
    butterfly_automorphism_to_extension,
    canonical_self_difference_splitting,
    chain_map_to_butterfly,
    compose,
    exal2_classify,
    extension_to_butterfly_automorphism,
    a_structure_from_factorization,
    identity_butterfly,
    invert,
    isomorphic_2ext,
    local_split_free_base,
    negate_2ext,
    product_2ext,
    product_butterfly,
    pullback_2ext,
    pushout_2ext,
    shear_iso,
    split_search,
    splitting_difference_extension,
    trivial_2extension,
    twist_splitting,
    two_cell_iso,
    two_extension_from_chain,
    validate_2extension,
    validate_butterfly,
    with_base_2ext,
)
from exal2.extn import are_equivalent, extension_from_surjection, trivial_extension
from exal2.finring import (
    ModuleHom,
    RingHom,
    Zn,
    identity_hom,
    module_from_ring,
    monomial_truncation,
    product_ring,
    restrict_scalars,
    univariate_quotient,
    validate_ring_hom,
)


def modn_hom(a, b, name=None):
    A, B = Zn(a), Zn(b)
    return RingHom(src=A, dst=B, table=tuple(t % b for t in range(a)), name=name or f"mod{b}")


def z8_chain():
    """The tower Z8 -> Z4 -> Z2: kernel pair (Z2, Z2-module of size 4)."""
    return two_extension_from_chain(modn_hom(8, 4), modn_hom(4, 2), name="z8 tower")


def z16_chain():
    return two_extension_from_chain(modn_hom(16, 8), modn_hom(8, 4), name="z16 tower")


def z27_chain():
    """Mod 3 everywhere, so negation acts nontrivially on every term."""
    return two_extension_from_chain(modn_hom(27, 9), modn_hom(9, 3), name="z27 tower")


def d_chain():
    """F2[x]/(x^3) -> F2[x]/(x^2) -> Z2, a tower whose end map has a ring section."""
    T3, t3vals, t3index = univariate_quotient(2, [0, 0, 0, 1], name="F2[x]/(x^3)")
    D, dvals, dindex = univariate_quotient(2, [0, 0, 1], name="D")
    pi = RingHom(src=T3, dst=D, table=tuple(dindex[v[:2]] for v in t3vals), name="modx2")
    g = RingHom(src=D, dst=Zn(2), table=tuple(v[0] for v in dvals), name="aug")
    xi = two_extension_from_chain(pi, g, name="jet tower")
    return xi, D, dindex


def m2_ring_and_module():
    B, bvals, bindex, _ = monomial_truncation(
        2, ("x", "y"), [(0, 0), (1, 0), (0, 1)], name="F2[x,y]/(x,y)^2"
    )
    res = RingHom(src=B, dst=Zn(2), table=tuple(v[0] for v in bvals), name="res")
    M = restrict_scalars(module_from_ring(Zn(2)), res, name="F2")
    return B, M


def z4_class():
    """The nonsplit one-step extension Z4 of Z2 by F2."""
    return extension_from_surjection(modn_hom(4, 2), name="Z4 class")


DUAL_PRESENTATION = types.SimpleNamespace(char=2, nvars=1, relations=((((2,), 1),),))


def test_trivial_2extension_validates():
    B = Zn(2)
    triv = trivial_2extension(B, module_from_ring(B))
    assert validate_2extension(triv)
    assert triv.crossed.f == (0, 0)


def test_trivial_2extension_ring_mismatch():
    with pytest.raises(TargetMismatch):
        trivial_2extension(Zn(2), module_from_ring(Zn(3)))


def test_chain_two_extension_builds_z8():
    xi = z8_chain()
    assert validate_2extension(xi)
    assert xi.nmod.n == 4 and xi.mod.n == 2
    g = xi.augment
    assert set(xi.crossed.f) == {r for r in range(xi.ring.n) if g(r) == g.dst.zero}
    # the module embeds exactly onto the kernel of the structure map
    f = xi.crossed.f
    assert set(xi.embed) == {x for x in range(xi.nmod.n) if f[x] == xi.ring.zero}


def test_chain_kernel_product_must_vanish():
    # ker(Z16 -> Z4) = (4) does not kill ker(Z16 -> Z2) = (2): 4*2 = 8
    with pytest.raises(TwoExtViolation):
        two_extension_from_chain(modn_hom(16, 4), modn_hom(4, 2))


def test_chain_wiring_errors():
    with pytest.raises(TargetMismatch):
        two_extension_from_chain(modn_hom(8, 4), modn_hom(8, 4))
    P, pvals, pindex, _, _ = product_ring(Zn(2), Zn(2), name="Z2xZ2")
    diag = RingHom(src=Zn(2), dst=P, table=(pindex[(0, 0)], pindex[(1, 1)]), name="diag")
    pr1 = RingHom(src=P, dst=Zn(2), table=tuple(v[0] for v in pvals), name="pr1")
    with pytest.raises(NotSurjective):
        two_extension_from_chain(diag, pr1)


def test_validate_butterfly_numbers_axioms():
    xi = z27_chain()
    u = identity_butterfly(xi)
    assert validate_butterfly(u)
    N = xi.nmod
    flipped_ip = replace(u, ip=tuple(u.ip[N.neg[y]] for y in range(N.n)))
    with pytest.raises(ButterflyViolation, match="axiom 1"):
        validate_butterfly(flipped_ip)
    flipped_i = replace(u, i=tuple(u.i[N.neg[x]] for x in range(N.n)))
    with pytest.raises(ButterflyViolation, match="axiom 2"):
        validate_butterfly(flipped_i)
    negated_ends = replace(u, mod_iso=tuple(xi.mod.neg))
    with pytest.raises(ButterflyViolation, match="axiom 8"):
        validate_butterfly(negated_ends)
    with pytest.raises(TargetMismatch):
        validate_butterfly(replace(u, p=xi.augment))


def test_cyclic_towers_split():
    for xi in (z8_chain(), z16_chain(), z27_chain()):
        s = split_search(xi)
        assert s is not None
        assert validate_butterfly(s)
        assert s.dst == trivial_2extension(xi.alg, xi.mod)


def test_splitting_times_inverse_is_identity():
    xi = z8_chain()
    s = split_search(xi)
    round_trip = compose(s, invert(s))
    assert butterflies_isomorphic(round_trip, identity_butterfly(xi))


def test_invert_requires_bijective_restrictions():
    s = split_search(z8_chain())
    with pytest.raises(NotInvertible):
        invert(replace(s, mod_iso=(0, 0)))


def test_compose_needs_matching_middle():
    s = split_search(z8_chain())
    with pytest.raises(NotComposable):
        compose(s, s)


def test_canonical_self_difference_is_splitting():
    xi = z8_chain()
    s = canonical_self_difference_splitting(xi)
    assert validate_butterfly(s)
    assert s.dst == trivial_2extension(xi.alg, xi.mod)


def test_splittings_form_torsor_over_one_step_classes():
    xi = z8_chain()
    s = split_search(xi)
    gap0 = splitting_difference_extension(s, s)
    assert are_equivalent(gap0, trivial_extension(xi.alg, xi.mod))
    v = z4_class()
    twisted = twist_splitting(s, v)
    assert validate_butterfly(twisted)
    assert two_cell_iso(s, twisted) is None
    assert are_equivalent(splitting_difference_extension(s, twisted), v)
    v0 = trivial_extension(xi.alg, xi.mod)
    assert are_equivalent(splitting_difference_extension(s, twist_splitting(s, v0)), v0)


def test_two_cell_iso_needs_parallel_butterflies():
    xi = z8_chain()
    with pytest.raises(ShapeMismatch):
        two_cell_iso(split_search(xi), identity_butterfly(xi))


def test_pushout_by_minus_one_matches_negation():
    xi = z27_chain()
    M = xi.mod
    neg = ModuleHom(src=M, dst=M, table=M.neg, name="-1")
    assert isomorphic_2ext(pushout_2ext(xi, neg), negate_2ext(xi))


def test_pushout_map_wiring():
    xi = z8_chain()
    other = module_from_ring(Zn(3))
    bad = ModuleHom(src=other, dst=other, table=(0, 1, 2), name="id")
    with pytest.raises(TargetMismatch):
        pushout_2ext(xi, bad)


def test_negate_twice_returns_the_same_data():
    xi = z8_chain()
    assert negate_2ext(negate_2ext(xi)) == xi


def test_baer_sum_unit_laws():
    xi = z8_chain()
    triv = trivial_2extension(xi.alg, xi.mod)
    assert isomorphic_2ext(baer_sum_2ext(xi, triv), xi)
    assert isomorphic_2ext(baer_sum_2ext(triv, xi), xi)
    # xi - xi is the trivial class
    assert isomorphic_2ext(xi, xi)


def test_baer_sum_needs_matching_ends():
    with pytest.raises(ShapeMismatch):
        baer_sum_2ext(z8_chain(), z16_chain())


def test_pullback_along_identity_keeps_class():
    xi = z8_chain()
    back = pullback_2ext(xi, identity_hom(xi.alg))
    assert validate_2extension(back)
    assert isomorphic_2ext(back, xi)
    with pytest.raises(TargetMismatch):
        pullback_2ext(xi, identity_hom(Zn(3)))


def test_automorphism_and_extension_round_trip():
    xi = z8_chain()
    cls0 = butterfly_automorphism_to_extension(identity_butterfly(xi))
    assert are_equivalent(cls0, trivial_extension(xi.alg, xi.mod))
    v = z4_class()
    u = extension_to_butterfly_automorphism(xi, v)
    assert validate_butterfly(u)
    assert u.src == xi and u.dst == xi
    assert are_equivalent(butterfly_automorphism_to_extension(u), v)


def test_local_split_from_generator_lifts():
    xi, D, dindex = d_chain()
    s = local_split_free_base(xi, {1: dindex[(1, 0)]})
    assert validate_butterfly(s)
    assert s.dst == trivial_2extension(xi.alg, xi.mod)
    with pytest.raises(UsageError):
        local_split_free_base(xi, {1: dindex[(0, 1)]})  # x does not sit over 1


def test_local_split_detects_missing_section():
    # Z4 -> Z2 admits no multiplicative additive section
    with pytest.raises(NoSection):
        local_split_free_base(z8_chain(), {1: 1})


def test_base_structures_from_ring_lifts():
    xi, D, dindex = d_chain()
    Z2 = xi.alg
    h = identity_hom(Z2)
    based = with_base_2ext(xi, h)
    alpha = RingHom(src=Z2, dst=D, table=(dindex[(0, 0)], dindex[(1, 0)]), name="alpha")
    based = a_structure_from_factorization(based, alpha)
    triv = with_base_2ext(trivial_2extension(Z2, xi.mod), h)
    triv = a_structure_from_factorization(triv, h)
    assert isomorphic_2ext(based, triv)


def test_base_structure_guards():
    xi, D, dindex = d_chain()
    with pytest.raises(TargetMismatch):
        with_base_2ext(xi, identity_hom(Zn(3)))
    alpha = RingHom(src=xi.alg, dst=D, table=(dindex[(0, 0)], dindex[(1, 0)]), name="alpha")
    with pytest.raises(UsageError):
        a_structure_from_factorization(xi, alpha)  # no base declared


def test_shear_iso_and_mirror_orientation():
    for g in (modn_hom(4, 2), modn_hom(16, 2)):
        iso, fp, sd = shear_iso(g)
        assert validate_ring_hom(iso)
        assert iso.is_bijective()
    # the mirror map (r, r2) -> (r, r - r2) fails multiplicativity once
    # doubled squares of kernel elements survive, e.g. 2*2*2 = 8 in Z16
    g = modn_hom(16, 2)
    iso, fp, sd = shear_iso(g)
    R = g.src
    cr = ideal_as_crossed(R, g.kernel())
    pos = {e: k for k, e in enumerate(cr.f)}
    table = tuple(sd.index[(r, pos[R.sub(r, r2)])] for (r, r2) in fp.pairs)
    mirror = RingHom(src=fp.ring, dst=sd.ring, table=table, name="mirror")
    with pytest.raises(AxiomViolation):
        validate_ring_hom(mirror)


def test_nonsplit_class_exists_over_m2_ring():
    from exal2.ext2 import _candidate_frames, _frame_candidates

    B, M = m2_ring_and_module()
    found = None
    for R, g, label in _candidate_frames(B, M, None):
        for cand in _frame_candidates(B, M, R, g, label):
            if split_search(cand) is None:
                found = cand
                break
        if found is not None:
            break
    assert found is not None
    assert validate_2extension(found)
    assert not isomorphic_2ext(found, trivial_2extension(B, M))
    # doubling lands back in the subgroup that the trivial class generates
    assert isomorphic_2ext(baer_sum_2ext(found, found), trivial_2extension(B, M))


def test_exal2_classify_field_point():
    F2 = Zn(2)
    M = module_from_ring(F2)
    cl = exal2_classify(F2, M)
    assert cl.size == 1
    assert cl.class_of(trivial_2extension(F2, M)) == 0
    assert cl.add(0, 0) == 0 and cl.neg(0) == 0
    clb = exal2_classify(F2, M, base_hom=identity_hom(F2))
    assert clb.size == 1
    assert clb.add(0, 0) == 0


def test_exal2_classify_dual_numbers():
    D, dvals, dindex = univariate_quotient(2, [0, 0, 1], name="D")
    res = RingHom(src=D, dst=Zn(2), table=tuple(v[0] for v in dvals), name="res")
    M = restrict_scalars(module_from_ring(Zn(2)), res, name="F2")
    cl = exal2_classify(D, M)
    assert cl.size == 1
    assert "middle rings" in cl.frame_report
    cl_pres = exal2_classify(D, M, presentation=DUAL_PRESENTATION)
    assert cl_pres.size == 1
    assert cl_pres.candidates >= cl.candidates
    h = RingHom(src=Zn(2), dst=D, table=(dindex[(0, 0)], dindex[(1, 0)]), name="unit")
    clb = exal2_classify(D, M, base_hom=h, presentation=DUAL_PRESENTATION)
    assert clb.size == 1


def test_exal2_classify_z4_tower_class():
    xi = z16_chain()
    cl = exal2_classify(Zn(4), xi.mod)
    assert cl.size == 1
    assert cl.class_of(xi) == 0


def test_exal2_classify_product_ring():
    P, pvals, pindex, p1, p2 = product_ring(Zn(2), Zn(2), name="Z2xZ2")
    pr1 = RingHom(src=P, dst=Zn(2), table=tuple(v[0] for v in pvals), name="pr1")
    M = restrict_scalars(module_from_ring(Zn(2)), pr1, name="F2")
    assert exal2_classify(P, M).size == 1


def test_exal2_classify_zero_module():
    from exal2.finring import FiniteModule

    B = Zn(2)
    M = FiniteModule(ring=B, n=1, add=((0,),), act=((0,), (0,)), zero=0, name="0")
    cl = exal2_classify(B, M)
    assert cl.size == 1
    assert "zero module" in cl.frame_report
    assert exal2_classify(B, M, base_hom=identity_hom(B)).size == 1


def test_exal2_presentation_must_match_the_ring():
    xi = z16_chain()
    with pytest.raises(UsageError):
        exal2_classify(Zn(4), xi.mod, presentation=DUAL_PRESENTATION)


def test_isomorphic_2ext_needs_matching_ends():
    with pytest.raises(ShapeMismatch):
        isomorphic_2ext(z8_chain(), z16_chain())


def test_products_of_2extensions():
    xi = z8_chain()
    prod = product_2ext(xi, xi)
    assert validate_2extension(prod)
    assert prod.alg.n == 4 and prod.mod.n == 4
    s = split_search(prod)
    assert s is not None
    both = product_butterfly(split_search(xi), split_search(xi))
    assert validate_butterfly(both)
