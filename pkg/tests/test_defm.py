import pytest

from exal2.defm import (
    Deformation,
    act_on_deformation,
    based_trivial_2ext,
    check_transitivity_exactness,
    deformation_problem,
    deformations,
    delta,
    der_base_invariance,
    gamma,
    obstruction,
    obstruction_vanishes,
    rho,
    tau,
    validate_deformation,
    verify_deformation_theorem,
)
from exal2.errors import ShapeMismatch, TargetMismatch, TooLarge, UsageError
from exal2.ext2 import isomorphic_2ext, trivial_2extension
from exal2.extn import (
    are_equivalent,
    exal_classify,
    extension_from_surjection,
    forget_base,
    trivial_extension,
)
from exal2.finring import (
    RingHom,
    Zn,
    find_ring_iso,
    identity_hom,
    module_from_ring,
    restrict_scalars,
    univariate_quotient,
)


def z2():
    return Zn(2)


def dual_numbers():
    ring, values, index = univariate_quotient(2, (0, 0, 1), name="F2[x]/(x^2)")
    return ring, values, index


def eps_of(B, values):
    """Evaluation at x = 0, off the coefficient tuples."""
    return RingHom(src=B, dst=z2(), table=tuple(v[0] for v in values), name="eps")


def unit_into(B):
    return RingHom(src=z2(), dst=B, table=(B.zero, B.one), name="unit")


def omega_z4():
    Z4 = Zn(4)
    p = RingHom(src=Z4, dst=z2(), table=(0, 1, 0, 1), name="mod2")
    return extension_from_surjection(p, name="omega")


def jet_omega():
    """F2[x]/(x^4) onto F2[x]/(x^3), kernel generated by x^3."""
    A4, v4, i4 = univariate_quotient(2, (0, 0, 0, 0, 1), name="F2[x]/(x^4)")
    A3, v3, i3 = univariate_quotient(2, (0, 0, 0, 1), name="F2[x]/(x^3)")
    pi = RingHom(src=A4, dst=A3, table=tuple(i3[v[:3]] for v in v4), name="tr")
    return extension_from_surjection(pi, name="jet"), A3, v3, i3


def unobstructed_problem():
    """Z4 over Z2 deformed into the dual numbers, phi the identification of (2) with 1."""
    B, values, index = dual_numbers()
    M = module_from_ring(B)
    return deformation_problem(omega_z4(), unit_into(B), M, (M.zero, B.one), name="z4dual")


def obstructed_problem():
    """Third-order jet ring over the dual numbers with phi picking out x^3."""
    om, A3, v3, i3 = jet_omega()
    B, vB, iB = dual_numbers()
    g = RingHom(src=A3, dst=B, table=tuple(iB[v[:2]] for v in v3), name="tr")
    M = restrict_scalars(module_from_ring(z2()), eps_of(B, vB), name="F2")
    return deformation_problem(om, g, M, (0, 1), name="cubic-jet")


# ------------------------------------------------------------- validation


def test_problem_rejects_based_omega():
    B, vB, iB = dual_numbers()
    Z4 = Zn(4)
    p = RingHom(src=Z4, dst=z2(), table=(0, 1, 0, 1), name="mod2")
    om = extension_from_surjection(
        p, base=Z4, base_to_alg=p, base_lift=identity_hom(Z4), name="based"
    )
    M = module_from_ring(B)
    with pytest.raises(UsageError):
        deformation_problem(om, unit_into(B), M, (M.zero, B.one))


def test_problem_rejects_wrong_structure_source():
    B, vB, iB = dual_numbers()
    M = module_from_ring(B)
    om, A3, v3, i3 = jet_omega()
    with pytest.raises(TargetMismatch):
        deformation_problem(om, unit_into(B), M, (M.zero,) * om.mod.n)


def test_problem_rejects_bad_phi_tables():
    A4, v4, i4 = univariate_quotient(2, (0, 0, 0, 0, 1), name="F2[x]/(x^4)")
    B, vB, iB = dual_numbers()
    pi = RingHom(src=A4, dst=B, table=tuple(iB[v[:2]] for v in v4), name="tr")
    om = extension_from_surjection(pi, name="thick")
    M = restrict_scalars(module_from_ring(z2()), eps_of(B, vB), name="F2")
    # kernel elements in index order: 0, x^3, x^2, x^2 + x^3
    assert [v4[q] for q in om.embed] == [
        (0, 0, 0, 0),
        (0, 0, 0, 1),
        (0, 0, 1, 0),
        (0, 0, 1, 1),
    ]
    with pytest.raises(ShapeMismatch):
        deformation_problem(om, identity_hom(B), M, (0, 1))
    with pytest.raises(UsageError, match="additive"):
        deformation_problem(om, identity_hom(B), M, (0, 0, 1, 0))
    with pytest.raises(UsageError, match="equivariant"):
        deformation_problem(om, identity_hom(B), M, (0, 1, 0, 1))


# ---------------------------------------------------- unobstructed fixture


def test_unobstructed_fixture_solutions():
    prob = unobstructed_problem()
    ds = deformations(prob)
    assert len(ds) == 4
    for d in ds:
        assert validate_deformation(d)
        assert d.ext.total.n == 16
        # deforming along Z4 forces additive order 4 upstairs
        assert d.ext.total.char == 4
        assert d.comparison_iso() is not None


def test_unobstructed_witness_is_truncated_polynomial_ring():
    prob = unobstructed_problem()
    ds = deformations(prob)
    T4, _, _ = univariate_quotient(4, (0, 0, 1), name="Z4[x]/(x^2)")
    assert any(find_ring_iso(d.ext.total, T4) is not None for d in ds)


def test_unobstructed_obstruction_vanishes():
    prob = unobstructed_problem()
    assert obstruction_vanishes(prob)


def test_unobstructed_theorem_report():
    rep = verify_deformation_theorem(unobstructed_problem())
    assert rep.holds()
    assert rep.existence_iff_vanishing and rep.torsor and rep.automorphisms_match
    assert rep.vanishes
    assert rep.deformation_count == 4
    assert rep.exal_size == 4
    assert rep.der_size == 4


def test_action_stays_in_solution_set():
    prob = unobstructed_problem()
    ds = deformations(prob)
    cls = exal_classify(prob.alg, prob.mod, base_hom=prob.base_to_alg)
    for coords, _ in cls.reps:
        moved = act_on_deformation(ds[0], cls.extension_for(coords))
        assert validate_deformation(moved)


def test_action_rejects_foreign_extension():
    prob = unobstructed_problem()
    ds = deformations(prob)
    stray = trivial_extension(prob.alg, prob.mod)
    with pytest.raises(ShapeMismatch):
        act_on_deformation(ds[0], stray)


# ------------------------------------------------------ obstructed fixture


def test_obstructed_fixture_has_no_solutions():
    prob = obstructed_problem()
    assert deformations(prob) == []
    assert not obstruction_vanishes(prob)


def test_obstructed_theorem_report():
    rep = verify_deformation_theorem(obstructed_problem())
    assert rep.holds()
    assert not rep.vanishes
    assert rep.deformation_count == 0
    assert rep.exal_size == 2


def test_obstruction_clears_when_phi_is_zero():
    """Same jet ring, zero comparison map: the problem becomes solvable."""
    om, A3, v3, i3 = jet_omega()
    B, vB, iB = dual_numbers()
    g = RingHom(src=A3, dst=B, table=tuple(iB[v[:2]] for v in v3), name="tr")
    M = restrict_scalars(module_from_ring(z2()), eps_of(B, vB), name="F2")
    prob = deformation_problem(om, g, M, (0, 0), name="cubic-jet-0")
    ds = deformations(prob)
    assert obstruction_vanishes(prob)
    assert len(ds) == exal_classify(B, M, base_hom=g).size
    ob = obstruction(prob)
    assert isomorphic_2ext(ob, based_trivial_2ext(g, M))


def test_trivial_problem_over_itself():
    """B = A with phi = 0 has exactly the trivial solution class."""
    om = omega_z4()
    M = module_from_ring(z2())
    prob = deformation_problem(om, identity_hom(z2()), M, (0, 0), name="flat")
    ds = deformations(prob)
    assert len(ds) == 1
    rep = verify_deformation_theorem(prob)
    assert rep.holds() and rep.vanishes and rep.exal_size == 1


def test_deformation_cap_guard():
    with pytest.raises(TooLarge):
        deformations(unobstructed_problem(), rep_cap=2)


# -------------------------------------------------------- obstruction shape


def test_obstruction_is_structured_trivial_2ext():
    prob = unobstructed_problem()
    ob = obstruction(prob)
    assert ob.a_structure is not None
    assert ob.ring == prob.alg
    assert ob.base == prob.base
    N = ob.nmod
    assert all(
        ob.crossed.nmul[x][y] == N.zero for x in range(N.n) for y in range(N.n)
    )


# ----------------------------------------------------------- boundary maps


def frame_dual_self():
    """F2 -> F2[x]/(x^2) -> itself with the residue module."""
    B, vB, iB = dual_numbers()
    M = restrict_scalars(module_from_ring(z2()), eps_of(B, vB), name="F2")
    return unit_into(B), identity_hom(B), M, B, iB


def test_gamma_of_zero_is_trivial():
    u, v, M, B, iB = frame_dual_self()
    out = gamma((M.zero,) * B.n, u, v, M)
    assert are_equivalent(out, trivial_extension(B, M, base_hom=v))


def test_gamma_twists_the_structure_lift():
    u, v, M, B, iB = frame_dual_self()
    x = iB[(0, 1)]
    theta = [M.zero] * B.n
    theta[x] = 1
    theta[iB[(1, 1)]] = 1
    out = gamma(tuple(theta), u, v, M, name="gamma(d)")
    # underlying extension trivial, lift of x shifted into the module
    assert are_equivalent(forget_base(out), trivial_extension(B, M))
    T = out.total
    assert out.base_lift(x) == T.add[out.section[x]][out.embed[1]]
    assert out.base_lift(x) != out.section[x]
    # tau back to the small base kills the twist
    assert are_equivalent(tau(out, u), trivial_extension(B, M, base_hom=u))


def test_gamma_rejects_non_derivations():
    u, v, M, B, iB = frame_dual_self()
    with pytest.raises(ShapeMismatch):
        gamma((M.zero,) * B.n, v, u, M)
    bad = [M.zero] * B.n
    bad[iB[(0, 1)]] = 1  # not additive: misses 1 + x
    with pytest.raises(UsageError):
        gamma(tuple(bad), u, v, M)
    one = [M.zero] * B.n
    one[B.one] = 1
    with pytest.raises(UsageError):
        gamma(tuple(one), u, v, M)


def test_delta_of_trivial_extension_is_zero():
    u, v, M, B, iB = frame_dual_self()
    zeta = trivial_extension(B, restrict_scalars(M, v))
    out = delta(zeta, v, M)
    assert out.a_structure is not None
    assert isomorphic_2ext(out, based_trivial_2ext(v, M))


def test_delta_detects_a_nonrestricting_class():
    """Over the frame F2 -> F2[x]/(x^2) -> F2 the boundary map is injective."""
    B, vB, iB = dual_numbers()
    u, v = unit_into(B), eps_of(B, vB)
    M = module_from_ring(z2())
    MB = restrict_scalars(M, v, name="F2|B")
    cls = exal_classify(B, MB, base_hom=u)
    assert cls.size == 2
    zero2 = based_trivial_2ext(v, M)
    hits = []
    for coords, _ in cls.reps:
        out = delta(cls.extension_for(coords), v, M)
        hits.append((coords, isomorphic_2ext(out, zero2)))
    assert sorted(hits) == [((0,), True), ((1,), False)]


def test_rho_after_delta_is_trivial():
    u, v, M, B, iB = frame_dual_self()
    MB = restrict_scalars(M, v)
    cls = exal_classify(B, MB, base_hom=u)
    target = based_trivial_2ext(u.then(v), M)
    for coords, _ in cls.reps:
        image = rho(delta(cls.extension_for(coords), v, M), u)
        assert isomorphic_2ext(image, target)


def test_tau_and_rho_guards():
    u, v, M, B, iB = frame_dual_self()
    with pytest.raises(UsageError):
        tau(trivial_extension(B, M), u)
    based = trivial_extension(B, M, base_hom=v)
    with pytest.raises(ShapeMismatch):
        tau(based, identity_hom(z2()))
    with pytest.raises(UsageError):
        rho(trivial_2extension(B, M), u)
    with pytest.raises(ShapeMismatch):
        rho(based_trivial_2ext(v, M), identity_hom(z2()))


# ------------------------------------------------------------- exactness


def test_transitivity_identity_frame():
    F2 = z2()
    rep = check_transitivity_exactness(identity_hom(F2), identity_hom(F2), module_from_ring(F2))
    assert rep.exact()
    assert rep.sizes == (1, 1, 1, 1, 1, 1)


def test_transitivity_smooth_bottom():
    """A = B = F2 under the dual numbers: the two extension groups agree."""
    B, vB, iB = dual_numbers()
    M = restrict_scalars(module_from_ring(z2()), eps_of(B, vB), name="F2")
    rep = check_transitivity_exactness(identity_hom(z2()), unit_into(B), M)
    assert rep.exact()
    assert rep.sizes == (2, 2, 1, 2, 2, 1)


def test_transitivity_dual_self_frame():
    u, v, M, B, iB = frame_dual_self()
    rep = check_transitivity_exactness(u, v, M)
    assert rep.exact()
    assert rep.sizes == (1, 2, 2, 1, 2, 2)


def test_transitivity_augmentation_frame():
    """Nontrivial extension group of B: F2 -> F2[x]/(x^2) -> F2."""
    B, vB, iB = dual_numbers()
    rep = check_transitivity_exactness(unit_into(B), eps_of(B, vB), module_from_ring(z2()))
    assert rep.exact()
    assert rep.sizes == (1, 1, 2, 2, 1, 2)


def test_transitivity_frame_guard():
    B, vB, iB = dual_numbers()
    with pytest.raises(ShapeMismatch):
        check_transitivity_exactness(eps_of(B, vB), eps_of(B, vB), module_from_ring(z2()))


# ----------------------------------------------------------- derivations


def test_der_base_invariance_examples():
    B, vB, iB = dual_numbers()
    M = restrict_scalars(module_from_ring(z2()), eps_of(B, vB), name="F2")
    assert der_base_invariance(omega_z4(), unit_into(B), M)
    assert der_base_invariance(omega_z4(), unit_into(B), module_from_ring(B))
    om0 = extension_from_surjection(identity_hom(z2()), name="id")
    assert om0.mod.n == 1
    assert der_base_invariance(om0, unit_into(B), M)


def test_der_base_invariance_sweep():
    oms = [omega_z4()]
    om_jet, A3, v3, i3 = jet_omega()
    B, vB, iB = dual_numbers()
    g_jet = RingHom(src=A3, dst=B, table=tuple(iB[v[:2]] for v in v3), name="tr")
    M1 = restrict_scalars(module_from_ring(z2()), eps_of(B, vB), name="F2")
    M2 = module_from_ring(B)
    for M in (M1, M2):
        assert der_base_invariance(omega_z4(), unit_into(B), M)
        assert der_base_invariance(om_jet, g_jet, M)
