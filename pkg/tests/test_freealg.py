import itertools

import pytest

from exal2.errors import (
    DegreeOverflow,
    NoMatch,
    NotSurjective,
    ShapeMismatch,
    UsageError,
)
from exal2.exactlin import solve_affine
from exal2.finring import Zn
from exal2.freealg import (
    CoverReport,
    FiniteSetMap,
    TruncFreeAlgebra,
    degree_slices,
    equalizer_noncover_check,
    format_poly,
    kernel_witness_check,
    module_fiber_lift,
    monoid_fiber_lift,
    monomials,
    ring_fiber_cover_check,
)

X, Y = "x", "y"
XP, YP = "x'", "y'"


def two_to_one():
    f = FiniteSetMap((X, Y), ("t",), ("t", "t"), name="f")
    g = FiniteSetMap((XP, YP), ("t",), ("t", "t"), name="g")
    return f, g


def surjections(src, dst):
    out = []
    for table in itertools.product(dst, repeat=len(src)):
        if set(table) == set(dst):
            out.append(table)
    return out


def test_set_map_basics():
    f = FiniteSetMap((X, Y), ("s", "t"), ("t", "s"))
    assert f(X) == "t" and f(Y) == "s"
    assert f.is_surjective()
    assert f.fiber("t") == (X,)
    thin = FiniteSetMap((X,), ("s", "t"), ("s",))
    assert not thin.is_surjective()
    assert thin.fiber("t") == ()


def test_set_map_guards():
    with pytest.raises(UsageError):
        FiniteSetMap((X, X), ("t",), ("t", "t"))
    with pytest.raises(ShapeMismatch):
        FiniteSetMap((X, Y), ("t",), ("t",))
    with pytest.raises(UsageError):
        FiniteSetMap((X,), ("t",), ("u",))


def test_monomial_counts():
    for n, d in [(1, 3), (2, 2), (3, 3), (4, 1)]:
        letters = tuple(f"g{i}" for i in range(n))
        from math import comb

        assert len(monomials(letters, d)) == comb(n + d - 1, d)
    assert monomials((), 0) == ((),)
    assert monomials((), 2) == ()


def test_algebra_arithmetic_over_z():
    alg = TruncFreeAlgebra(None, (X, Y), 3)
    x, y = alg.var(X), alg.var(Y)
    s = alg.add(x, y)
    sq = alg.mul(s, s)
    assert sq == {(X, X): 1, (X, Y): 2, (Y, Y): 1}
    assert alg.sub(sq, sq) == {}
    assert alg.scale(3, s) == {(X,): 3, (Y,): 3}
    cube = alg.mul(sq, s)
    assert cube[(X, X, Y)] == 3
    with pytest.raises(DegreeOverflow):
        alg.mul(sq, sq)
    with pytest.raises(DegreeOverflow):
        alg.monomials(4)
    with pytest.raises(UsageError):
        alg.var("z")


def test_algebra_arithmetic_over_z4():
    alg = TruncFreeAlgebra(Zn(4), (X,), 4)
    x = alg.var(X)
    two_x = alg.scale(2, x)
    assert alg.add(two_x, two_x) == {}
    sq = alg.mul(two_x, two_x)
    assert sq == {}
    assert alg.one() == {(): 1}


def test_map_letters_merges_images():
    alg = TruncFreeAlgebra(None, (X, Y), 2)
    fold = FiniteSetMap((X, Y), ("t",), ("t", "t"))
    u = {(X,): 1, (Y,): -1}
    assert alg.map_letters(u, fold) == {}
    v = {(X, X): 1, (X, Y): 1}
    assert alg.map_letters(v, fold) == {("t", "t"): 2}


def test_monoid_lift_empty():
    f, g = two_to_one()
    assert monoid_fiber_lift((), (), f, g) == ()


def test_monoid_lift_pairs_sorted():
    f, g = two_to_one()
    m = monoid_fiber_lift((X, Y), (XP, YP), f, g)
    assert m == ((X, XP), (Y, YP))
    # reordering the inputs does not change the lift
    assert monoid_fiber_lift((Y, X), (YP, XP), f, g) == m


def test_monoid_lift_degree_three():
    f, g = two_to_one()
    m = monoid_fiber_lift((X, X, Y), (XP, YP, YP), f, g)
    assert m == ((X, XP), (X, YP), (Y, YP))
    assert tuple(sorted(p[0] for p in m)) == (X, X, Y)
    assert tuple(sorted(p[1] for p in m)) == (XP, YP, YP)


def test_monoid_lift_mismatch():
    f, g = two_to_one()
    with pytest.raises(NoMatch):
        monoid_fiber_lift((X,), (XP, YP), f, g)
    h1 = FiniteSetMap((X, Y), ("s", "t"), ("s", "t"))
    h2 = FiniteSetMap((XP, YP), ("s", "t"), ("t", "t"))
    with pytest.raises(NoMatch):
        monoid_fiber_lift((X,), (XP,), h1, h2)
    with pytest.raises(ShapeMismatch):
        monoid_fiber_lift((X,), (XP,), h1, g)


def test_monoid_lift_projections_exhaustive():
    src = (X, Y, "z")
    f = FiniteSetMap(src, ("s", "t"), ("s", "t", "t"))
    g = FiniteSetMap((XP, YP), ("s", "t"), ("s", "t"))
    for qs in itertools.combinations_with_replacement(src, 2):
        for rs in itertools.combinations_with_replacement((XP, YP), 2):
            qi = tuple(sorted(f(q) for q in qs))
            ri = tuple(sorted(g(r) for r in rs))
            if qi != ri:
                with pytest.raises(NoMatch):
                    monoid_fiber_lift(qs, rs, f, g)
                continue
            m = monoid_fiber_lift(qs, rs, f, g)
            assert tuple(sorted(p[0] for p in m)) == tuple(sorted(qs))
            assert tuple(sorted(p[1] for p in m)) == tuple(sorted(rs))
            for q, r in m:
                assert f(q) == g(r)


def test_module_lift_zero():
    f, g = two_to_one()
    assert module_fiber_lift({}, {}, f, g) == {}


def test_module_lift_matches_chosen_section():
    f, g = two_to_one()
    w = module_fiber_lift({X: 1, Y: -1}, {}, f, g)
    # the leftover first component rides on the least-index preimage x'
    assert w == {(X, XP): 1, (Y, XP): -1}


def test_module_lift_incompatible():
    f, g = two_to_one()
    with pytest.raises(NoMatch):
        module_fiber_lift({X: 1}, {}, f, g)


def test_module_lift_needs_surjections():
    g = FiniteSetMap((XP, YP), ("t",), ("t", "t"))
    empty = FiniteSetMap((), ("t",), ())
    with pytest.raises(NotSurjective):
        module_fiber_lift({}, {XP: 1, YP: -1}, empty, g)


def test_nonliftable_witness_over_empty_side():
    # with Q empty the pair set is empty, so only constants have preimages;
    # (0, x' - y') is a fiber element with no preimage at all
    g = FiniteSetMap((XP, YP), ("t",), ("t", "t"))
    empty = FiniteSetMap((), ("t",), ())
    pairs = [(q, r) for q in empty.source for r in g.source if empty(q) == g(r)]
    assert pairs == []
    target_v = {(XP,): 1, (YP,): -1}
    alg = TruncFreeAlgebra(Zn(4), (), 1)
    for c in range(4):
        cand = alg.const(c)
        proj_v = {m: k for m, k in cand.items() if len(m) == 1}
        assert proj_v != target_v


def test_module_lift_round_trip_exhaustive_z2():
    f, g = two_to_one()
    R2 = Zn(2)
    vecs = []
    for a, b in itertools.product(range(2), repeat=2):
        vecs.append({k: v for k, v in ((X, a), (Y, b)) if v})
    wecs = []
    for a, b in itertools.product(range(2), repeat=2):
        wecs.append({k: v for k, v in ((XP, a), (YP, b)) if v})
    lifted = 0
    for u in vecs:
        for v in wecs:
            if (sum(u.values()) - sum(v.values())) % 2:
                with pytest.raises(NoMatch):
                    module_fiber_lift(u, v, f, g, R2)
                continue
            w = module_fiber_lift(u, v, f, g, R2)
            lifted += 1
            back_u = {}
            back_v = {}
            for (q, r), c in w.items():
                back_u[q] = (back_u.get(q, 0) + c) % 2
                back_v[r] = (back_v.get(r, 0) + c) % 2
            assert {k: c for k, c in back_u.items() if c} == u
            assert {k: c for k, c in back_v.items() if c} == v
    assert lifted == 8


def test_cover_singletons_iso():
    f = FiniteSetMap((X,), ("t",), ("t",))
    g = FiniteSetMap((XP,), ("t",), ("t",))
    cov = ring_fiber_cover_check(Zn(4), f, g, 3)
    assert cov.per_degree == ((0, 1, True), (1, 1, True), (2, 1, True), (3, 1, True))
    assert cov.all_covered()
    # one pair letter, so each degree has exactly one monomial on both sides
    assert cov.pairs == ((X, XP),)


def test_cover_two_over_one_z4():
    f, g = two_to_one()
    cov = ring_fiber_cover_check(Zn(4), f, g, 2)
    assert [(d, n) for d, n, _ in cov.per_degree] == [(0, 1), (1, 3), (2, 5)]
    assert cov.all_covered()


def test_cover_lift_round_trips_mixed_degrees():
    f, g = two_to_one()
    R4 = Zn(4)
    cov = ring_fiber_cover_check(R4, f, g, 2)
    u = {(X, X): 3, (X,): 1, (): 2}
    v = {(XP, XP): 2, (XP, YP): 1, (XP,): 1, (): 2}
    w = cov.lift(u, v)
    alg = TruncFreeAlgebra(R4, cov.pairs, 2)
    first = FiniteSetMap(cov.pairs, (X, Y), tuple(p[0] for p in cov.pairs))
    second = FiniteSetMap(cov.pairs, (XP, YP), tuple(p[1] for p in cov.pairs))
    assert alg.map_letters(w, first) == u
    assert alg.map_letters(w, second) == v


def test_cover_lift_degree_overflow():
    f, g = two_to_one()
    cov = ring_fiber_cover_check(Zn(4), f, g, 1)
    with pytest.raises(DegreeOverflow):
        cov.lift({(X, X): 1}, {(XP, XP): 1})


def test_cover_lift_incompatible_input():
    f, g = two_to_one()
    cov = ring_fiber_cover_check(Zn(4), f, g, 1)
    with pytest.raises(NoMatch):
        cov.lift({(X,): 1}, {})


def test_cover_requires_surjections():
    g = FiniteSetMap((XP, YP), ("s", "t"), ("s", "t"))
    thin = FiniteSetMap((X,), ("s", "t"), ("t",))
    with pytest.raises(NotSurjective):
        ring_fiber_cover_check(Zn(4), thin, g, 1)
    with pytest.raises(ShapeMismatch):
        ring_fiber_cover_check(Zn(4), g, FiniteSetMap((X,), ("u",), ("u",)), 1)


def test_cover_empty_everything():
    e = FiniteSetMap((), (), ())
    cov = ring_fiber_cover_check(None, e, e, 2)
    assert cov.all_covered()
    assert cov.per_degree[0][1] == 1


def test_cover_sweep_all_surjections_z4():
    R4 = Zn(4)
    checked = 0
    for ns in (1, 2, 3):
        s_set = tuple(f"s{i}" for i in range(ns))
        for nq in range(ns, 4):
            q_set = tuple(f"q{i}" for i in range(nq))
            for nr in range(ns, 4):
                r_set = tuple(f"r{i}" for i in range(nr))
                for tf in surjections(q_set, s_set):
                    for tg in surjections(r_set, s_set):
                        fm = FiniteSetMap(q_set, s_set, tf)
                        gm = FiniteSetMap(r_set, s_set, tg)
                        cov = ring_fiber_cover_check(R4, fm, gm, 3)
                        assert cov.all_covered(), (tf, tg)
                        checked += 1
    assert checked == 109


def test_cover_over_integers():
    f, g = two_to_one()
    cov = ring_fiber_cover_check(None, f, g, 3)
    assert cov.all_covered()
    w = cov.lift({(X,): 2, (Y,): -2}, {})
    assert sum(w.values()) == 0


def test_kernel_witness_alternating_square():
    f, g = two_to_one()
    rep = kernel_witness_check(f, g)
    assert rep.found and rep.holds()
    assert rep.anchor == "t"
    assert len(rep.witness) == 4
    assert sorted(rep.witness.values()) == [-1, -1, 1, 1]
    assert format_poly(rep.witness) == "(x,x') - (x,y') - (y,x') + (y,y')"


def test_kernel_witness_needs_two_preimages_per_side():
    g = FiniteSetMap((XP, YP), ("t",), ("t", "t"))
    thin = FiniteSetMap((X,), ("t",), ("t",))
    rep = kernel_witness_check(thin, g)
    assert not rep.found
    assert rep.maps_to_zero
    with pytest.raises(ShapeMismatch):
        kernel_witness_check(thin, FiniteSetMap((XP,), ("u",), ("u",)))


def test_kernel_witness_slice_dimension_mod2():
    # the pair-linear slice for the 2/2/1 shape has a one-dimensional kernel
    pairs = [(q, r) for q in (X, Y) for r in (XP, YP)]
    rows = []
    for q in (X, Y):
        rows.append([1 if p[0] == q else 0 for p in pairs])
    for r in (XP, YP):
        rows.append([1 if p[1] == r else 0 for p in pairs])
    sol = solve_affine((2,) * 4, rows, [0] * 4, (2,) * 4)
    assert sol.count == 2


def test_equalizer_identity_pair_covered():
    h = FiniteSetMap((X, Y), (X, Y), (X, Y))
    rep = equalizer_noncover_check(None, h, h, 2)
    assert rep.equalizer == (X, Y)
    assert rep.covered()
    assert rep.witness == {}


def test_equalizer_swap_over_z():
    h1 = FiniteSetMap((X, Y), (X, Y), (X, Y))
    h2 = FiniteSetMap((X, Y), (X, Y), (Y, X))
    rep = equalizer_noncover_check(None, h1, h2, 1)
    assert rep.equalizer == ()
    assert not rep.covered()
    assert rep.witness == {(X,): 1, (Y,): 1}
    assert format_poly(rep.witness) == "x + y"
    # constants are always covered
    assert rep.per_degree[0][2] is True


def test_equalizer_swap_over_z2_degree_two():
    h1 = FiniteSetMap((X, Y), (X, Y), (X, Y))
    h2 = FiniteSetMap((X, Y), (X, Y), (Y, X))
    rep = equalizer_noncover_check(Zn(2), h1, h2, 2)
    assert not rep.covered()
    _, gens, ok = rep.per_degree[2]
    assert not ok
    assert list(gens) == [{(X, Y): 1}, {(X, X): 1, (Y, Y): 1}]
    assert rep.witness == {(X,): 1, (Y,): 1}


def test_equalizer_guards():
    h1 = FiniteSetMap((X, Y), (X, Y), (X, Y))
    h2 = FiniteSetMap((X,), (X, Y), (Y,))
    with pytest.raises(ShapeMismatch):
        equalizer_noncover_check(None, h1, h2, 1)


def test_degree_slices_partition():
    u = {(): 1, (X,): 2, (X, Y): 3}
    s = degree_slices(u)
    assert set(s) == {0, 1, 2}
    merged = {}
    for part in s.values():
        merged.update(part)
    assert merged == u


def test_format_poly_rendering():
    assert format_poly({}) == "0"
    assert format_poly({(): 1}) == "1"
    assert format_poly({(): -3}) == "-3"
    assert format_poly({(X,): 1, (Y,): -2}) == "x - 2*y"
    assert format_poly({(X, X): 1, (): 5}) == "5 + x*x"
