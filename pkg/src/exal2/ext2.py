"""Two-step extensions of a ring by a module and the butterfly calculus.

A 2-extension of B by M is an exact sequence

    0 -> M -> N -> R -> B -> 0

where g: R -> B is a surjective ring map, N is a crossed R-ring whose
structure map f lands on ker g, and M is the kernel of f. A map between
2-extensions with the same ends is a butterfly: one ring Q carrying two
exact diagonals, one for the source and one for the target. Splittings,
Baer sums, composition and inversion are all constructed explicitly here,
and the classification of 2-extensions (with or without a base structure)
reduces to exact affine solving over the coordinate slots of M.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .crossed import (
    CrossedRing,
    ideal_as_crossed,
    semidirect,
    semidirect_of_crossed,
    validate_crossed,
    zero_crossed,
)
from .errors import (
    AxiomViolation,
    ButterflyViolation,
    NoSection,
    NotAChainMap,
    NotALift,
    NotComposable,
    NotInvertible,
    NotSurjective,
    ShapeMismatch,
    TargetMismatch,
    TooLarge,
    TwoExtViolation,
    UsageError,
)
from .exactlin import AffineSolution, _solve_gf2_packed, solve_affine, subgroup_quotient
from .extn import (
    FactorSystemSpace,
    ModuleLayout,
    SquareZeroExtension,
    VectorLayout,
    exal_classify,
    extension_from_factor_system,
    splittings as one_step_splittings,
    vec_add,
)
from .finring import (
    FiniteModule,
    FiniteRing,
    RingHom,
    _freeze,
    additive_closure,
    fiber_product,
    find_ring_iso,
    identity_hom,
    ideal_generated_by,
    monomial_truncation,
    module_from_ideal,
    product_ring,
    quotient_by_ideal,
    restrict_scalars,
    validate_ring_hom,
)


# ---------------------------------------------------------------- the data


@dataclass(frozen=True)
class TwoExtension:
    """0 -> M -> N -> R -> B -> 0 with N a crossed R-ring.

    embed includes M into N, augment is the surjection g: R -> B. An
    optional base ring A comes with base_to_alg: A -> B; a 2-extension
    counts as one of A-algebras once a_structure holds a splitting of its
    pullback to A (see attach_a_structure).
    """

    alg: FiniteRing
    mod: FiniteModule
    crossed: CrossedRing
    augment: RingHom
    embed: tuple
    base: FiniteRing | None = None
    base_to_alg: RingHom | None = None
    a_structure: object | None = field(default=None, compare=False)
    name: str = field(default="2ext", compare=False)

    @property
    def ring(self):
        return self.crossed.module.ring

    @property
    def nmod(self):
        return self.crossed.module

    def __repr__(self):
        return (
            f"TwoExtension({self.name}: {self.mod.name} -> {self.nmod.name}"
            f" -> {self.ring.name} -> {self.alg.name})"
        )


@dataclass(frozen=True)
class Butterfly:
    """A morphism of 2-extensions: two exact diagonals through one ring.

    i and ip are additive maps from the source and target crossed rings
    into Q; p and pp are ring surjections onto the two middle rings.
    mod_iso and base_iso are the restriction maps on the ends.
    """

    src: TwoExtension
    dst: TwoExtension
    ring: FiniteRing
    i: tuple
    ip: tuple
    p: RingHom
    pp: RingHom
    mod_iso: tuple
    base_iso: RingHom
    name: str = field(default="bfly", compare=False)

    def __repr__(self):
        return f"Butterfly({self.name}: {self.src.name} -> {self.dst.name} via {self.ring.name})"


@dataclass(frozen=True)
class Splitting(Butterfly):
    """A butterfly whose target is the trivial 2-extension."""


def _as_splitting(bf, name=None):
    return Splitting(
        src=bf.src,
        dst=bf.dst,
        ring=bf.ring,
        i=bf.i,
        ip=bf.ip,
        p=bf.p,
        pp=bf.pp,
        mod_iso=bf.mod_iso,
        base_iso=bf.base_iso,
        name=name or bf.name,
    )


def trivial_2extension(B, M, name=None):
    """0 -> M = M -> B = B -> 0: zero crossed structure on M itself."""
    if M.ring != B:
        raise TargetMismatch("module must live over the ring")
    return TwoExtension(
        alg=B,
        mod=M,
        crossed=zero_crossed(M, name=f"0({M.name})"),
        augment=identity_hom(B),
        embed=tuple(range(M.n)),
        name=name or f"triv2({B.name},{M.name})",
    )


def two_extension_from_chain(pi, g, name=None):
    """The 2-extension carried by ring surjections T -pi-> R -g-> B.

    The middle term is N = ker(g . pi) with the R-action through lifts,
    which is well defined exactly when ker(pi) * N = 0 in T; the module
    end is ker(pi) with the induced B-action.
    """
    if pi.dst != g.src:
        raise TargetMismatch("chain maps do not compose")
    T, R, B = pi.src, pi.dst, g.dst
    validate_ring_hom(pi)
    validate_ring_hom(g)
    if not pi.is_surjective() or not g.is_surjective():
        raise NotSurjective("chain maps must be onto")
    gpi = pi.then(g)
    nelems = sorted(gpi.kernel())
    kpi = sorted(pi.kernel())
    for a in kpi:
        for b in nelems:
            if T.mul[a][b] != T.zero:
                raise TwoExtViolation("kernel of the first map does not kill the middle")
    pos = {v: k for k, v in enumerate(nelems)}
    lift_r = [pi.table.index(r) for r in range(R.n)]
    add = [[pos[T.add[a][b]] for b in nelems] for a in nelems]
    nmul = [[pos[T.mul[a][b]] for b in nelems] for a in nelems]
    act = [[pos[T.mul[lift_r[r]][x]] for x in nelems] for r in range(R.n)]
    N = FiniteModule(
        ring=R,
        n=len(nelems),
        add=_freeze(add),
        act=_freeze(act),
        zero=pos[T.zero],
        name=f"ker({g.name}.{pi.name})",
    )
    crossed = CrossedRing(
        module=N, nmul=_freeze(nmul), f=tuple(pi(x) for x in nelems), name=f"cr({T.name})"
    )
    mpos = {v: k for k, v in enumerate(kpi)}
    lift_b = [lift_r[g.table.index(b)] for b in range(B.n)]
    madd = [[mpos[T.add[a][b]] for b in kpi] for a in kpi]
    mact = [[mpos[T.mul[lift_b[b]][x]] for x in kpi] for b in range(B.n)]
    M = FiniteModule(
        ring=B,
        n=len(kpi),
        add=_freeze(madd),
        act=_freeze(mact),
        zero=mpos[T.zero],
        name=f"ker({pi.name})",
    )
    return TwoExtension(
        alg=B,
        mod=M,
        crossed=crossed,
        augment=g,
        embed=tuple(pos[x] for x in kpi),
        name=name or f"chain({T.name})",
    )


def validate_2extension(xi):
    B, M = xi.alg, xi.mod
    N, R = xi.nmod, xi.ring
    g, f, e = xi.augment, xi.crossed.f, xi.embed
    if M.ring != B:
        raise TargetMismatch(f"{xi.name}: module must live over the end ring")
    if g.src != R or g.dst != B:
        raise TargetMismatch(f"{xi.name}: augmentation endpoints are wrong")
    validate_ring_hom(g)
    validate_crossed(xi.crossed)
    if not g.is_surjective():
        raise TwoExtViolation(f"{xi.name}: augmentation is not onto")
    if set(f) != set(g.kernel()):
        raise TwoExtViolation(f"{xi.name}: image of the structure map is not ker(augment)")
    if len(e) != M.n or len(set(e)) != M.n:
        raise TwoExtViolation(f"{xi.name}: embedding is not injective")
    for m in range(M.n):
        for m2 in range(M.n):
            if e[M.add[m][m2]] != N.add[e[m]][e[m2]]:
                raise TwoExtViolation(f"{xi.name}: embedding not additive")
    for r in range(R.n):
        for m in range(M.n):
            if N.act[r][e[m]] != e[M.act[g(r)][m]]:
                raise TwoExtViolation(f"{xi.name}: embedding not equivariant at ({r},{m})")
    if {x for x in range(N.n) if f[x] == R.zero} != set(e):
        raise TwoExtViolation(f"{xi.name}: kernel of the structure map is not the module")
    if xi.base is not None:
        if xi.base_to_alg is None:
            raise UsageError(f"{xi.name}: base ring without base map")
        if xi.base_to_alg.src != xi.base or xi.base_to_alg.dst != B:
            raise TargetMismatch(f"{xi.name}: base map endpoints are wrong")
        validate_ring_hom(xi.base_to_alg)
        if xi.a_structure is not None:
            s = xi.a_structure
            if not isinstance(s, Butterfly):
                raise UsageError(f"{xi.name}: base structure must be a butterfly")
            if s.src != restrict_to_base(xi):
                raise TargetMismatch(f"{xi.name}: base structure does not split the restriction")
            validate_butterfly(s)
    elif xi.a_structure is not None:
        raise UsageError(f"{xi.name}: structure without a base")
    return True


# ----------------------------------------------------------- butterflies


def validate_butterfly(bf):
    """Check the butterfly axioms, numbered for the error messages.

    1 the N'-Q-R' triangle anticommutes (pp . ip = -f')
    2 the N-Q-R triangle commutes (p . i = f)
    3 the cross triangles vanish (p . ip = 0, pp . i = 0)
    4 i and ip are additive
    5 i and ip are equivariant over p and pp
    6 the SW-NE diagonal 0 -> N' -> Q -> R -> 0 is exact
    7 the NW-SE diagonal 0 -> N -> Q -> R' -> 0 is exact
    8 the left wing commutes (i . e = ip . e' . mod_iso)
    9 the right wing commutes (base_iso . g . p = g' . pp)
    10 the restriction maps respect the end structures
    """
    xi, eta = bf.src, bf.dst
    Q = bf.ring
    N, Np = xi.nmod, eta.nmod
    R, Rp = xi.ring, eta.ring
    M, Mp = xi.mod, eta.mod
    if bf.p.src != Q or bf.p.dst != R or bf.pp.src != Q or bf.pp.dst != Rp:
        raise TargetMismatch(f"{bf.name}: diagonal projections are wired wrong")
    if len(bf.i) != N.n or len(bf.ip) != Np.n or len(bf.mod_iso) != M.n:
        raise TargetMismatch(f"{bf.name}: wing tables have wrong lengths")
    if bf.base_iso.src != xi.alg or bf.base_iso.dst != eta.alg:
        raise TargetMismatch(f"{bf.name}: base restriction is wired wrong")
    validate_ring_hom(bf.p)
    validate_ring_hom(bf.pp)
    f, fp = xi.crossed.f, eta.crossed.f
    for y in range(Np.n):
        if bf.pp(bf.ip[y]) != Rp.neg[fp[y]]:
            raise ButterflyViolation(f"{bf.name}: axiom 1: pp(ip({y})) != -f'({y})")
    for x in range(N.n):
        if bf.p(bf.i[x]) != f[x]:
            raise ButterflyViolation(f"{bf.name}: axiom 2: p(i({x})) != f({x})")
    for y in range(Np.n):
        if bf.p(bf.ip[y]) != R.zero:
            raise ButterflyViolation(f"{bf.name}: axiom 3: p(ip({y})) != 0")
    for x in range(N.n):
        if bf.pp(bf.i[x]) != Rp.zero:
            raise ButterflyViolation(f"{bf.name}: axiom 3: pp(i({x})) != 0")
    for x in range(N.n):
        for y in range(N.n):
            if bf.i[N.add[x][y]] != Q.add[bf.i[x]][bf.i[y]]:
                raise ButterflyViolation(f"{bf.name}: axiom 4: i not additive at ({x},{y})")
    for x in range(Np.n):
        for y in range(Np.n):
            if bf.ip[Np.add[x][y]] != Q.add[bf.ip[x]][bf.ip[y]]:
                raise ButterflyViolation(f"{bf.name}: axiom 4: ip not additive at ({x},{y})")
    for q in range(Q.n):
        pq, ppq = bf.p(q), bf.pp(q)
        for x in range(N.n):
            if bf.i[N.act[pq][x]] != Q.mul[q][bf.i[x]]:
                raise ButterflyViolation(f"{bf.name}: axiom 5: i not equivariant at ({q},{x})")
        for y in range(Np.n):
            if bf.ip[Np.act[ppq][y]] != Q.mul[q][bf.ip[y]]:
                raise ButterflyViolation(f"{bf.name}: axiom 5: ip not equivariant at ({q},{y})")
    if not bf.p.is_surjective():
        raise ButterflyViolation(f"{bf.name}: axiom 6: p is not onto")
    if len(set(bf.ip)) != Np.n:
        raise ButterflyViolation(f"{bf.name}: axiom 6: ip is not injective")
    if set(bf.ip) != set(bf.p.kernel()):
        raise ButterflyViolation(f"{bf.name}: axiom 6: SW-NE diagonal not exact")
    if not bf.pp.is_surjective():
        raise ButterflyViolation(f"{bf.name}: axiom 7: pp is not onto")
    if len(set(bf.i)) != N.n:
        raise ButterflyViolation(f"{bf.name}: axiom 7: i is not injective")
    if set(bf.i) != set(bf.pp.kernel()):
        raise ButterflyViolation(f"{bf.name}: axiom 7: NW-SE diagonal not exact")
    for m in range(M.n):
        if bf.i[xi.embed[m]] != bf.ip[eta.embed[bf.mod_iso[m]]]:
            raise ButterflyViolation(f"{bf.name}: axiom 8: left wing breaks at {m}")
    for q in range(Q.n):
        if bf.base_iso(xi.augment(bf.p(q))) != eta.augment(bf.pp(q)):
            raise ButterflyViolation(f"{bf.name}: axiom 9: right wing breaks at {q}")
    validate_ring_hom(bf.base_iso)
    for m in range(M.n):
        for m2 in range(M.n):
            if bf.mod_iso[M.add[m][m2]] != Mp.add[bf.mod_iso[m]][bf.mod_iso[m2]]:
                raise ButterflyViolation(f"{bf.name}: axiom 10: restriction not additive")
    for b in range(xi.alg.n):
        for m in range(M.n):
            if bf.mod_iso[M.act[b][m]] != Mp.act[bf.base_iso(b)][bf.mod_iso[m]]:
                raise ButterflyViolation(f"{bf.name}: axiom 10: restriction not semilinear")
    return True


# ------------------------------------------------------------ chain maps


@dataclass(frozen=True)
class ChainMap:
    """A levelwise map of 2-extensions commuting with all structure."""

    src: TwoExtension
    dst: TwoExtension
    ring_map: RingHom
    n_map: tuple
    mod_map: tuple
    base_map: RingHom
    name: str = field(default="chain", compare=False)


def validate_chain_map(c):
    xi, eta = c.src, c.dst
    N, Np = xi.nmod, eta.nmod
    rho = c.ring_map
    if rho.src != xi.ring or rho.dst != eta.ring:
        raise TargetMismatch(f"{c.name}: ring map endpoints are wrong")
    if c.base_map.src != xi.alg or c.base_map.dst != eta.alg:
        raise TargetMismatch(f"{c.name}: base map endpoints are wrong")
    validate_ring_hom(rho)
    validate_ring_hom(c.base_map)
    n, f, fp = c.n_map, xi.crossed.f, eta.crossed.f
    for x in range(N.n):
        for y in range(N.n):
            if n[N.add[x][y]] != Np.add[n[x]][n[y]]:
                raise NotAChainMap(f"{c.name}: middle map not additive at ({x},{y})")
            if n[xi.crossed.nmul[x][y]] != eta.crossed.nmul[n[x]][n[y]]:
                raise NotAChainMap(f"{c.name}: middle map not multiplicative at ({x},{y})")
    for r in range(xi.ring.n):
        for x in range(N.n):
            if n[N.act[r][x]] != Np.act[rho(r)][n[x]]:
                raise NotAChainMap(f"{c.name}: middle map not semilinear at ({r},{x})")
    for x in range(N.n):
        if fp[n[x]] != rho(f[x]):
            raise NotAChainMap(f"{c.name}: structure square breaks at {x}")
    for r in range(xi.ring.n):
        if eta.augment(rho(r)) != c.base_map(xi.augment(r)):
            raise NotAChainMap(f"{c.name}: augmentation square breaks at {r}")
    M = xi.mod
    for m in range(M.n):
        if n[xi.embed[m]] != eta.embed[c.mod_map[m]]:
            raise NotAChainMap(f"{c.name}: embedding square breaks at {m}")
        for m2 in range(M.n):
            if c.mod_map[M.add[m][m2]] != eta.mod.add[c.mod_map[m]][c.mod_map[m2]]:
                raise NotAChainMap(f"{c.name}: end map not additive")
    for b in range(xi.alg.n):
        for m in range(M.n):
            if c.mod_map[M.act[b][m]] != eta.mod.act[c.base_map(b)][c.mod_map[m]]:
                raise NotAChainMap(f"{c.name}: end map not semilinear at ({b},{m})")
    return True


def identity_chain_map(xi):
    return ChainMap(
        src=xi,
        dst=xi,
        ring_map=identity_hom(xi.ring),
        n_map=tuple(range(xi.nmod.n)),
        mod_map=tuple(range(xi.mod.n)),
        base_map=identity_hom(xi.alg),
        name=f"id({xi.name})",
    )


def chain_map_to_butterfly(c, name=None):
    """The butterfly of a chain map: Q = R |x N' with shifted wings."""
    validate_chain_map(c)
    xi, eta = c.src, c.dst
    R, Rp = xi.ring, eta.ring
    Np = restrict_scalars(eta.nmod, c.ring_map, name=f"{eta.nmod.name}~")
    sd = semidirect(R, Np, eta.crossed.nmul, name=f"{R.name}|x{Np.name}")
    Q = sd.ring
    f, fp = xi.crossed.f, eta.crossed.f
    i = tuple(sd.index[(f[x], Np.neg[c.n_map[x]])] for x in range(xi.nmod.n))
    ip = tuple(sd.index[(R.zero, Np.neg[y])] for y in range(Np.n))
    pp = RingHom(
        src=Q,
        dst=Rp,
        table=tuple(Rp.add[c.ring_map(r)][fp[w]] for (r, w) in sd.pairs),
        name="pp",
    )
    return Butterfly(
        src=xi,
        dst=eta,
        ring=Q,
        i=i,
        ip=ip,
        p=sd.proj,
        pp=pp,
        mod_iso=c.mod_map,
        base_iso=c.base_map,
        name=name or f"bfly({c.name})",
    )


def identity_butterfly(xi):
    return chain_map_to_butterfly(identity_chain_map(xi), name=f"id({xi.name})")


# ------------------------------------------------- compose, invert, 2-cells


def compose(first, second, name=None):
    """Composition across the shared middle 2-extension."""
    if first.dst != second.src:
        raise NotComposable("butterflies do not share the middle 2-extension")
    mid = first.dst
    K = fiber_product(first.pp, second.p)
    seeds = [
        K.index[(first.ip[y], second.ring.neg[second.i[y]])] for y in range(mid.nmod.n)
    ]
    qr = quotient_by_ideal(
        K.ring, sorted(additive_closure(K.ring.add, K.ring.zero, seeds)), name="comp"
    )
    Q = qr.ring
    i = tuple(
        qr.proj(K.index[(first.i[x], second.ring.zero)]) for x in range(first.src.nmod.n)
    )
    ip = tuple(
        qr.proj(K.index[(first.ring.zero, second.ip[z])]) for z in range(second.dst.nmod.n)
    )
    p_table = [None] * Q.n
    pp_table = [None] * Q.n
    for ci, rep in enumerate(qr.reps):
        q1, q2 = K.pairs[rep]
        p_table[ci] = first.p(q1)
        pp_table[ci] = second.pp(q2)
    return Butterfly(
        src=first.src,
        dst=second.dst,
        ring=Q,
        i=i,
        ip=ip,
        p=RingHom(src=Q, dst=first.src.ring, table=tuple(p_table), name="p"),
        pp=RingHom(src=Q, dst=second.dst.ring, table=tuple(pp_table), name="pp"),
        mod_iso=tuple(second.mod_iso[first.mod_iso[m]] for m in range(first.src.mod.n)),
        base_iso=first.base_iso.then(second.base_iso),
        name=name or f"{first.name};{second.name}",
    )


def invert(bf, name=None):
    """Reverse a butterfly; needs invertible restriction maps."""
    if bf.src.mod.n != bf.dst.mod.n or len(set(bf.mod_iso)) != bf.dst.mod.n:
        raise NotInvertible(f"{bf.name}: module restriction is not a bijection")
    if not bf.base_iso.is_bijective():
        raise NotInvertible(f"{bf.name}: base restriction is not a bijection")
    m_inv = [None] * bf.dst.mod.n
    for m, v in enumerate(bf.mod_iso):
        m_inv[v] = m
    Q = bf.ring
    return Butterfly(
        src=bf.dst,
        dst=bf.src,
        ring=Q,
        i=tuple(Q.neg[bf.ip[y]] for y in range(bf.dst.nmod.n)),
        ip=tuple(Q.neg[bf.i[x]] for x in range(bf.src.nmod.n)),
        p=bf.pp,
        pp=bf.p,
        mod_iso=tuple(m_inv),
        base_iso=bf.base_iso.inverse(),
        name=name or f"{bf.name}^-1",
    )


def two_cell_iso(b1, b2):
    """A ring isomorphism identifying two parallel butterflies, or None."""
    if b1.src != b2.src or b1.dst != b2.dst:
        raise ShapeMismatch("butterflies are not parallel")
    if b1.mod_iso != b2.mod_iso or b1.base_iso.table != b2.base_iso.table:
        return None
    forced = {}
    for x in range(b1.src.nmod.n):
        prev = forced.get(b1.i[x])
        if prev is not None and prev != b2.i[x]:
            return None
        forced[b1.i[x]] = b2.i[x]
    for y in range(b1.dst.nmod.n):
        prev = forced.get(b1.ip[y])
        if prev is not None and prev != b2.ip[y]:
            return None
        forced[b1.ip[y]] = b2.ip[y]

    def compatible(a, b):
        return b1.p(a) == b2.p(b) and b1.pp(a) == b2.pp(b)

    return find_ring_iso(b1.ring, b2.ring, forced=forced, elem_filter=compatible)


def butterflies_isomorphic(b1, b2):
    return two_cell_iso(b1, b2) is not None


# ------------------------------------------- pullback, pushout, products


def pullback_2ext(xi, h, name=None):
    """Base change of the ends along h: B0 -> B."""
    if h.dst != xi.alg:
        raise TargetMismatch("pullback map must land in the end ring")
    B0 = h.src
    fp = fiber_product(xi.augment, h, name=f"{xi.ring.name}|{B0.name}")
    N0 = restrict_scalars(xi.nmod, fp.p1, name=f"{xi.nmod.name}~")
    f0 = tuple(fp.index[(xi.crossed.f[x], B0.zero)] for x in range(N0.n))
    crossed0 = CrossedRing(module=N0, nmul=xi.crossed.nmul, f=f0, name=f"{xi.crossed.name}~")
    M0 = restrict_scalars(xi.mod, h, name=f"{xi.mod.name}|{B0.name}")
    return TwoExtension(
        alg=B0,
        mod=M0,
        crossed=crossed0,
        augment=fp.p2,
        embed=xi.embed,
        name=name or f"{xi.name}|{B0.name}",
    )


def _pair_classes(add1, add2, n1, n2, zero1, zero2, relations):
    """Cosets of the subgroup spanned by relation pairs inside a product."""
    span = {(zero1, zero2)}
    frontier = [(zero1, zero2)]
    for s in relations:
        if s not in span:
            span.add(s)
            frontier.append(s)
    while frontier:
        fresh = []
        for a in frontier:
            for b in list(span):
                c = (add1[a[0]][b[0]], add2[a[1]][b[1]])
                if c not in span:
                    span.add(c)
                    fresh.append(c)
        frontier = fresh
    rep = {}
    for a in range(n1):
        for b in range(n2):
            if (a, b) in rep:
                continue
            coset = sorted((add1[a][s0], add2[b][s1]) for s0, s1 in span)
            lead = coset[0]
            for v in coset:
                rep[v] = lead
    classes = sorted(set(rep.values()))
    cindex = {c: i for i, c in enumerate(classes)}
    class_of = {pair: cindex[rep[pair]] for pair in rep}
    return classes, class_of


def pushout_2ext(xi, phi, name=None):
    """Push the module end forward along a linear map phi: M -> M'."""
    if phi.src != xi.mod or phi.link is not None:
        raise TargetMismatch("pushout map must be linear out of the module")
    if phi.dst.ring != xi.alg:
        raise TargetMismatch("pushout target must live over the same ring")
    M, M2 = xi.mod, phi.dst
    N, R = xi.nmod, xi.ring
    relations = [(xi.embed[m], M2.neg[phi(m)]) for m in range(M.n)]
    classes, class_of = _pair_classes(N.add, M2.add, N.n, M2.n, N.zero, M2.zero, relations)
    n = len(classes)
    add = [
        [class_of[(N.add[a0][b0], M2.add[a1][b1])] for (b0, b1) in classes]
        for (a0, a1) in classes
    ]
    act = [
        [class_of[(N.act[r][a0], M2.act[xi.augment(r)][a1])] for (a0, a1) in classes]
        for r in range(R.n)
    ]
    nmod2 = FiniteModule(
        ring=R,
        n=n,
        add=_freeze(add),
        act=_freeze(act),
        zero=class_of[(N.zero, M2.zero)],
        name=f"{N.name}*{phi.name}",
    )
    nmul2 = [
        [class_of[(xi.crossed.nmul[a0][b0], M2.zero)] for (b0, b1) in classes]
        for (a0, a1) in classes
    ]
    f2 = tuple(xi.crossed.f[a0] for (a0, a1) in classes)
    crossed2 = CrossedRing(module=nmod2, nmul=_freeze(nmul2), f=f2, name=f"{xi.crossed.name}*")
    embed2 = tuple(class_of[(N.zero, m2)] for m2 in range(M2.n))
    return TwoExtension(
        alg=xi.alg,
        mod=M2,
        crossed=crossed2,
        augment=xi.augment,
        embed=embed2,
        name=name or f"{xi.name}*{phi.name}",
    )


def negate_2ext(xi, name=None):
    """The additive inverse class: same complex, negated embedding."""
    M = xi.mod
    return TwoExtension(
        alg=xi.alg,
        mod=M,
        crossed=xi.crossed,
        augment=xi.augment,
        embed=tuple(xi.embed[M.neg[m]] for m in range(M.n)),
        name=name or f"-{xi.name}",
    )


def _product_module(ring, rvals, rindex, M1, M2, name):
    pairs = [(m1, m2) for m1 in range(M1.n) for m2 in range(M2.n)]
    index = {v: i for i, v in enumerate(pairs)}
    add = [
        [index[(M1.add[a[0]][b[0]], M2.add[a[1]][b[1]])] for b in pairs] for a in pairs
    ]
    act = [
        [index[(M1.act[rvals[r][0]][a[0]], M2.act[rvals[r][1]][a[1]])] for a in pairs]
        for r in range(ring.n)
    ]
    mod = FiniteModule(
        ring=ring,
        n=len(pairs),
        add=_freeze(add),
        act=_freeze(act),
        zero=index[(M1.zero, M2.zero)],
        name=name,
    )
    return mod, pairs, index


def _product_2ext_parts(x1, x2, name=None):
    Bp, bvals, bindex, _, _ = product_ring(x1.alg, x2.alg, name=f"{x1.alg.name}x{x2.alg.name}")
    Rp, rvals, rindex, _, _ = product_ring(x1.ring, x2.ring, name=f"{x1.ring.name}x{x2.ring.name}")
    M, mpairs, mindex = _product_module(
        Bp, bvals, bindex, x1.mod, x2.mod, f"{x1.mod.name}x{x2.mod.name}"
    )
    N, npairs, nindex = _product_module(
        Rp, rvals, rindex, x1.nmod, x2.nmod, f"{x1.nmod.name}x{x2.nmod.name}"
    )
    nmul = [
        [
            nindex[(x1.crossed.nmul[a[0]][b[0]], x2.crossed.nmul[a[1]][b[1]])]
            for b in npairs
        ]
        for a in npairs
    ]
    f = tuple(rindex[(x1.crossed.f[a[0]], x2.crossed.f[a[1]])] for a in npairs)
    crossed = CrossedRing(module=N, nmul=_freeze(nmul), f=f, name=f"{x1.crossed.name}x")
    augment = RingHom(
        src=Rp,
        dst=Bp,
        table=tuple(bindex[(x1.augment(v[0]), x2.augment(v[1]))] for v in rvals),
        name="gxg",
    )
    embed = tuple(nindex[(x1.embed[a[0]], x2.embed[a[1]])] for a in mpairs)
    xi = TwoExtension(
        alg=Bp,
        mod=M,
        crossed=crossed,
        augment=augment,
        embed=embed,
        name=name or f"{x1.name}x{x2.name}",
    )
    parts = {
        "bvals": bvals,
        "bindex": bindex,
        "rvals": rvals,
        "rindex": rindex,
        "mpairs": mpairs,
        "mindex": mindex,
        "npairs": npairs,
        "nindex": nindex,
    }
    return xi, parts


def product_2ext(x1, x2, name=None):
    return _product_2ext_parts(x1, x2, name=name)[0]


def product_butterfly(b1, b2, name=None):
    """Componentwise butterfly between product 2-extensions."""
    src, sp = _product_2ext_parts(b1.src, b2.src)
    dst, dp = _product_2ext_parts(b1.dst, b2.dst)
    Qp, qvals, qindex, _, _ = product_ring(b1.ring, b2.ring, name=f"{b1.ring.name}x{b2.ring.name}")
    i = tuple(qindex[(b1.i[a[0]], b2.i[a[1]])] for a in sp["npairs"])
    ip = tuple(qindex[(b1.ip[a[0]], b2.ip[a[1]])] for a in dp["npairs"])
    p = RingHom(
        src=Qp,
        dst=src.ring,
        table=tuple(sp["rindex"][(b1.p(v[0]), b2.p(v[1]))] for v in qvals),
        name="p",
    )
    pp = RingHom(
        src=Qp,
        dst=dst.ring,
        table=tuple(dp["rindex"][(b1.pp(v[0]), b2.pp(v[1]))] for v in qvals),
        name="pp",
    )
    mod_iso = tuple(dp["mindex"][(b1.mod_iso[a[0]], b2.mod_iso[a[1]])] for a in sp["mpairs"])
    base_iso = RingHom(
        src=src.alg,
        dst=dst.alg,
        table=tuple(dp["bindex"][(b1.base_iso(v[0]), b2.base_iso(v[1]))] for v in sp["bvals"]),
        name="bxb",
    )
    return Butterfly(
        src=src,
        dst=dst,
        ring=Qp,
        i=i,
        ip=ip,
        p=p,
        pp=pp,
        mod_iso=mod_iso,
        base_iso=base_iso,
        name=name or f"{b1.name}x{b2.name}",
    )


# ------------------------------------------------------------- Baer sums


def _baer_sum_parts(x1, x2, name=None):
    if (x1.alg, x1.mod) != (x2.alg, x2.mod):
        raise ShapeMismatch("Baer sum needs matching ends")
    B, M = x1.alg, x1.mod
    N1, N2 = x1.nmod, x2.nmod
    fp = fiber_product(x1.augment, x2.augment, name=f"{x1.ring.name}+{x2.ring.name}")
    relations = [(x1.embed[m], N2.neg[x2.embed[m]]) for m in range(M.n)]
    classes, class_of = _pair_classes(
        N1.add, N2.add, N1.n, N2.n, N1.zero, N2.zero, relations
    )
    n = len(classes)
    add = [
        [class_of[(N1.add[a0][b0], N2.add[a1][b1])] for (b0, b1) in classes]
        for (a0, a1) in classes
    ]
    act = []
    for rs in range(fp.ring.n):
        r1, r2 = fp.pairs[rs]
        act.append([class_of[(N1.act[r1][a0], N2.act[r2][a1])] for (a0, a1) in classes])
    nmod = FiniteModule(
        ring=fp.ring,
        n=n,
        add=_freeze(add),
        act=_freeze(act),
        zero=class_of[(N1.zero, N2.zero)],
        name=f"{N1.name}(+){N2.name}",
    )
    nmul = [
        [
            class_of[(x1.crossed.nmul[a0][b0], x2.crossed.nmul[a1][b1])]
            for (b0, b1) in classes
        ]
        for (a0, a1) in classes
    ]
    f = tuple(fp.index[(x1.crossed.f[a0], x2.crossed.f[a1])] for (a0, a1) in classes)
    crossed = CrossedRing(module=nmod, nmul=_freeze(nmul), f=f, name=f"{x1.crossed.name}(+)")
    embed = tuple(class_of[(x1.embed[m], N2.zero)] for m in range(M.n))
    xi = TwoExtension(
        alg=B,
        mod=M,
        crossed=crossed,
        augment=fp.p1.then(x1.augment),
        embed=embed,
        name=name or f"{x1.name}(+){x2.name}",
    )
    return xi, fp, classes, class_of


def baer_sum_2ext(x1, x2, name=None):
    """The Baer sum: fiber the middles over B, glue the modules."""
    return _baer_sum_parts(x1, x2, name=name)[0]


def _is_identity_restriction(bf):
    return bf.mod_iso == tuple(range(bf.src.mod.n)) and bf.base_iso.table == tuple(
        range(bf.src.alg.n)
    )


def baer_sum_butterfly(b1, b2, name=None):
    """Baer sum of butterflies over the same ends (identity restrictions)."""
    if not (_is_identity_restriction(b1) and _is_identity_restriction(b2)):
        raise UsageError("Baer sum of butterflies needs identity restrictions")
    if (b1.src.alg, b1.src.mod) != (b2.src.alg, b2.src.mod):
        raise ShapeMismatch("butterflies do not share their ends")
    B, M = b1.src.alg, b1.src.mod
    src_sum, sfp, sclasses, _ = _baer_sum_parts(b1.src, b2.src)
    dst_sum, dfp, dclasses, _ = _baer_sum_parts(b1.dst, b2.dst)
    beta1 = b1.p.then(b1.src.augment)
    beta2 = b2.p.then(b2.src.augment)
    K = fiber_product(beta1, beta2)
    seeds = [
        K.index[(b1.i[b1.src.embed[m]], b2.ring.neg[b2.i[b2.src.embed[m]]])]
        for m in range(M.n)
    ]
    qr = quotient_by_ideal(
        K.ring, sorted(additive_closure(K.ring.add, K.ring.zero, seeds)), name="bsum"
    )
    Q = qr.ring
    i = tuple(qr.proj(K.index[(b1.i[x1], b2.i[x2])]) for (x1, x2) in sclasses)
    ip = tuple(qr.proj(K.index[(b1.ip[y1], b2.ip[y2])]) for (y1, y2) in dclasses)
    p_table = [None] * Q.n
    pp_table = [None] * Q.n
    for ci, rep in enumerate(qr.reps):
        q1, q2 = K.pairs[rep]
        p_table[ci] = sfp.index[(b1.p(q1), b2.p(q2))]
        pp_table[ci] = dfp.index[(b1.pp(q1), b2.pp(q2))]
    return Butterfly(
        src=src_sum,
        dst=dst_sum,
        ring=Q,
        i=i,
        ip=ip,
        p=RingHom(src=Q, dst=src_sum.ring, table=tuple(p_table), name="p"),
        pp=RingHom(src=Q, dst=dst_sum.ring, table=tuple(pp_table), name="pp"),
        mod_iso=tuple(range(M.n)),
        base_iso=identity_hom(B),
        name=name or f"{b1.name}(+){b2.name}",
    )


def _sum_unit_butterfly(xi):
    """The chain-map butterfly xi -> xi + trivial."""
    triv = trivial_2extension(xi.alg, xi.mod)
    total, fp, classes, class_of = _baer_sum_parts(xi, triv)
    rho = RingHom(
        src=xi.ring,
        dst=fp.ring,
        table=tuple(fp.index[(r, xi.augment(r))] for r in range(xi.ring.n)),
        name="unit",
    )
    n_map = tuple(class_of[(x, xi.mod.zero)] for x in range(xi.nmod.n))
    cm = ChainMap(
        src=xi,
        dst=total,
        ring_map=rho,
        n_map=n_map,
        mod_map=tuple(range(xi.mod.n)),
        base_map=identity_hom(xi.alg),
        name=f"unit({xi.name})",
    )
    return chain_map_to_butterfly(cm)


# ---------------------------------------- canonical splitting and shearing


def canonical_self_difference_splitting(xi, name=None):
    """A splitting of xi + (-xi) carried by the semidirect ring R |x N."""
    diff, fp, classes, _ = _baer_sum_parts(xi, negate_2ext(xi))
    R, N, M, B = xi.ring, xi.nmod, xi.mod, xi.alg
    f, e = xi.crossed.f, xi.embed
    sd = semidirect_of_crossed(xi.crossed, name=f"{R.name}|x{N.name}")
    p = RingHom(
        src=sd.ring,
        dst=diff.ring,
        table=tuple(fp.index[(r, R.add[r][f[w]])] for (r, w) in sd.pairs),
        name="p",
    )
    pp = sd.proj.then(xi.augment)
    i = tuple(sd.index[(f[n], N.sub(n2, n))] for (n, n2) in classes)
    ip = tuple(sd.index[(R.zero, N.neg[e[m]])] for m in range(M.n))
    return Splitting(
        src=diff,
        dst=trivial_2extension(B, M),
        ring=sd.ring,
        i=i,
        ip=ip,
        p=p,
        pp=pp,
        mod_iso=tuple(range(M.n)),
        base_iso=identity_hom(B),
        name=name or f"selfdiff({xi.name})",
    )


def shear_iso(g, name=None):
    """The ring isomorphism R x_B R -> R |x ker(g), (r, r') -> (r, r' - r)."""
    R = g.src
    fp = fiber_product(g, g)
    cr = ideal_as_crossed(R, g.kernel(), name=f"ker({g.name})")
    sd = semidirect_of_crossed(cr)
    pos = {elem: k for k, elem in enumerate(cr.f)}
    table = tuple(sd.index[(r, pos[R.sub(r2, r)])] for (r, r2) in fp.pairs)
    iso = RingHom(src=fp.ring, dst=sd.ring, table=table, name=name or "shear")
    return iso, fp, sd


# ------------------------------------------------------- splitting search


class _SparseSystem:
    """Accumulates deduplicated sparse affine rows over a VectorLayout."""

    def __init__(self, layout):
        self.layout = layout
        self.rows = {}

    def equation(self, terms, rhs_vec=None):
        lay = self.layout
        ns = lay.ns
        cells = [dict() for _ in range(ns)]
        for key, act_elem, sign in terms:
            if key is None:
                continue
            base = lay.index[key] * ns
            if act_elem is None:
                for s in range(ns):
                    cells[s][base + s] = cells[s].get(base + s, 0) + sign
            else:
                mat = lay.mlayout.act_matrix(act_elem)
                for s in range(ns):
                    for j in range(ns):
                        if mat[s][j]:
                            col = base + j
                            cells[s][col] = cells[s].get(col, 0) + sign * mat[s][j]
        for s in range(ns):
            modulus = lay.mlayout.slots[s]
            items = tuple(
                sorted((c, v % modulus) for c, v in cells[s].items() if v % modulus)
            )
            rhs = (rhs_vec[s] % modulus) if rhs_vec is not None else 0
            if not items and rhs == 0:
                continue
            self.rows[(items, modulus, rhs)] = None

    def solve(self):
        lay = self.layout
        if lay.n and all(m == 2 for m in lay.moduli):
            # every slot is mod 2, so feed the packed GF(2) solver directly
            entries = list(self.rows)
            A = np.zeros((len(entries), lay.n), dtype=np.uint8)
            b = np.zeros(len(entries), dtype=np.uint8)
            for ri, (items, _, r) in enumerate(entries):
                b[ri] = r & 1
                for c, v in items:
                    A[ri, c] = v & 1
            got = _solve_gf2_packed(A, b)
            if got is None:
                return None
            part, gens, nfree = got
            return AffineSolution(
                moduli=lay.moduli,
                particular=tuple(int(x) for x in part),
                kernel=tuple(tuple(int(x) for x in g) for g in gens if g.any()),
                count=2**nfree,
            )
        rows, rhs, rmod = [], [], []
        for (items, modulus, r) in self.rows:
            row = [0] * lay.n
            for c, v in items:
                row[c] = v
            rows.append(row)
            rhs.append(r)
            rmod.append(modulus)
        return solve_affine(lay.moduli, rows, rhs, rmod)


@dataclass(frozen=True)
class _SplitBundle:
    xi: TwoExtension
    space: FactorSystemSpace
    solution: object


def _split_bundle(xi):
    """The affine system whose solutions are the splittings of xi."""
    R, M, N = xi.ring, xi.mod, xi.nmod
    g, f, e = xi.augment, xi.crossed.f, xi.embed
    Mr = restrict_scalars(M, g, name=f"{M.name}~{R.name}")
    jkeys = [("j", x) for x in range(N.n) if x != N.zero]
    space = FactorSystemSpace(R, Mr, base_hom=None, extra_keys=jkeys)
    sys = _SparseSystem(space.layout)
    add, mul = R.add, R.mul
    dk, ck = space.d_key, space.c_key

    def jk(x):
        return None if x == N.zero else ("j", x)

    for b1 in range(R.n):
        for b2 in range(b1, R.n):
            for b3 in range(R.n):
                sys.equation(
                    [
                        (dk(b1, b2), None, 1),
                        (dk(add[b1][b2], b3), None, 1),
                        (dk(b2, b3), None, -1),
                        (dk(b1, add[b2][b3]), None, -1),
                    ]
                )
                sys.equation(
                    [
                        (dk(b1, b2), b3, 1),
                        (ck(add[b1][b2], b3), None, 1),
                        (ck(b1, b3), None, -1),
                        (ck(b2, b3), None, -1),
                        (dk(mul[b1][b3], mul[b2][b3]), None, -1),
                    ]
                )
                sys.equation(
                    [
                        (ck(b1, b2), b3, 1),
                        (ck(mul[b1][b2], b3), None, 1),
                        (ck(b2, b3), b1, -1),
                        (ck(b1, mul[b2][b3]), None, -1),
                    ]
                )
    for x in range(N.n):
        for y in range(x, N.n):
            sys.equation(
                [
                    (jk(N.add[x][y]), None, 1),
                    (jk(x), None, -1),
                    (jk(y), None, -1),
                    (dk(f[x], f[y]), None, 1),
                ]
            )
    for r in range(R.n):
        for x in range(N.n):
            sys.equation(
                [
                    (jk(N.act[r][x]), None, 1),
                    (jk(x), r, -1),
                    (ck(r, f[x]), None, 1),
                ]
            )
    for m in range(M.n):
        if m == M.zero:
            continue
        sys.equation([(jk(e[m]), None, 1)], rhs_vec=space.mlayout.to_vec(m))
    return _SplitBundle(xi=xi, space=space, solution=sys.solve())


def _splitting_from_vec(xi, bundle, vec, name=None):
    space = bundle.space
    M, N = xi.mod, xi.nmod
    ext = extension_from_factor_system(space, vec, name=f"split({xi.name})")
    T = ext.total
    sec, emb = ext.section, ext.embed

    def jval(x):
        return M.zero if x == N.zero else space.layout.decode_entry(vec, ("j", x))

    i = tuple(T.add[sec[xi.crossed.f[x]]][emb[M.neg[jval(x)]]] for x in range(N.n))
    ip = tuple(emb[M.neg[m]] for m in range(M.n))
    return Splitting(
        src=xi,
        dst=trivial_2extension(xi.alg, xi.mod),
        ring=T,
        i=i,
        ip=ip,
        p=ext.project,
        pp=ext.project.then(xi.augment),
        mod_iso=tuple(range(M.n)),
        base_iso=identity_hom(xi.alg),
        name=name or f"split({xi.name})",
    )


def split_search(xi, name=None):
    """A splitting butterfly of xi, or None.

    Among all solutions of the splitting system, takes the least vector in
    coordinate order when the solution set is small enough to enumerate,
    otherwise the solver's deterministic particular solution.
    """
    bundle = _split_bundle(xi)
    sol = bundle.solution
    if sol is None:
        return None
    try:
        vec = sol.enumerate(cap=2048)[0]
    except TooLarge:
        vec = sol.particular
    return _splitting_from_vec(xi, bundle, vec, name=name)


def _splitting_class_vectors(xi, bundle):
    """One solution vector per 2-isomorphism class of splittings."""
    sol = bundle.solution
    space = bundle.space
    R, M, N = xi.ring, xi.mod, xi.nmod
    f = xi.crossed.f
    gauge = []
    for b0 in space.t_args:
        for j in range(space.mlayout.ns):
            gen = space.mlayout.from_vec(
                tuple(1 if i == j else 0 for i in range(space.mlayout.ns))
            )
            t = tuple(gen if b == b0 else M.zero for b in range(R.n))

            def value(key, t=t):
                if key[0] == "d":
                    _, b1, b2 = key
                    return M.sub(M.add[t[b1]][t[b2]], t[R.add[b1][b2]])
                if key[0] == "c":
                    _, b1, b2 = key
                    s = M.add[M.act[xi.augment(b1)][t[b2]]][M.act[xi.augment(b2)][t[b1]]]
                    return M.sub(s, t[R.mul[b1][b2]])
                _, x = key
                return t[f[x]]

            gauge.append(space.layout.encode(value))
    q = subgroup_quotient(space.layout.moduli, list(sol.kernel), gauge)
    return [vec_add(sol.particular, rep, space.layout.moduli) for _, rep in q.items]


# ----------------------------------------------------- base structures


def restrict_to_base(xi, name=None):
    if xi.base is None:
        raise UsageError(f"{xi.name}: no base to restrict to")
    return pullback_2ext(xi, xi.base_to_alg, name=name or f"{xi.name}|{xi.base.name}")


def with_base_2ext(xi, base_to_alg, name=None):
    """Declare a base ring acting through base_to_alg; clears any structure."""
    if base_to_alg.dst != xi.alg:
        raise TargetMismatch("base map must land in the end ring")
    validate_ring_hom(base_to_alg)
    return replace(
        xi,
        base=base_to_alg.src,
        base_to_alg=base_to_alg,
        a_structure=None,
        name=name or xi.name,
    )


def attach_a_structure(xi, s):
    """Record a splitting of the base restriction as the A-structure."""
    if xi.base is None:
        raise UsageError(f"{xi.name}: no base to carry a structure")
    if not isinstance(s, Butterfly):
        raise UsageError("structure must be a butterfly")
    expected = restrict_to_base(xi)
    if s.src != expected:
        raise TargetMismatch("structure does not split the restriction to the base")
    if s.dst != trivial_2extension(xi.base, expected.mod):
        raise TargetMismatch("structure must land in the trivial 2-extension")
    validate_butterfly(s)
    return replace(xi, a_structure=s)


def a_structure_from_factorization(xi, alpha, name=None):
    """Base structure from a ring lift alpha: A -> R of the base map."""
    if xi.base is None:
        raise UsageError(f"{xi.name}: no base")
    A, g = xi.base, xi.augment
    if alpha.src != A or alpha.dst != xi.ring:
        raise TargetMismatch("lift endpoints are wrong")
    validate_ring_hom(alpha)
    for a in range(A.n):
        if g(alpha(a)) != xi.base_to_alg(a):
            raise NotALift(f"lift disagrees with the base map at {a}")
    xiA = restrict_to_base(xi)
    trivA = trivial_2extension(A, xiA.mod)
    fpA = fiber_product(g, xi.base_to_alg, name=f"{xi.ring.name}|{A.name}")
    rho = RingHom(
        src=A,
        dst=xiA.ring,
        table=tuple(fpA.index[(alpha(a), a)] for a in range(A.n)),
        name="lift",
    )
    cm = ChainMap(
        src=trivA,
        dst=xiA,
        ring_map=rho,
        n_map=xi.embed,
        mod_map=tuple(range(xiA.mod.n)),
        base_map=identity_hom(A),
        name=f"lift({xi.name})",
    )
    s = _as_splitting(invert(chain_map_to_butterfly(cm)), name=name or f"alift({xi.name})")
    return attach_a_structure(xi, s)


def local_split_free_base(xi, generator_lifts, name=None):
    """An absolute splitting from multiplicative lifts of ring generators.

    generator_lifts maps elements of B to preimages in R. The set map is
    closed under both operations; a clash raises NoSection, as does a
    generating set that fails to reach all of B.
    """
    B, R, g = xi.alg, xi.ring, xi.augment
    sigma = {B.zero: R.zero, B.one: R.one}
    for b, r in dict(generator_lifts).items():
        if g(r) != b:
            raise UsageError(f"lift {r} does not sit over {b}")
        if sigma.get(b, r) != r:
            raise NoSection(f"lifts conflict over element {b}")
        sigma[b] = r
    changed = True
    while changed:
        changed = False
        items = list(sigma.items())
        for b1, r1 in items:
            for b2, r2 in items:
                for b3, r3 in (
                    (B.add[b1][b2], R.add[r1][r2]),
                    (B.mul[b1][b2], R.mul[r1][r2]),
                ):
                    prev = sigma.get(b3)
                    if prev is None:
                        sigma[b3] = r3
                        changed = True
                    elif prev != r3:
                        raise NoSection(f"lifts conflict over element {b3}")
    if len(sigma) != B.n:
        missing = [b for b in range(B.n) if b not in sigma]
        raise NoSection(f"generators do not reach elements {missing}")
    rho = RingHom(src=B, dst=R, table=tuple(sigma[b] for b in range(B.n)), name="sect")
    cm = ChainMap(
        src=trivial_2extension(B, xi.mod),
        dst=xi,
        ring_map=rho,
        n_map=xi.embed,
        mod_map=tuple(range(xi.mod.n)),
        base_map=identity_hom(B),
        name=f"sect({xi.name})",
    )
    return _as_splitting(
        invert(chain_map_to_butterfly(cm)), name=name or f"localsplit({xi.name})"
    )


# ---------------------------------------- automorphisms versus extensions


def butterfly_automorphism_to_extension(u, name=None):
    """Read a one-step extension class off a self-butterfly of xi."""
    if u.src != u.dst:
        raise ShapeMismatch("not a self-butterfly")
    if not _is_identity_restriction(u):
        raise UsageError("self-butterfly must fix the ends")
    xi = u.src
    u_sum = baer_sum_butterfly(u, identity_butterfly(negate_2ext(xi)))
    S = canonical_self_difference_splitting(xi)
    W = compose(compose(invert(S), u_sum), S)
    return SquareZeroExtension(
        alg=xi.alg,
        mod=xi.mod,
        total=W.ring,
        embed=W.ip,
        project=W.pp,
        name=name or f"cls({u.name})",
    )


def extension_as_zero_butterfly(V, triv, name=None):
    """A one-step extension of B by M as a self-butterfly of the trivial 2-extension."""
    if V.alg != triv.ring or V.mod.n != triv.mod.n:
        raise ShapeMismatch("extension does not match the trivial 2-extension")
    return Butterfly(
        src=triv,
        dst=triv,
        ring=V.total,
        i=V.embed,
        ip=V.embed,
        p=V.project,
        pp=V.project,
        mod_iso=tuple(range(triv.mod.n)),
        base_iso=identity_hom(triv.alg),
        name=name or f"zb({V.name})",
    )


def extension_to_butterfly_automorphism(xi, V, name=None):
    """The self-butterfly of xi acting through an extension class of B by M."""
    if V.alg != xi.alg or V.mod != xi.mod:
        raise ShapeMismatch("extension does not match the 2-extension ends")
    triv = trivial_2extension(xi.alg, xi.mod)
    mid = baer_sum_butterfly(identity_butterfly(xi), extension_as_zero_butterfly(V, triv))
    left = _sum_unit_butterfly(xi)
    return compose(
        compose(left, mid), invert(left), name=name or f"aut({V.name})"
    )


# ------------------------------------------- structures of sums and diffs


def _restrict_splitting(W, gA):
    """Pull a splitting of chi back to a splitting of chi restricted to A."""
    chi = W.src
    A = gA.src
    chiA = pullback_2ext(chi, gA, name=f"{chi.name}|{A.name}")
    trivA = trivial_2extension(A, chiA.mod)
    K = fiber_product(W.pp, gA)
    fpA = fiber_product(chi.augment, gA, name=f"{chi.ring.name}|{A.name}")
    i = tuple(K.index[(W.i[x], A.zero)] for x in range(chi.nmod.n))
    ip = tuple(K.index[(W.ip[m], A.zero)] for m in range(chi.mod.n))
    p = RingHom(
        src=K.ring,
        dst=chiA.ring,
        table=tuple(fpA.index[(W.p(q), a)] for (q, a) in K.pairs),
        name="p",
    )
    return Splitting(
        src=chiA,
        dst=trivA,
        ring=K.ring,
        i=i,
        ip=ip,
        p=p,
        pp=K.p2,
        mod_iso=tuple(range(chi.mod.n)),
        base_iso=identity_hom(A),
        name=f"{W.name}|{A.name}",
    )


def _negate_splitting(S):
    """Turn a splitting of chi_A into one of (-chi)_A."""
    src = S.src
    M = src.mod
    nsrc = replace(
        src,
        embed=tuple(src.embed[M.neg[m]] for m in range(M.n)),
        name=f"-{src.name}",
    )
    return Splitting(
        src=nsrc,
        dst=S.dst,
        ring=S.ring,
        i=S.i,
        ip=tuple(S.ip[M.neg[m]] for m in range(M.n)),
        p=S.p,
        pp=S.pp,
        mod_iso=S.mod_iso,
        base_iso=S.base_iso,
        name=f"-{S.name}",
    )


def _distribute_butterfly(x1, x2, gA):
    """The chain-map butterfly (x1|_A + x2|_A) -> (x1 + x2)|_A."""
    s, fps, sclasses, sclass_of = _baer_sum_parts(x1, x2)
    s_A = pullback_2ext(s, gA, name=f"{s.name}|{gA.src.name}")
    x1A = pullback_2ext(x1, gA, name=f"{x1.name}|{gA.src.name}")
    x2A = pullback_2ext(x2, gA, name=f"{x2.name}|{gA.src.name}")
    sumA, fpA, aclasses, aclass_of = _baer_sum_parts(x1A, x2A)
    fp1A = fiber_product(x1.augment, gA, name=f"{x1.ring.name}|{gA.src.name}")
    fp2A = fiber_product(x2.augment, gA, name=f"{x2.ring.name}|{gA.src.name}")
    fp_sA = fiber_product(s.augment, gA, name=f"{s.ring.name}|{gA.src.name}")
    rho_table = []
    for (u, v) in fpA.pairs:
        r1, a = fp1A.pairs[u]
        r2, _ = fp2A.pairs[v]
        rho_table.append(fp_sA.index[(fps.index[(r1, r2)], a)])
    rho = RingHom(src=fpA.ring, dst=fp_sA.ring, table=tuple(rho_table), name="distr")
    n_map = tuple(sclass_of[pair] for pair in aclasses)
    cm = ChainMap(
        src=sumA,
        dst=s_A,
        ring_map=rho,
        n_map=n_map,
        mod_map=tuple(range(sumA.mod.n)),
        base_map=identity_hom(gA.src),
        name="distr",
    )
    return chain_map_to_butterfly(cm), s, s_A, sumA


def _sum_with_structures(x1, x2, name=None):
    """Baer sum of based 2-extensions, carrying the summed structure."""
    if (x1.base, x1.base_to_alg) != (x2.base, x2.base_to_alg) or x1.base is None:
        raise ShapeMismatch("based sum needs one shared base")
    if x1.a_structure is None or x2.a_structure is None:
        raise UsageError("based sum needs structures on both terms")
    gA = x1.base_to_alg
    A = x1.base
    D, s, s_A, sumA = _distribute_butterfly(x1, x2, gA)
    bsum = baer_sum_butterfly(x1.a_structure, x2.a_structure)
    trivA = trivial_2extension(A, sumA.mod)
    collapse = invert(_sum_unit_butterfly(trivA))
    U = _as_splitting(compose(compose(invert(D), bsum), collapse), name=f"str({s.name})")
    s_based = replace(s, base=A, base_to_alg=gA, name=name or s.name)
    return attach_a_structure(s_based, U)


def _negate_with_structure(xi, name=None):
    neg = negate_2ext(xi, name=name)
    if xi.base is None:
        return neg
    neg = replace(neg, base=xi.base, base_to_alg=xi.base_to_alg)
    if xi.a_structure is None:
        return neg
    return attach_a_structure(neg, _negate_splitting(xi.a_structure))


def twist_splitting(S, V, name=None):
    """Shift a splitting of chi_A by a one-step extension class of A."""
    chiA = S.src
    trivA = S.dst
    WV = extension_as_zero_butterfly(V, trivA)
    summed = baer_sum_butterfly(S, WV)
    left = _sum_unit_butterfly(chiA)
    right = invert(_sum_unit_butterfly(trivA))
    return _as_splitting(
        compose(compose(left, summed), right), name=name or f"{S.name}+{V.name}"
    )


def splitting_difference_extension(S1, S2, name=None):
    """The one-step extension measuring the gap between two splittings."""
    diff = compose(invert(S1), S2)
    A = S1.dst.ring
    return SquareZeroExtension(
        alg=A,
        mod=S1.dst.mod,
        total=diff.ring,
        embed=diff.ip,
        project=diff.pp,
        name=name or f"gap({S1.name},{S2.name})",
    )


# --------------------------------------------------------- isomorphism


def _based_trivial(chi):
    """Is a based 2-extension (with structure) trivial over its base?"""
    bundle = _split_bundle(chi)
    if bundle.solution is None:
        return False
    U = chi.a_structure
    gA = chi.base_to_alg
    for vec in _splitting_class_vectors(chi, bundle):
        W = _splitting_from_vec(chi, bundle, vec)
        WA = _restrict_splitting(W, gA)
        V = splitting_difference_extension(WA, U)
        if one_step_splittings(V):
            return True
    return False


def isomorphic_2ext(xi, eta):
    """Butterfly-isomorphism of 2-extensions over the same ends.

    Both absolute: some butterfly xi -> eta exists. Both based with
    structures: some butterfly compatible with the structures exists.
    """
    if (xi.alg, xi.mod) != (eta.alg, eta.mod):
        raise ShapeMismatch("2-extensions do not share their ends")
    based = (
        xi.base is not None
        and eta.base is not None
        and xi.a_structure is not None
        and eta.a_structure is not None
    )
    if based and (xi.base, xi.base_to_alg) != (eta.base, eta.base_to_alg):
        raise ShapeMismatch("base structures differ")
    if not based:
        diff = baer_sum_2ext(xi, negate_2ext(eta))
        return _split_bundle(diff).solution is not None
    return _based_trivial(_sum_with_structures(xi, _negate_with_structure(eta)))


# ------------------------------------------------------- classification


def _line_frames(presentation, B):
    """Frames R -> B of order |B|*p cut out by lines of relations."""
    p = presentation.char
    k = presentation.nvars
    rels = presentation.relations
    if not rels:
        return []
    maxdeg = max(sum(exps) for rel in rels for exps, _ in rel)
    D = maxdeg + 1
    basis = [
        exps
        for exps in _exponents_up_to(k, D)
    ]
    P, values, index, basis = monomial_truncation(
        p, tuple(f"x{i}" for i in range(k)), basis, name="frame-poly"
    )
    bpos = {m: i for i, m in enumerate(basis)}

    def poly_elem(rel):
        vec = [0] * len(basis)
        for exps, coef in rel:
            vec[bpos[tuple(exps)]] = (vec[bpos[tuple(exps)]] + coef) % p
        return index[tuple(vec)]

    rel_elems = [poly_elem(r) for r in rels]
    qfull = quotient_by_ideal(P, ideal_generated_by(P, rel_elems), name="B-model")
    iso = find_ring_iso(qfull.ring, B)
    if iso is None:
        raise UsageError("presentation does not present the end ring")
    span = additive_closure(P.add, P.zero, rel_elems)
    lines = {}
    for w in sorted(span):
        if w == P.zero:
            continue
        line = frozenset(additive_closure(P.add, P.zero, [w]))
        lines.setdefault(line, w)
    var_elems = []
    for i in range(k):
        mono = tuple(1 if j == i else 0 for j in range(k))
        vec = [0] * len(basis)
        vec[bpos[mono]] = 1
        var_elems.append(index[tuple(vec)])
    frames = []
    for line, w in sorted(lines.items(), key=lambda kv: kv[1]):
        comp = []
        comp_span = {P.zero}
        for v in sorted(span):
            if v in comp_span:
                continue
            trial = additive_closure(P.add, P.zero, comp + [v])
            if any(x in line and x != P.zero for x in trial):
                continue
            comp.append(v)
            comp_span = trial
        gens = comp + [P.mul[x][w] for x in var_elems]
        qv = quotient_by_ideal(P, ideal_generated_by(P, gens), name=f"line{w}")
        if qv.ring.n != B.n * p:
            continue
        table = tuple(iso(qfull.proj(qv.reps[c])) for c in range(qv.ring.n))
        g = RingHom(src=qv.ring, dst=B, table=table, name=f"g{w}")
        frames.append((qv.ring, g, f"line({w})"))
    return frames


def _exponents_up_to(k, D):
    out = [()]
    for _ in range(k):
        out = [e + (d,) for e in out for d in range(D + 1)]
    return [e for e in out if sum(e) <= D]


def _candidate_frames(B, M, presentation):
    frames = [(B, identity_hom(B), "identity")]
    cls1 = exal_classify(B, M)
    for coords, vec in cls1.reps:
        ext = extension_from_factor_system(cls1.space, vec, name=f"frame{coords}")
        frames.append((ext.total, ext.project, f"extension{coords}"))
    if presentation is not None:
        frames.extend(_line_frames(presentation, B))
    seen = {}
    out = []
    for R, g, label in frames:
        key = (R.add, R.mul, g.table)
        if key in seen:
            continue
        seen[key] = label
        out.append((R, g, label))
    return out


def _frame_candidates(B, M, R, g, label):
    """All 2-extensions with the frame g: R -> B, up to carrier regauging."""
    kelems = sorted(g.kernel())
    pmod, pelems = module_from_ideal(R, kelems, name=f"ker({label})")
    Mr = restrict_scalars(M, g, name=f"{M.name}~{R.name}")
    mlay = ModuleLayout(Mr)
    keys = []
    pnz = [q for q in range(pmod.n) if q != pmod.zero]
    dn_pairs = [(p1, p2) for i, p1 in enumerate(pnz) for p2 in pnz[i:]]
    keys.extend(("dn",) + pair for pair in dn_pairs)
    rargs = [r for r in range(R.n) if r not in (R.zero, R.one)]
    keys.extend(("an", r, q) for r in rargs for q in pnz)
    layout = VectorLayout(keys, mlay)

    def dnk(p1, p2):
        if p1 == pmod.zero or p2 == pmod.zero:
            return None
        return ("dn", min(p1, p2), max(p1, p2))

    def ank(r, q):
        if q == pmod.zero or r in (R.zero, R.one):
            return None
        return ("an", r, q)

    sys = _SparseSystem(layout)
    Padd, Pact = pmod.add, pmod.act
    for p1 in range(pmod.n):
        for p2 in range(p1, pmod.n):
            for p3 in range(pmod.n):
                sys.equation(
                    [
                        (dnk(p1, p2), None, 1),
                        (dnk(Padd[p1][p2], p3), None, 1),
                        (dnk(p2, p3), None, -1),
                        (dnk(p1, Padd[p2][p3]), None, -1),
                    ]
                )
    for r in range(R.n):
        for p1 in range(pmod.n):
            for p2 in range(p1, pmod.n):
                sys.equation(
                    [
                        (ank(r, Padd[p1][p2]), None, 1),
                        (dnk(p1, p2), r, 1),
                        (ank(r, p1), None, -1),
                        (ank(r, p2), None, -1),
                        (dnk(Pact[r][p1], Pact[r][p2]), None, -1),
                    ]
                )
    for r1 in range(R.n):
        for r2 in range(r1, R.n):
            for q in range(pmod.n):
                sys.equation(
                    [
                        (ank(R.add[r1][r2], q), None, 1),
                        (ank(r1, q), None, -1),
                        (ank(r2, q), None, -1),
                        (dnk(Pact[r1][q], Pact[r2][q]), None, -1),
                    ]
                )
    for r1 in range(R.n):
        for r2 in range(R.n):
            for q in range(pmod.n):
                sys.equation(
                    [
                        (ank(R.mul[r1][r2], q), None, 1),
                        (ank(r2, q), r1, -1),
                        (ank(r1, Pact[r2][q]), None, -1),
                    ]
                )
    for p1 in range(pmod.n):
        for p2 in range(p1 + 1, pmod.n):
            sys.equation(
                [
                    (ank(pelems[p1], p2), None, 1),
                    (ank(pelems[p2], p1), None, -1),
                ]
            )
    sol = sys.solve()
    assert sol is not None
    gauge = []
    for q0 in pnz:
        for j in range(mlay.ns):
            gen = mlay.from_vec(tuple(1 if i == j else 0 for i in range(mlay.ns)))
            s = tuple(gen if q == q0 else M.zero for q in range(pmod.n))

            def value(key, s=s):
                if key[0] == "dn":
                    _, p1, p2 = key
                    return M.sub(M.add[s[p1]][s[p2]], s[Padd[p1][p2]])
                _, r, q = key
                return M.sub(M.act[g(r)][s[q]], s[Pact[r][q]])

            gauge.append(layout.encode(value))
    quot = subgroup_quotient(layout.moduli, list(sol.kernel), gauge)
    candidates = []
    for coords, vec in quot.items:
        dn = [[M.zero] * pmod.n for _ in range(pmod.n)]
        for p1, p2 in dn_pairs:
            v = layout.decode_entry(vec, ("dn", p1, p2))
            dn[p1][p2] = v
            dn[p2][p1] = v
        an = [[M.zero] * pmod.n for _ in range(R.n)]
        for r in rargs:
            for q in pnz:
                an[r][q] = layout.decode_entry(vec, ("an", r, q))
        for q in range(pmod.n):
            an[R.one][q] = M.zero
        pairs = [(q, m) for q in range(pmod.n) for m in range(M.n)]
        pindex = {v: i for i, v in enumerate(pairs)}
        nadd = [
            [
                pindex[(Padd[a0][b0], M.add[M.add[a1][b1]][dn[a0][b0]])]
                for (b0, b1) in pairs
            ]
            for (a0, a1) in pairs
        ]
        nact = [
            [
                pindex[(Pact[r][a0], M.add[M.act[g(r)][a1]][an[r][a0]])]
                for (a0, a1) in pairs
            ]
            for r in range(R.n)
        ]
        nmod = FiniteModule(
            ring=R,
            n=len(pairs),
            add=_freeze(nadd),
            act=_freeze(nact),
            zero=pindex[(pmod.zero, M.zero)],
            name=f"N({label}{coords})",
        )
        nmul = [
            [pindex[(Pact[pelems[a0]][b0], an[pelems[a0]][b0])] for (b0, b1) in pairs]
            for (a0, a1) in pairs
        ]
        f = tuple(pelems[a0] for (a0, a1) in pairs)
        crossed = CrossedRing(
            module=nmod, nmul=_freeze(nmul), f=f, name=f"cr({label}{coords})"
        )
        embed = tuple(pindex[(pmod.zero, m)] for m in range(M.n))
        xi = TwoExtension(
            alg=B,
            mod=M,
            crossed=crossed,
            augment=g,
            embed=embed,
            name=f"{label}{coords}",
        )
        validate_2extension(xi)
        candidates.append(xi)
    return candidates


@dataclass(frozen=True)
class Exal2Classification:
    """The set of 2-extension classes of (B, M), with Baer-sum arithmetic."""

    alg: FiniteRing
    mod: FiniteModule
    base: FiniteRing | None
    base_to_alg: RingHom | None
    reps: tuple
    frame_report: str
    candidates: int

    @property
    def size(self):
        return len(self.reps)

    def class_of(self, xi):
        for k, rep in enumerate(self.reps):
            if isomorphic_2ext(xi, rep):
                return k
        raise AxiomViolation("no class matched; the frame family missed this one")

    def add(self, k1, k2):
        a, b = self.reps[k1], self.reps[k2]
        if self.base is None:
            return self.class_of(baer_sum_2ext(a, b))
        return self.class_of(_sum_with_structures(a, b))

    def neg(self, k):
        return self.class_of(_negate_with_structure(self.reps[k]))


def exal2_classify(B, M, base_hom=None, presentation=None, name=None):
    """Classify 2-extensions of B by M, absolutely or over a base.

    The candidate search runs over an explicit frame family (the identity
    frame, the middle rings of all one-step extension classes, and the
    line frames of a presentation when one is given); the report states
    the resulting size bound on the middle rings examined.
    """
    if M.n == 1:
        triv = trivial_2extension(B, M)
        if base_hom is not None:
            triv = replace(triv, base=base_hom.src, base_to_alg=base_hom)
            triv = a_structure_from_factorization(triv, base_hom)
        return Exal2Classification(
            alg=B,
            mod=M,
            base=None if base_hom is None else base_hom.src,
            base_to_alg=base_hom,
            reps=(triv,),
            frame_report="zero module: only the trivial class exists",
            candidates=1,
        )
    frames = _candidate_frames(B, M, presentation)
    candidates = []
    for R, g, label in frames:
        candidates.extend(_frame_candidates(B, M, R, g, label))
    reps = [trivial_2extension(B, M)]
    for cand in candidates:
        if not any(isomorphic_2ext(cand, rep) for rep in reps):
            reps.append(cand)
    based = base_hom is not None
    examined = len(candidates)
    if based:
        A = base_hom.src
        MA = restrict_scalars(M, base_hom, name=f"{M.name}|{A.name}")
        clsA = exal_classify(A, MA)
        expanded = []
        for rep in reps:
            rep_b = replace(rep, base=A, base_to_alg=base_hom)
            S0 = split_search(restrict_to_base(rep_b))
            if S0 is None:
                continue
            for coords, vecV in clsA.reps:
                V = extension_from_factor_system(clsA.space, vecV, name=f"tw{coords}")
                expanded.append(attach_a_structure(rep_b, twist_splitting(S0, V)))
        examined += len(expanded)
        based_reps = []
        for cand in expanded:
            if not any(isomorphic_2ext(cand, rep) for rep in based_reps):
                based_reps.append(cand)
        reps = based_reps
    max_order = max(R.n for R, _, _ in frames)
    report = (
        f"searched {examined} candidates over {len(frames)} frames with middle rings "
        f"of order <= {max_order}; classes needing a larger middle ring would be missed"
    )
    return Exal2Classification(
        alg=B,
        mod=M,
        base=None if base_hom is None else base_hom.src,
        base_to_alg=base_hom,
        reps=tuple(reps),
        frame_report=report,
        candidates=examined,
    )
