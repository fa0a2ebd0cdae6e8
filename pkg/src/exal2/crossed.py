"""Crossed rings: a nonunital algebra N with an equivariant map into the base.

A crossed ring over R is an R-module N carrying a commutative associative
R-bilinear multiplication, plus an R-linear map f: N -> R with

    f(x).y = x y        (the crossed identity)

Multiplicativity of f and the symmetry f(x).y = f(y).x are consequences and
are exercised in the tests rather than assumed. Every ideal of R is a
crossed ring via its inclusion, and every module is one via f = 0 and the
zero product. The semidirect ring R + N exists for any nonunital R-algebra
and is unital with unit (1, 0).
"""

from dataclasses import dataclass, field
from itertools import product

from .config import GUARD
from .errors import AxiomViolation, CrossedViolation, TargetMismatch, TooLarge
from .finring import (
    FiniteModule,
    FiniteRing,
    ModuleHom,
    RingHom,
    _freeze,
    module_from_ideal,
    ring_from_ops,
    submodule_spanned,
    validate_module,
)


@dataclass(frozen=True)
class CrossedRing:
    module: FiniteModule
    nmul: tuple  # N x N multiplication table
    f: tuple  # N -> R table
    name: str = field(default="N", compare=False)

    @property
    def ring(self):
        return self.module.ring

    @property
    def n(self):
        return self.module.n

    def __repr__(self):
        return f"CrossedRing({self.name}, n={self.n} over {self.ring.name})"


def validate_nonunital_algebra(module, nmul):
    """Commutative, associative, R-bilinear multiplication on a module."""
    N = module
    n = N.n
    for a in range(n):
        for b in range(n):
            if nmul[a][b] != nmul[b][a]:
                raise AxiomViolation(f"product not commutative at ({a},{b})")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if nmul[nmul[a][b]][c] != nmul[a][nmul[b][c]]:
                    raise AxiomViolation(f"product not associative at ({a},{b},{c})")
                if nmul[N.add[a][b]][c] != N.add[nmul[a][c]][nmul[b][c]]:
                    raise AxiomViolation(f"product not additive at ({a},{b},{c})")
    for r in range(N.ring.n):
        for a in range(n):
            for b in range(n):
                if nmul[N.act[r][a]][b] != N.act[r][nmul[a][b]]:
                    raise AxiomViolation(f"product not bilinear at ({r},{a},{b})")
    return True


def validate_crossed(c):
    """Check the module laws, the algebra laws, linearity of f, and the crossed identity."""
    N, R = c.module, c.ring
    validate_module(N)
    validate_nonunital_algebra(N, c.nmul)
    if len(c.f) != N.n:
        raise CrossedViolation(f"{c.name}: f table has wrong length")
    if c.f[N.zero] != R.zero:
        raise CrossedViolation(f"{c.name}: f(0) != 0")
    for a in range(N.n):
        for b in range(N.n):
            if c.f[N.add[a][b]] != R.add[c.f[a]][c.f[b]]:
                raise CrossedViolation(f"{c.name}: f not additive at ({a},{b})")
    for r in range(R.n):
        for a in range(N.n):
            if c.f[N.act[r][a]] != R.mul[r][c.f[a]]:
                raise CrossedViolation(f"{c.name}: f not linear at ({r},{a})")
    for a in range(N.n):
        for b in range(N.n):
            if N.act[c.f[a]][b] != c.nmul[a][b]:
                raise CrossedViolation(f"{c.name}: crossed identity fails at ({a},{b})")
    return True


def ideal_as_crossed(R, ideal_elems, name=None):
    """An ideal with its inclusion map is a crossed ring over R."""
    mod, elems = module_from_ideal(R, ideal_elems, name=name)
    index = {e: i for i, e in enumerate(elems)}
    nmul = _freeze([[index[R.mul[a][b]] for b in elems] for a in elems])
    f = tuple(elems)
    return CrossedRing(module=mod, nmul=nmul, f=f, name=name or f"({R.name}-ideal)")


def zero_crossed(module, name=None):
    """Any module is a crossed ring with zero product and zero structure map."""
    z = module.zero
    nmul = _freeze([[z] * module.n for _ in range(module.n)])
    f = tuple(module.ring.zero for _ in range(module.n))
    return CrossedRing(module=module, nmul=nmul, f=f, name=name or module.name)


@dataclass(frozen=True)
class Semidirect:
    ring: FiniteRing
    pairs: tuple  # pairs[i] = (r, n)
    index: dict
    embed: RingHom  # r -> (r, 0)
    proj: RingHom  # (r, n) -> r
    mod_in: tuple  # n -> index of (0, n)


def semidirect(R, module, nmul, name=None):
    """The unital ring R + N for a nonunital R-algebra N.

    (r, n)(r', n') = (rr', r.n' + r'.n + nn'). Associativity holds when the
    crossed identity does; validate the result to be sure.
    """
    if module.ring != R:
        raise TargetMismatch("module does not live over the given ring")
    N = module
    pairs = [(r, n) for r in range(R.n) for n in range(N.n)]

    def add_fn(x, y):
        return (R.add[x[0]][y[0]], N.add[x[1]][y[1]])

    def mul_fn(x, y):
        r, n = x
        s, m = y
        mixed = N.add[N.act[r][m]][N.act[s][n]]
        return (R.mul[r][s], N.add[mixed][nmul[n][m]])

    ring, values, index = ring_from_ops(
        pairs, add_fn, mul_fn, (R.zero, N.zero), (R.one, N.zero), name or f"{R.name}+{N.name}"
    )
    embed = RingHom(src=R, dst=ring, table=tuple(index[(r, N.zero)] for r in range(R.n)), name="sect")
    proj = RingHom(src=ring, dst=R, table=tuple(v[0] for v in values), name="proj")
    mod_in = tuple(index[(R.zero, n)] for n in range(N.n))
    return Semidirect(ring=ring, pairs=tuple(values), index=index, embed=embed, proj=proj, mod_in=mod_in)


def semidirect_of_crossed(c, name=None):
    return semidirect(c.ring, c.module, c.nmul, name=name)


def module_generators(M):
    """A small generating list for M over its ring, chosen deterministically."""
    gens = []
    spanned = {M.zero}
    while len(spanned) < M.n:
        g = min(a for a in range(M.n) if a not in spanned)
        gens.append(g)
        spanned = set(submodule_spanned(M, gens))
    return gens


def _expression_table(M, gens):
    """For each element of M, one expression as sum of r_i . g_i, as a tuple over gens."""
    R = M.ring
    k = len(gens)
    expr = {M.zero: tuple(R.zero for _ in range(k))}
    frontier = [M.zero]
    while frontier:
        fresh = []
        for m in frontier:
            base = expr[m]
            for i, g in enumerate(gens):
                for r in range(R.n):
                    m2 = M.add[m][M.act[r][g]]
                    if m2 not in expr:
                        vec = list(base)
                        vec[i] = R.add[vec[i]][r]
                        expr[m2] = tuple(vec)
                        fresh.append(m2)
        frontier = fresh
    if len(expr) != M.n:
        raise AxiomViolation("generators do not span the module")
    return expr


@dataclass(frozen=True)
class BaseChange:
    crossed: CrossedRing
    along: ModuleHom  # canonical map N -> N x_R S, semilinear over the ring map


def base_change(c, h, name=None):
    """Extend scalars of a crossed ring along a ring map h: R -> S.

    Presents N by module generators and the full relation lattice, then
    forms S^k modulo the image of the relations. The product and structure
    map are pushed through chosen expressions; the result is revalidated.
    """
    N, R = c.module, c.ring
    if h.src != R:
        raise TargetMismatch("base change map must start at the crossed ring's base")
    S = h.dst
    gens = module_generators(N)
    k = len(gens)
    if S.n**k > GUARD.max_candidates or R.n**k > GUARD.max_candidates:
        raise TooLarge(f"base change over {k} generators is too large")
    expr = _expression_table(N, gens)

    def s_add(x, y):
        return tuple(S.add[a][b] for a, b in zip(x, y))

    def s_act(s, x):
        return tuple(S.mul[s][a] for a in x)

    zero_vec = tuple(S.zero for _ in range(k))
    # relation lattice: all R-combinations of the generators that vanish in N
    relations = []
    for combo in product(range(R.n), repeat=k):
        m = N.zero
        for r, g in zip(combo, gens):
            m = N.add[m][N.act[r][g]]
        if m == N.zero:
            relations.append(tuple(h(r) for r in combo))
    # span of the relations inside S^k as an S-submodule
    span = {zero_vec}
    frontier = [zero_vec]
    seeds = {s_act(s, rel) for rel in relations for s in range(S.n)}
    for v in seeds:
        if v not in span:
            span.add(v)
            frontier.append(v)
    while frontier:
        fresh = []
        for a in frontier:
            for b in list(span):
                w = s_add(a, b)
                if w not in span:
                    span.add(w)
                    fresh.append(w)
        frontier = fresh
    # cosets of the span
    rep = {}
    for vec in product(range(S.n), repeat=k):
        if vec in rep:
            continue
        coset = sorted(s_add(vec, s) for s in span)
        lead = coset[0]
        for v in coset:
            rep[v] = lead
    classes = sorted(set(rep.values()))
    cindex = {v: i for i, v in enumerate(classes)}
    n2 = len(classes)
    add2 = [[cindex[rep[s_add(a, b)]] for b in classes] for a in classes]
    act2 = [[cindex[rep[s_act(s, a)]] for a in classes] for s in range(S.n)]
    mod2 = FiniteModule(
        ring=S,
        n=n2,
        add=_freeze(add2),
        act=_freeze(act2),
        zero=cindex[rep[zero_vec]],
        name=name or f"{c.name}|{S.name}",
    )
    # product of basis vectors through expressions of g_i g_j
    pairprod = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            e = expr[c.nmul[gens[i]][gens[j]]]
            pairprod[i][j] = tuple(h(r) for r in e)

    def vec_mul(x, y):
        out = zero_vec
        for i in range(k):
            if x[i] == S.zero:
                continue
            for j in range(k):
                if y[j] == S.zero:
                    continue
                coef = S.mul[x[i]][y[j]]
                out = s_add(out, s_act(coef, pairprod[i][j]))
        return out

    nmul2 = [[cindex[rep[vec_mul(a, b)]] for b in classes] for a in classes]
    f2 = []
    for a in classes:
        v = S.zero
        for i in range(k):
            v = S.add[v][S.mul[a[i]][h(c.f[gens[i]])]]
        f2.append(v)
    out = CrossedRing(module=mod2, nmul=_freeze(nmul2), f=tuple(f2), name=name or f"{c.name}|{S.name}")
    validate_crossed(out)
    # canonical map n -> expression(n) pushed through h
    table = []
    for m in range(N.n):
        vec = tuple(h(r) for r in expr[m])
        table.append(cindex[rep[vec]])
    along = ModuleHom(src=N, dst=mod2, table=tuple(table), link=h, name="basechange")
    return BaseChange(crossed=out, along=along)
