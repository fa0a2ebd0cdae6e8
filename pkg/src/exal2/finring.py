"""Explicit finite commutative rings and modules.

A ring is a pair of n x n index tables over elements 0..n-1; a module over
it is an addition table plus an action table. All constructions here
(products, fiber products, ideals, quotients, isomorphism search) stay at
this table level, so every law can be checked by exhaustive sweep.
"""

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from .errors import (
    AxiomViolation,
    NotAnIdeal,
    NotInvertible,
    NotSurjective,
    ShapeMismatch,
    TargetMismatch,
    UsageError,
)
from .exactlin import cyclic_decomposition


def _freeze(table):
    return tuple(tuple(int(x) for x in row) for row in table)


@dataclass(frozen=True)
class FiniteRing:
    n: int
    add: tuple
    mul: tuple
    zero: int
    one: int
    name: str = field(default="R", compare=False)

    @cached_property
    def neg(self):
        out = [None] * self.n
        for a in range(self.n):
            for b in range(self.n):
                if self.add[a][b] == self.zero:
                    out[a] = b
                    break
        if any(v is None for v in out):
            raise AxiomViolation(f"{self.name}: some element has no negative")
        return tuple(out)

    @cached_property
    def coords(self):
        return cyclic_decomposition(self.n, self.add, self.zero)

    @cached_property
    def char(self):
        k, x = 1, self.one
        while x != self.zero:
            x = self.add[x][self.one]
            k += 1
        return k

    @cached_property
    def units(self):
        return tuple(a for a in range(self.n) if self.one in self.mul[a])

    def sub(self, a, b):
        return self.add[a][self.neg[b]]

    def scalar(self, k, a):
        """Additive multiple k*a for an integer k."""
        out, x = self.zero, a
        k = int(k)
        if k < 0:
            x, k = self.neg[a], -k
        while k:
            if k & 1:
                out = self.add[out][x]
            x = self.add[x][x]
            k >>= 1
        return out

    def __repr__(self):
        return f"FiniteRing({self.name}, n={self.n})"


def validate_ring(R):
    """Exhaustively check the commutative unital ring laws."""
    n = R.n
    A = np.array(R.add, dtype=np.int64)
    M = np.array(R.mul, dtype=np.int64)
    if A.shape != (n, n) or M.shape != (n, n):
        raise ShapeMismatch(f"{R.name}: tables must be {n} x {n}")
    if A.min() < 0 or A.max() >= n or M.min() < 0 or M.max() >= n:
        raise AxiomViolation(f"{R.name}: table entry out of range")
    if not (A == A.T).all():
        raise AxiomViolation(f"{R.name}: addition is not commutative")
    if not (M == M.T).all():
        raise AxiomViolation(f"{R.name}: multiplication is not commutative")
    if not (A[R.zero] == np.arange(n)).all():
        raise AxiomViolation(f"{R.name}: zero is not an additive identity")
    if not (M[R.one] == np.arange(n)).all():
        raise AxiomViolation(f"{R.name}: one is not a multiplicative identity")
    for a in range(n):
        if R.zero not in A[a]:
            raise AxiomViolation(f"{R.name}: element {a} has no negative")
    if not (A[A, :] == A[:, A]).all():
        # [a,b,c] entries are (a+b)+c on the left and a+(b+c) on the right
        raise AxiomViolation(f"{R.name}: addition is not associative")
    if not (M[M, :] == M[:, M]).all():
        raise AxiomViolation(f"{R.name}: multiplication is not associative")
    lhs = M[:, A]  # [a,b,c] = a*(b+c)
    rhs = A[M[:, :, None], M[:, None, :]]  # [a,b,c] = a*b + a*c
    if not (lhs == rhs).all():
        raise AxiomViolation(f"{R.name}: distributivity fails")
    return True


@dataclass(frozen=True)
class RingHom:
    src: FiniteRing
    dst: FiniteRing
    table: tuple
    name: str = field(default="f", compare=False)

    def __call__(self, a):
        return self.table[a]

    def then(self, other):
        if other.src != self.dst:
            raise TargetMismatch("cannot compose ring maps with mismatched ends")
        return RingHom(
            src=self.src,
            dst=other.dst,
            table=tuple(other.table[v] for v in self.table),
            name=f"{other.name}.{self.name}",
        )

    def kernel(self):
        return tuple(a for a in range(self.src.n) if self.table[a] == self.dst.zero)

    def image(self):
        return tuple(sorted(set(self.table)))

    def is_surjective(self):
        return len(set(self.table)) == self.dst.n

    def is_bijective(self):
        return self.src.n == self.dst.n and self.is_surjective()

    def inverse(self):
        if not self.is_bijective():
            raise NotInvertible(f"{self.name} is not bijective")
        inv = [0] * self.dst.n
        for a, v in enumerate(self.table):
            inv[v] = a
        return RingHom(src=self.dst, dst=self.src, table=tuple(inv), name=f"{self.name}^-1")


def identity_hom(R):
    return RingHom(src=R, dst=R, table=tuple(range(R.n)), name="id")


def validate_ring_hom(f):
    R, S, t = f.src, f.dst, f.table
    if len(t) != R.n:
        raise ShapeMismatch(f"{f.name}: table length {len(t)}, expected {R.n}")
    if t[R.zero] != S.zero:
        raise AxiomViolation(f"{f.name}: does not send zero to zero")
    if t[R.one] != S.one:
        raise AxiomViolation(f"{f.name}: does not send one to one")
    for a in range(R.n):
        for b in range(R.n):
            if t[R.add[a][b]] != S.add[t[a]][t[b]]:
                raise AxiomViolation(f"{f.name}: not additive at ({a},{b})")
            if t[R.mul[a][b]] != S.mul[t[a]][t[b]]:
                raise AxiomViolation(f"{f.name}: not multiplicative at ({a},{b})")
    return True


@dataclass(frozen=True)
class FiniteModule:
    ring: FiniteRing
    n: int
    add: tuple
    act: tuple  # act[r][m]
    zero: int
    name: str = field(default="M", compare=False)

    @cached_property
    def neg(self):
        out = [None] * self.n
        for a in range(self.n):
            for b in range(self.n):
                if self.add[a][b] == self.zero:
                    out[a] = b
                    break
        if any(v is None for v in out):
            raise AxiomViolation(f"{self.name}: some element has no negative")
        return tuple(out)

    @cached_property
    def coords(self):
        return cyclic_decomposition(self.n, self.add, self.zero)

    def sub(self, a, b):
        return self.add[a][self.neg[b]]

    def scalar(self, k, a):
        out, x = self.zero, a
        k = int(k)
        if k < 0:
            x, k = self.neg[a], -k
        while k:
            if k & 1:
                out = self.add[out][x]
            x = self.add[x][x]
            k >>= 1
        return out

    def __repr__(self):
        return f"FiniteModule({self.name}, n={self.n} over {self.ring.name})"


def validate_module(M):
    R = M.ring
    A = np.array(M.add, dtype=np.int64)
    T = np.array(M.act, dtype=np.int64)
    n = M.n
    if A.shape != (n, n) or T.shape != (R.n, n):
        raise ShapeMismatch(f"{M.name}: bad table shapes")
    if not (A == A.T).all():
        raise AxiomViolation(f"{M.name}: addition is not commutative")
    if not (A[M.zero] == np.arange(n)).all():
        raise AxiomViolation(f"{M.name}: zero is not an identity")
    if not (A[A, :] == A[:, A]).all():
        raise AxiomViolation(f"{M.name}: addition is not associative")
    for a in range(n):
        if M.zero not in A[a]:
            raise AxiomViolation(f"{M.name}: element {a} has no negative")
    if not (T[R.one] == np.arange(n)).all():
        raise AxiomViolation(f"{M.name}: unit does not act as identity")
    # r.(m+m') = r.m + r.m'
    if not (T[:, A] == A[T[:, :, None], T[:, None, :]]).all():
        raise AxiomViolation(f"{M.name}: action is not additive in the module")
    Radd = np.array(R.add, dtype=np.int64)
    Rmul = np.array(R.mul, dtype=np.int64)
    # (r+r').m = r.m + r'.m
    if not (T[Radd, :] == A[T[:, None, :], T[None, :, :]]).all():
        raise AxiomViolation(f"{M.name}: action is not additive in the ring")
    # (r r').m = r.(r'.m)
    lhs = T[Rmul, :]
    rhs = np.empty_like(lhs)
    for r in range(R.n):
        rhs[r] = T[r][T]
    if not (lhs == rhs).all():
        raise AxiomViolation(f"{M.name}: action is not associative")
    return True


@dataclass(frozen=True)
class ModuleHom:
    """Additive map compatible with the actions, possibly across a ring map.

    With link None both modules live over the same ring and the map is
    linear; otherwise dst is a module over link.dst and
    phi(r.m) = link(r).phi(m).
    """

    src: FiniteModule
    dst: FiniteModule
    table: tuple
    link: RingHom | None = None
    name: str = field(default="phi", compare=False)

    def __call__(self, m):
        return self.table[m]

    def then(self, other):
        if other.src != self.dst:
            raise TargetMismatch("cannot compose module maps with mismatched ends")
        if self.link is not None and other.link is not None:
            link = self.link.then(other.link)
        else:
            link = self.link or other.link
        return ModuleHom(
            src=self.src,
            dst=other.dst,
            table=tuple(other.table[v] for v in self.table),
            link=link,
            name=f"{other.name}.{self.name}",
        )

    def kernel_elements(self):
        return tuple(m for m in range(self.src.n) if self.table[m] == self.dst.zero)

    def image_elements(self):
        return tuple(sorted(set(self.table)))

    def is_bijective(self):
        return self.src.n == self.dst.n and len(set(self.table)) == self.dst.n

    def inverse(self):
        if not self.is_bijective():
            raise NotInvertible(f"{self.name} is not bijective")
        inv = [0] * self.dst.n
        for a, v in enumerate(self.table):
            inv[v] = a
        link = self.link.inverse() if self.link is not None else None
        return ModuleHom(src=self.dst, dst=self.src, table=tuple(inv), link=link, name=f"{self.name}^-1")


def identity_module_hom(M):
    return ModuleHom(src=M, dst=M, table=tuple(range(M.n)), name="id")


def validate_module_hom(phi):
    M, N, t = phi.src, phi.dst, phi.table
    if len(t) != M.n:
        raise ShapeMismatch(f"{phi.name}: table length {len(t)}, expected {M.n}")
    if phi.link is None and M.ring != N.ring:
        raise TargetMismatch(f"{phi.name}: modules live over different rings")
    if phi.link is not None and (phi.link.src != M.ring or phi.link.dst != N.ring):
        raise TargetMismatch(f"{phi.name}: link does not match the module rings")
    for a in range(M.n):
        for b in range(M.n):
            if t[M.add[a][b]] != N.add[t[a]][t[b]]:
                raise AxiomViolation(f"{phi.name}: not additive at ({a},{b})")
    for r in range(M.ring.n):
        rr = r if phi.link is None else phi.link(r)
        for m in range(M.n):
            if t[M.act[r][m]] != N.act[rr][t[m]]:
                raise AxiomViolation(f"{phi.name}: not equivariant at ({r},{m})")
    return True


# ---------------------------------------------------------------- builders


def ring_from_ops(values, add_fn, mul_fn, zero_v, one_v, name):
    """Index a finite set of hashable values with explicit operations."""
    values = list(values)
    index = {v: i for i, v in enumerate(values)}
    if len(index) != len(values):
        raise UsageError(f"{name}: duplicate carrier values")
    n = len(values)
    add = [[index[add_fn(values[a], values[b])] for b in range(n)] for a in range(n)]
    mul = [[index[mul_fn(values[a], values[b])] for b in range(n)] for a in range(n)]
    ring = FiniteRing(
        n=n,
        add=_freeze(add),
        mul=_freeze(mul),
        zero=index[zero_v],
        one=index[one_v],
        name=name,
    )
    return ring, values, index


def Zn(n, name=None):
    ring, _, _ = ring_from_ops(
        range(n),
        lambda a, b: (a + b) % n,
        lambda a, b: (a * b) % n,
        0,
        1 % n,
        name or f"Z{n}",
    )
    return ring


def product_ring(R, S, name=None):
    """Direct product; returns (ring, pairs, index, p1, p2)."""
    pairs = [(a, b) for a in range(R.n) for b in range(S.n)]
    ring, values, index = ring_from_ops(
        pairs,
        lambda x, y: (R.add[x[0]][y[0]], S.add[x[1]][y[1]]),
        lambda x, y: (R.mul[x[0]][y[0]], S.mul[x[1]][y[1]]),
        (R.zero, S.zero),
        (R.one, S.one),
        name or f"{R.name}x{S.name}",
    )
    p1 = RingHom(src=ring, dst=R, table=tuple(v[0] for v in values), name="pr1")
    p2 = RingHom(src=ring, dst=S, table=tuple(v[1] for v in values), name="pr2")
    return ring, values, index, p1, p2


@dataclass(frozen=True)
class FiberedRing:
    ring: FiniteRing
    pairs: tuple  # pairs[i] = (a, b) with f(a) == g(b)
    index: dict
    p1: RingHom
    p2: RingHom


def fiber_product(f, g, name=None):
    """Pairs (a, b) with f(a) == g(b), under componentwise operations."""
    if f.dst != g.dst:
        raise TargetMismatch("fiber product needs a common target")
    R, S = f.src, g.src
    pairs = [(a, b) for a in range(R.n) for b in range(S.n) if f(a) == g(b)]
    ring, values, index = ring_from_ops(
        pairs,
        lambda x, y: (R.add[x[0]][y[0]], S.add[x[1]][y[1]]),
        lambda x, y: (R.mul[x[0]][y[0]], S.mul[x[1]][y[1]]),
        (R.zero, S.zero),
        (R.one, S.one),
        name or f"{R.name}x_{f.dst.name}{S.name}",
    )
    p1 = RingHom(src=ring, dst=R, table=tuple(v[0] for v in values), name="pr1")
    p2 = RingHom(src=ring, dst=S, table=tuple(v[1] for v in values), name="pr2")
    return FiberedRing(ring=ring, pairs=tuple(values), index=index, p1=p1, p2=p2)


def additive_closure(add, zero, seed):
    seen = {zero}
    frontier = [zero]
    for s in seed:
        if s not in seen:
            seen.add(s)
            frontier.append(s)
    while frontier:
        fresh = []
        for a in frontier:
            for b in list(seen):
                c = add[a][b]
                if c not in seen:
                    seen.add(c)
                    fresh.append(c)
        frontier = fresh
    return seen


def ideal_generated_by(R, gens):
    """Smallest ideal of R containing gens, as a sorted element tuple."""
    seed = {R.mul[r][g] for g in gens for r in range(R.n)}
    return tuple(sorted(additive_closure(R.add, R.zero, seed)))


def is_ideal(R, elems):
    s = set(elems)
    if R.zero not in s:
        return False
    for a in elems:
        for b in elems:
            if R.add[a][b] not in s:
                return False
        for r in range(R.n):
            if R.mul[r][a] not in s:
                return False
        if R.neg[a] not in s:
            return False
    return True


@dataclass(frozen=True)
class QuotientRing:
    ring: FiniteRing
    proj: RingHom
    reps: tuple  # class index -> representative element upstairs


def quotient_by_ideal(R, ideal_elems, name=None):
    ideal_elems = tuple(sorted(set(ideal_elems)))
    if not is_ideal(R, ideal_elems):
        raise NotAnIdeal(f"{list(ideal_elems)} is not an ideal of {R.name}")
    iset = list(ideal_elems)
    rep = [None] * R.n
    for a in range(R.n):
        if rep[a] is not None:
            continue
        coset = sorted(R.add[a][i] for i in iset)
        lead = coset[0]
        for c in coset:
            rep[c] = lead
    classes = sorted(set(rep))
    cindex = {c: i for i, c in enumerate(classes)}
    n = len(classes)
    add = [[cindex[rep[R.add[a][b]]] for b in classes] for a in classes]
    mul = [[cindex[rep[R.mul[a][b]]] for b in classes] for a in classes]
    ring = FiniteRing(
        n=n,
        add=_freeze(add),
        mul=_freeze(mul),
        zero=cindex[rep[R.zero]],
        one=cindex[rep[R.one]],
        name=name or f"{R.name}/I",
    )
    proj = RingHom(src=R, dst=ring, table=tuple(cindex[rep[a]] for a in range(R.n)), name="proj")
    return QuotientRing(ring=ring, proj=proj, reps=tuple(classes))


# ------------------------------------------------------- polynomial models


def monomial_truncation(char, variables, basis_monomials, name=None):
    """Quotient of Z/char[variables] by the span of all monomials off the basis.

    basis_monomials are exponent tuples and must be closed under divisors,
    so that the discarded monomials form an ideal. Elements are coefficient
    vectors over the basis.
    """
    k = len(variables)
    basis = [tuple(m) for m in basis_monomials]
    bset = set(basis)
    for m in basis:
        if len(m) != k:
            raise UsageError("monomial arity does not match the variables")
        for i in range(k):
            if m[i] > 0:
                low = tuple(e - (1 if j == i else 0) for j, e in enumerate(m))
                if low not in bset:
                    raise UsageError(f"basis is not divisor closed at {m}")
    bindex = {m: i for i, m in enumerate(basis)}
    nb = len(basis)

    def add_fn(x, y):
        return tuple((a + b) % char for a, b in zip(x, y))

    def mul_fn(x, y):
        out = [0] * nb
        for i, ci in enumerate(x):
            if ci == 0:
                continue
            for j, cj in enumerate(y):
                if cj == 0:
                    continue
                m = tuple(a + b for a, b in zip(basis[i], basis[j]))
                if m in bindex:
                    t = bindex[m]
                    out[t] = (out[t] + ci * cj) % char
        return tuple(out)

    elems = [tuple(v) for v in product(range(char), repeat=nb)]
    zero_v = tuple([0] * nb)
    one_m = tuple([0] * k)
    if one_m not in bindex:
        raise UsageError("basis must contain the constant monomial")
    one_v = tuple(1 if i == bindex[one_m] else 0 for i in range(nb))
    ring, values, index = ring_from_ops(
        elems, add_fn, mul_fn, zero_v, one_v, name or "trunc"
    )
    return ring, values, index, basis


def univariate_quotient(char, modulus, name=None):
    """Z/char[x] modulo a monic polynomial; modulus lists coefficients low to high."""
    if modulus[-1] != 1:
        raise UsageError("modulus must be monic")
    d = len(modulus) - 1

    def reduce_poly(cs):
        cs = [c % char for c in cs]
        while len(cs) > d:
            lead = cs.pop()
            if lead:
                for i in range(len(modulus) - 1):
                    cs[len(cs) - d + i] = (cs[len(cs) - d + i] - lead * modulus[i]) % char
        while len(cs) < d:
            cs.append(0)
        return tuple(cs)

    def add_fn(x, y):
        return tuple((a + b) % char for a, b in zip(x, y))

    def mul_fn(x, y):
        out = [0] * (2 * d - 1) if d > 0 else [0]
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        out[i + j] = (out[i + j] + a * b) % char
        return reduce_poly(out)

    elems = [tuple(v) for v in product(range(char), repeat=d)]
    zero_v = tuple([0] * d)
    one_v = tuple(1 if i == 0 else 0 for i in range(d)) if d > 0 else tuple()
    ring, values, index = ring_from_ops(elems, add_fn, mul_fn, zero_v, one_v, name or "poly")
    return ring, values, index


# ----------------------------------------------------------------- modules


def module_from_ring(R, name=None):
    """R as a module over itself."""
    return FiniteModule(ring=R, n=R.n, add=R.add, act=R.mul, zero=R.zero, name=name or R.name)


def module_from_ideal(R, ideal_elems, name=None):
    """An ideal of R as an R-module; returns (module, element list into R)."""
    elems = tuple(sorted(set(ideal_elems)))
    if not is_ideal(R, elems):
        raise NotAnIdeal(f"{list(elems)} is not an ideal of {R.name}")
    index = {e: i for i, e in enumerate(elems)}
    add = [[index[R.add[a][b]] for b in elems] for a in elems]
    act = [[index[R.mul[r][a]] for a in elems] for r in range(R.n)]
    mod = FiniteModule(
        ring=R,
        n=len(elems),
        add=_freeze(add),
        act=_freeze(act),
        zero=index[R.zero],
        name=name or f"({R.name}-ideal)",
    )
    return mod, elems


def restrict_scalars(M, f, name=None):
    """Turn a module over f.dst into one over f.src through f."""
    if M.ring != f.dst:
        raise TargetMismatch("module does not live over the target of the map")
    act = tuple(M.act[f(r)] for r in range(f.src.n))
    return FiniteModule(ring=f.src, n=M.n, add=M.add, act=act, zero=M.zero, name=name or M.name)


def submodule_spanned(M, elems):
    """Closure of elems under addition and the ring action, as a sorted tuple."""
    seed = {M.act[r][m] for m in elems for r in range(M.ring.n)} | set(elems)
    return tuple(sorted(additive_closure(M.add, M.zero, seed)))


@dataclass(frozen=True)
class SubModule:
    module: FiniteModule
    include: ModuleHom


def submodule(M, elems, name=None):
    elems = tuple(sorted(set(elems) | {M.zero}))
    eset = set(elems)
    for a in elems:
        for b in elems:
            if M.add[a][b] not in eset:
                raise AxiomViolation("not closed under addition")
        for r in range(M.ring.n):
            if M.act[r][a] not in eset:
                raise AxiomViolation("not closed under the action")
    index = {e: i for i, e in enumerate(elems)}
    add = [[index[M.add[a][b]] for b in elems] for a in elems]
    act = [[index[M.act[r][a]] for a in elems] for r in range(M.ring.n)]
    sub = FiniteModule(
        ring=M.ring,
        n=len(elems),
        add=_freeze(add),
        act=_freeze(act),
        zero=index[M.zero],
        name=name or f"{M.name}-sub",
    )
    inc = ModuleHom(src=sub, dst=M, table=elems, name="incl")
    return SubModule(module=sub, include=inc)


@dataclass(frozen=True)
class QuotientModule:
    module: FiniteModule
    proj: ModuleHom
    reps: tuple


def quotient_module(M, sub_elems, name=None):
    sub_elems = submodule_spanned(M, sub_elems)
    sset = list(sub_elems)
    rep = [None] * M.n
    for a in range(M.n):
        if rep[a] is not None:
            continue
        coset = sorted(M.add[a][s] for s in sset)
        lead = coset[0]
        for c in coset:
            rep[c] = lead
    classes = sorted(set(rep))
    cindex = {c: i for i, c in enumerate(classes)}
    add = [[cindex[rep[M.add[a][b]]] for b in classes] for a in classes]
    act = [[cindex[rep[M.act[r][a]]] for a in classes] for r in range(M.ring.n)]
    mod = FiniteModule(
        ring=M.ring,
        n=len(classes),
        add=_freeze(add),
        act=_freeze(act),
        zero=cindex[rep[M.zero]],
        name=name or f"{M.name}/sub",
    )
    proj = ModuleHom(src=M, dst=mod, table=tuple(cindex[rep[a]] for a in range(M.n)), name="proj")
    return QuotientModule(module=mod, proj=proj, reps=tuple(classes))


def exact_at(incoming, outgoing):
    """Is image(incoming) == kernel(outgoing)? Both are maps of modules."""
    if incoming.dst != outgoing.src:
        raise TargetMismatch("maps do not share the middle module")
    return set(incoming.image_elements()) == set(outgoing.kernel_elements())


# -------------------------------------------------------------- iso search


def _ring_profile(R):
    prof = []
    for a in range(R.n):
        add_ord = 1
        x = a
        while x != R.zero:
            x = R.add[x][a]
            add_ord += 1
        sq = R.mul[a][a]
        prof.append(
            (
                add_ord,
                a == R.one,
                a in R.units,
                len(set(R.mul[a])),
                sq == R.zero,
                sq == a,
            )
        )
    return prof


def _generators(R):
    closed = additive_closure(R.add, R.zero, {R.one})
    closed = _op_closure(R, closed)
    gens = []
    while len(closed) < R.n:
        g = min(a for a in range(R.n) if a not in closed)
        gens.append(g)
        closed = _op_closure(R, closed | {g})
    return gens


def _op_closure(R, seed):
    seen = set(seed) | {R.zero, R.one}
    frontier = list(seen)
    while frontier:
        fresh = []
        for a in frontier:
            for b in list(seen):
                for c in (R.add[a][b], R.mul[a][b], R.neg[a]):
                    if c not in seen:
                        seen.add(c)
                        fresh.append(c)
        frontier = fresh
    return seen


def find_ring_iso(R, S, forced=None, elem_filter=None):
    """Search for a ring isomorphism R -> S; None if there is none.

    forced pins chosen images; elem_filter(a, b) can veto candidate pairs.
    """
    if R.n != S.n:
        return None
    profR = _ring_profile(R)
    profS = _ring_profile(S)
    if sorted(profR) != sorted(profS):
        return None
    forced = dict(forced or {})
    forced[R.zero] = S.zero
    forced[R.one] = S.one

    def extend(partial):
        # close partial under both operations; None on conflict
        table = dict(partial)
        frontier = list(table)
        while frontier:
            fresh = []
            known = list(table.items())
            for a in frontier:
                for b, fb in known:
                    fa = table[a]
                    for c, fc in (
                        (R.add[a][b], S.add[fa][fb]),
                        (R.mul[a][b], S.mul[fa][fb]),
                        (R.neg[a], S.neg[fa]),
                    ):
                        prev = table.get(c)
                        if prev is None:
                            table[c] = fc
                            fresh.append(c)
                        elif prev != fc:
                            return None
            frontier = fresh
        vals = set(table.values())
        if len(vals) != len(table):
            return None
        for a, fa in table.items():
            if profR[a] != profS[fa]:
                return None
            if elem_filter is not None and not elem_filter(a, fa):
                return None
        return table

    base = extend(forced)
    if base is None:
        return None
    gens = [g for g in _generators(R) if g not in base]

    def search(table):
        missing = [a for a in range(R.n) if a not in table]
        if not missing:
            return table
        a = None
        for g in gens:
            if g not in table:
                a = g
                break
        if a is None:
            a = missing[0]
        used = set(table.values())
        for b in range(S.n):
            if b in used or profS[b] != profR[a]:
                continue
            if elem_filter is not None and not elem_filter(a, b):
                continue
            nxt = extend({**table, a: b})
            if nxt is None:
                continue
            got = search(nxt)
            if got is not None:
                return got
        return None

    table = search(base)
    if table is None:
        return None
    return RingHom(src=R, dst=S, table=tuple(table[a] for a in range(R.n)), name="iso")


# ----------------------------------------------------------------- presets


def F4():
    ring, _, _ = univariate_quotient(2, [1, 1, 1], name="F4")
    return ring


def preset_ring(name):
    builders = {
        "Z2": lambda: Zn(2),
        "Z3": lambda: Zn(3),
        "Z4": lambda: Zn(4),
        "Z6": lambda: Zn(6),
        "Z8": lambda: Zn(8),
        "Z9": lambda: Zn(9),
        "F4": F4,
        "Z2xZ2": lambda: product_ring(Zn(2), Zn(2), name="Z2xZ2")[0],
        "F2[x]/(x^2)": lambda: univariate_quotient(2, [0, 0, 1], name="F2[x]/(x^2)")[0],
        "F2[x]/(x^3)": lambda: univariate_quotient(2, [0, 0, 0, 1], name="F2[x]/(x^3)")[0],
        "F2[x]/(x^4)": lambda: univariate_quotient(2, [0, 0, 0, 0, 1], name="F2[x]/(x^4)")[0],
        "F3[x]/(x^2)": lambda: univariate_quotient(3, [0, 0, 1], name="F3[x]/(x^2)")[0],
        "F2[x,y]/(x^2,xy,y^2)": lambda: monomial_truncation(
            2, ("x", "y"), [(0, 0), (1, 0), (0, 1)], name="F2[x,y]/(x^2,xy,y^2)"
        )[0],
    }
    if name not in builders:
        raise UsageError(f"unknown ring preset {name!r}; known: {sorted(builders)}")
    return builders[name]()


PRESET_RING_NAMES = (
    "Z2",
    "Z3",
    "Z4",
    "Z6",
    "Z8",
    "Z9",
    "F4",
    "Z2xZ2",
    "F2[x]/(x^2)",
    "F2[x]/(x^3)",
    "F2[x]/(x^4)",
    "F3[x]/(x^2)",
    "F2[x,y]/(x^2,xy,y^2)",
)
