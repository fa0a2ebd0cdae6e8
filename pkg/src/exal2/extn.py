"""Square-zero extensions of a ring by a module, and their classification.

An extension of B by M (optionally in the category of A-algebras) is a
surjection p: B' -> B whose kernel is a square-zero ideal identified with M.
Choosing a set-theoretic section sigma with sigma(0) = 0 and sigma(1) = 1
turns B' into pairs (b, m) and encodes the ring structure in a factor
system: an additive defect d, a multiplicative defect c, and (over a base)
a structure defect u. All the laws those defects satisfy are linear, so
classification questions (which extensions exist, which are equivalent,
which split) become exact affine solves over the coordinate slots of M.
"""

from dataclasses import dataclass, field
from functools import cached_property

from .errors import (
    AxiomViolation,
    ExtensionViolation,
    NotAnAutomorphism,
    NotSurjective,
    TargetMismatch,
    UsageError,
)
from .exactlin import solve_affine, subgroup_quotient
from .finring import (
    FiniteModule,
    FiniteRing,
    ModuleHom,
    RingHom,
    _freeze,
    additive_closure,
    fiber_product,
    quotient_by_ideal,
    restrict_scalars,
    ring_from_ops,
)


def vec_add(a, b, moduli):
    return tuple((x + y) % m for x, y, m in zip(a, b, moduli))


def vec_sub(a, b, moduli):
    return tuple((x - y) % m for x, y, m in zip(a, b, moduli))


def vec_neg(a, moduli):
    return tuple((-x) % m for x, m in zip(a, moduli))


class ModuleLayout:
    """Coordinates for a module M and matrices for the ring action on them."""

    def __init__(self, mod):
        self.mod = mod
        self.coords = mod.coords
        self.slots = self.coords.moduli
        self.ns = len(self.slots)
        self._act = {}

    def to_vec(self, m):
        return self.coords.to_vec[m]

    def from_vec(self, vec):
        return self.coords.from_vec[tuple(v % s for v, s in zip(vec, self.slots))]

    def act_matrix(self, r):
        """Integer matrix of m -> r.m in slot coordinates, columns per slot."""
        got = self._act.get(r)
        if got is not None:
            return got
        M = self.mod
        cols = []
        for j in range(self.ns):
            gen = self.from_vec(tuple(1 if i == j else 0 for i in range(self.ns)))
            cols.append(self.to_vec(M.act[r][gen]))
        mat = tuple(tuple(cols[j][s] for j in range(self.ns)) for s in range(self.ns))
        self._act[r] = mat
        return mat


class VectorLayout:
    """A block of M-valued unknowns indexed by hashable entry keys."""

    def __init__(self, entries, mlayout):
        self.entries = list(entries)
        self.mlayout = mlayout
        self.index = {k: i for i, k in enumerate(self.entries)}
        self.ns = mlayout.ns
        self.n = len(self.entries) * self.ns
        self.moduli = tuple(mlayout.slots) * len(self.entries)

    def rows_for_equation(self, terms, out):
        """Append rows (one per slot) for sum of terms = 0.

        Each term is (key, act_ring_elem_or_None, sign). Keys that are None
        denote entries normalized to zero and contribute nothing.
        """
        ns = self.ns
        rows = [dict() for _ in range(ns)]
        for key, act_elem, sign in terms:
            if key is None:
                continue
            base = self.index[key] * ns
            if act_elem is None:
                for s in range(ns):
                    rows[s][base + s] = rows[s].get(base + s, 0) + sign
            else:
                mat = self.mlayout.act_matrix(act_elem)
                for s in range(ns):
                    for j in range(ns):
                        if mat[s][j]:
                            rows[s][base + j] = rows[s].get(base + j, 0) + sign * mat[s][j]
        for s in range(ns):
            row = [0] * self.n
            for col, coef in rows[s].items():
                row[col] = coef
            out.append((row, self.mlayout.slots[s]))

    def encode(self, value_of):
        """Build a vector from a function key -> module element."""
        vec = []
        for key in self.entries:
            vec.extend(self.mlayout.to_vec(value_of(key)))
        return tuple(vec)

    def decode_entry(self, vec, key):
        i = self.index[key] * self.ns
        return self.mlayout.from_vec(vec[i : i + self.ns])


# ------------------------------------------------------------ factor spaces


def _pair_key(a, b):
    return (a, b) if a <= b else (b, a)


class FactorSystemSpace:
    """The linear world of factor systems (d, c, u) for extensions of B by M.

    d(b1,b2) is the additive defect (symmetric, d(0,.) = 0), c(b1,b2) the
    multiplicative defect (symmetric, c(0,.) = c(1,.) = 0), and, when a base
    map g: A -> B is given, u(a) the structure defect (u(0) = u(1) = 0).
    Gauge moves come from maps t: B -> M with t(0) = t(1) = 0.
    """

    def __init__(self, alg, mod, base_hom=None, extra_keys=()):
        if mod.ring != alg:
            raise TargetMismatch("module must live over the algebra")
        if base_hom is not None and base_hom.dst != alg:
            raise TargetMismatch("base map must land in the algebra")
        self.alg = alg
        self.mod = mod
        self.base_hom = base_hom
        self.mlayout = ModuleLayout(mod)
        B = alg
        keys = []
        nz = [b for b in range(B.n) if b != B.zero]
        self.d_pairs = [(b1, b2) for i, b1 in enumerate(nz) for b2 in nz[i:]]
        keys.extend(("d",) + p for p in self.d_pairs)
        nzo = [b for b in nz if b != B.one]
        self.c_pairs = [(b1, b2) for i, b1 in enumerate(nzo) for b2 in nzo[i:]]
        keys.extend(("c",) + p for p in self.c_pairs)
        if base_hom is not None:
            A = base_hom.src
            self.u_args = [a for a in range(A.n) if a not in (A.zero, A.one)]
            keys.extend(("u", a) for a in self.u_args)
        else:
            self.u_args = []
        # extra unknown blocks ride along so larger systems can share the laws
        keys.extend(extra_keys)
        self.layout = VectorLayout(keys, self.mlayout)
        self.moduli = self.layout.moduli
        self.t_args = nzo
        self.t_layout = VectorLayout([("t", b) for b in nzo], self.mlayout)

    def d_key(self, b1, b2):
        B = self.alg
        if b1 == B.zero or b2 == B.zero:
            return None
        return ("d",) + _pair_key(b1, b2)

    def c_key(self, b1, b2):
        B = self.alg
        if b1 == B.zero or b2 == B.zero or b1 == B.one or b2 == B.one:
            return None
        return ("c",) + _pair_key(b1, b2)

    def u_key(self, a):
        A = self.base_hom.src
        if a in (A.zero, A.one):
            return None
        return ("u", a)

    @cached_property
    def condition_system(self):
        """Rows of the linear laws every factor system satisfies."""
        B = self.alg
        out = []
        add, mul = B.add, B.mul
        for b1 in range(B.n):
            for b2 in range(b1, B.n):
                for b3 in range(B.n):
                    # additive cocycle
                    self.layout.rows_for_equation(
                        [
                            (self.d_key(b1, b2), None, 1),
                            (self.d_key(add[b1][b2], b3), None, 1),
                            (self.d_key(b2, b3), None, -1),
                            (self.d_key(b1, add[b2][b3]), None, -1),
                        ],
                        out,
                    )
                    # distributivity coupling
                    self.layout.rows_for_equation(
                        [
                            (self.d_key(b1, b2), b3, 1),
                            (self.c_key(add[b1][b2], b3), None, 1),
                            (self.c_key(b1, b3), None, -1),
                            (self.c_key(b2, b3), None, -1),
                            (self.d_key(mul[b1][b3], mul[b2][b3]), None, -1),
                        ],
                        out,
                    )
                    # associativity coupling
                    self.layout.rows_for_equation(
                        [
                            (self.c_key(b1, b2), b3, 1),
                            (self.c_key(mul[b1][b2], b3), None, 1),
                            (self.c_key(b2, b3), b1, -1),
                            (self.c_key(b1, mul[b2][b3]), None, -1),
                        ],
                        out,
                    )
        if self.base_hom is not None:
            A, g = self.base_hom.src, self.base_hom
            for a1 in range(A.n):
                for a2 in range(a1, A.n):
                    self.layout.rows_for_equation(
                        [
                            (self.u_key(A.add[a1][a2]), None, 1),
                            (self.u_key(a1), None, -1),
                            (self.u_key(a2), None, -1),
                            (self.d_key(g(a1), g(a2)), None, -1),
                        ],
                        out,
                    )
                    self.layout.rows_for_equation(
                        [
                            (self.u_key(A.mul[a1][a2]), None, 1),
                            (self.u_key(a2), g(a1), -1),
                            (self.u_key(a1), g(a2), -1),
                            (self.c_key(g(a1), g(a2)), None, -1),
                        ],
                        out,
                    )
        rows = [r for r, _ in out]
        row_moduli = [m for _, m in out]
        return rows, row_moduli

    @cached_property
    def kernel_gens(self):
        """Generators of the group of factor systems."""
        rows, row_moduli = self.condition_system
        sol = solve_affine(self.moduli, rows, [0] * len(rows), row_moduli)
        assert sol is not None
        return sol.kernel

    def gauge_image(self, t_table):
        """The factor system (delta t, lambda t, -t.g) of a gauge map t: B -> M."""
        B, M = self.alg, self.mod
        z = M.zero

        def t(b):
            return t_table[b]

        def value(key):
            if key[0] == "d":
                _, b1, b2 = key
                return M.sub(M.add[t(b1)][t(b2)], t(B.add[b1][b2]))
            if key[0] == "c":
                _, b1, b2 = key
                s = M.add[M.act[b1][t(b2)]][M.act[b2][t(b1)]]
                return M.sub(s, t(B.mul[b1][b2]))
            _, a = key
            return M.neg[t(self.base_hom(a))]

        return self.layout.encode(value)

    @cached_property
    def gauge_gens(self):
        """Images of a basis of gauge maps t."""
        B, M = self.alg, self.mod
        gens = []
        for b0 in self.t_args:
            for j in range(self.mlayout.ns):
                gen = self.mlayout.from_vec(
                    tuple(1 if i == j else 0 for i in range(self.mlayout.ns))
                )
                t_table = tuple(gen if b == b0 else M.zero for b in range(B.n))
                gens.append(self.gauge_image(t_table))
        return gens

    def coboundary_solutions(self, vec):
        """All gauge maps t with image equal to vec, or None."""
        cols = self.gauge_gens
        rows = [[g[i] for g in cols] for i in range(len(vec))]
        sol = solve_affine(
            self.t_layout.moduli, rows, list(vec), list(self.moduli)
        )
        return sol

    def t_table_from_vec(self, tvec):
        B, M = self.alg, self.mod
        table = [M.zero] * B.n
        for b in self.t_args:
            table[b] = self.t_layout.decode_entry(tvec, ("t", b))
        return tuple(table)

    def is_coboundary(self, vec):
        sol = self.coboundary_solutions(vec)
        if sol is None:
            return None
        return self.t_table_from_vec(sol.particular)

    def classify(self, rep_cap=None):
        """Factor systems modulo gauge, as a quotient group with representatives."""
        return subgroup_quotient(
            self.moduli, list(self.kernel_gens), self.gauge_gens, rep_cap=rep_cap
        )

    def encode_tables(self, d_table, c_table, u_table=None):
        def value(key):
            if key[0] == "d":
                return d_table[key[1]][key[2]]
            if key[0] == "c":
                return c_table[key[1]][key[2]]
            return u_table[key[1]]

        return self.layout.encode(value)

    def decode(self, vec):
        """Full (d, c, u) tables from a vector, with normalized entries filled in."""
        B, M = self.alg, self.mod
        d = [[M.zero] * B.n for _ in range(B.n)]
        c = [[M.zero] * B.n for _ in range(B.n)]
        for b1, b2 in self.d_pairs:
            v = self.layout.decode_entry(vec, ("d", b1, b2))
            d[b1][b2] = v
            d[b2][b1] = v
        for b1, b2 in self.c_pairs:
            v = self.layout.decode_entry(vec, ("c", b1, b2))
            c[b1][b2] = v
            c[b2][b1] = v
        u = None
        if self.base_hom is not None:
            A = self.base_hom.src
            u = [M.zero] * A.n
            for a in self.u_args:
                u[a] = self.layout.decode_entry(vec, ("u", a))
        return _freeze(d), _freeze(c), (tuple(u) if u is not None else None)


# ------------------------------------------------------------- extensions


@dataclass(frozen=True)
class SquareZeroExtension:
    """0 -> M -> B' -> B -> 0 with M an ideal of square zero.

    base/base_to_alg/base_lift carry an optional A-algebra structure: a ring
    A with g: A -> B and a lift A -> B' of it.
    """

    alg: FiniteRing
    mod: FiniteModule
    total: FiniteRing
    embed: tuple  # M -> B'
    project: RingHom  # B' -> B
    base: FiniteRing | None = None
    base_to_alg: RingHom | None = None
    base_lift: RingHom | None = None
    name: str = field(default="ext", compare=False)

    @cached_property
    def embed_inverse(self):
        return {q: m for m, q in enumerate(self.embed)}

    @cached_property
    def section(self):
        """Canonical set-theoretic section of project with 0 -> 0 and 1 -> 1."""
        B, T = self.alg, self.total
        sec = [None] * B.n
        for q in range(T.n):
            b = self.project(q)
            if sec[b] is None or q < sec[b]:
                sec[b] = q
        sec[B.zero] = T.zero
        sec[B.one] = T.one
        return tuple(sec)

    def __repr__(self):
        return f"SquareZeroExtension({self.name}: {self.mod.name} -> {self.total.name} -> {self.alg.name})"


def validate_extension(ext):
    B, M, T = ext.alg, ext.mod, ext.total
    p, e = ext.project, ext.embed
    if p.src != T or p.dst != B:
        raise TargetMismatch("projection endpoints are wrong")
    if M.ring != B:
        raise TargetMismatch("module must live over the quotient ring")
    if not p.is_surjective():
        raise NotSurjective(f"{ext.name}: projection is not onto")
    if len(e) != M.n or len(set(e)) != M.n:
        raise ExtensionViolation(f"{ext.name}: embedding is not injective")
    for m in range(M.n):
        for m2 in range(M.n):
            if e[M.add[m][m2]] != T.add[e[m]][e[m2]]:
                raise ExtensionViolation(f"{ext.name}: embedding not additive")
            if T.mul[e[m]][e[m2]] != T.zero:
                raise ExtensionViolation(f"{ext.name}: ideal does not square to zero")
    if set(p.kernel()) != set(e):
        raise ExtensionViolation(f"{ext.name}: kernel of projection differs from the module")
    for q in range(T.n):
        for m in range(M.n):
            if T.mul[q][e[m]] != e[M.act[p(q)][m]]:
                raise ExtensionViolation(f"{ext.name}: action incompatible at ({q},{m})")
    if ext.base is not None:
        if ext.base_to_alg is None or ext.base_lift is None:
            raise UsageError(f"{ext.name}: base data incomplete")
        if ext.base_to_alg.src != ext.base or ext.base_lift.src != ext.base:
            raise TargetMismatch(f"{ext.name}: base maps must start at the base")
        if ext.base_lift.dst != T or ext.base_to_alg.dst != B:
            raise TargetMismatch(f"{ext.name}: base maps land in the wrong rings")
        for a in range(ext.base.n):
            if p(ext.base_lift(a)) != ext.base_to_alg(a):
                raise ExtensionViolation(f"{ext.name}: base lift does not lift the base map")
    return True


def space_of(ext):
    return FactorSystemSpace(ext.alg, ext.mod, ext.base_to_alg)


def factor_system_of(ext, space=None):
    """Encode an extension into the factor-system vector of its space."""
    space = space or space_of(ext)
    B, M, T = ext.alg, ext.mod, ext.total
    sec, einv = ext.section, ext.embed_inverse

    def defect(x, y):
        # x - y for two elements of T over the same class, read in M
        return einv[T.sub(x, y)]

    def value(key):
        if key[0] == "d":
            _, b1, b2 = key
            return defect(T.add[sec[b1]][sec[b2]], sec[B.add[b1][b2]])
        if key[0] == "c":
            _, b1, b2 = key
            return defect(T.mul[sec[b1]][sec[b2]], sec[B.mul[b1][b2]])
        _, a = key
        return defect(ext.base_lift(a), sec[ext.base_to_alg(a)])

    return space.layout.encode(value)


def extension_from_factor_system(space, vec, name=None):
    """Build the extension on pairs (b, m) realizing a factor-system vector."""
    B, M = space.alg, space.mod
    d, c, u = space.decode(vec)
    pairs = [(b, m) for b in range(B.n) for m in range(M.n)]

    def add_fn(x, y):
        b, m = x
        b2, m2 = y
        return (B.add[b][b2], M.add[M.add[m][m2]][d[b][b2]])

    def mul_fn(x, y):
        b, m = x
        b2, m2 = y
        mm = M.add[M.act[b][m2]][M.act[b2][m]]
        return (B.mul[b][b2], M.add[mm][c[b][b2]])

    ring, values, index = ring_from_ops(
        pairs, add_fn, mul_fn, (B.zero, M.zero), (B.one, M.zero), name or f"{B.name}(+){M.name}"
    )
    embed = tuple(index[(B.zero, m)] for m in range(M.n))
    project = RingHom(src=ring, dst=B, table=tuple(v[0] for v in values), name="pr")
    base = base_to_alg = base_lift = None
    if space.base_hom is not None:
        base = space.base_hom.src
        base_to_alg = space.base_hom
        base_lift = RingHom(
            src=base,
            dst=ring,
            table=tuple(index[(base_to_alg(a), u[a])] for a in range(base.n)),
            name="lift",
        )
    return SquareZeroExtension(
        alg=B,
        mod=M,
        total=ring,
        embed=embed,
        project=project,
        base=base,
        base_to_alg=base_to_alg,
        base_lift=base_lift,
        name=name or "ext(fs)",
    )


def trivial_extension(B, M, base_hom=None, name=None):
    space = FactorSystemSpace(B, M, base_hom)
    zero = tuple(0 for _ in space.moduli)
    return extension_from_factor_system(space, zero, name=name or f"triv({B.name},{M.name})")


def extension_from_surjection(p, base=None, base_to_alg=None, base_lift=None, name=None):
    """Wrap a surjection with square-zero kernel as an extension object."""
    T, B = p.src, p.dst
    if not p.is_surjective():
        raise NotSurjective("map is not onto")
    kelems = list(p.kernel())
    for x in kelems:
        for y in kelems:
            if T.mul[x][y] != T.zero:
                raise ExtensionViolation("kernel does not square to zero")
    index = {x: i for i, x in enumerate(kelems)}
    # action of B on the kernel through any preimage
    sec = {}
    for q in range(T.n):
        b = p(q)
        if b not in sec:
            sec[b] = q
    add = [[index[T.add[x][y]] for y in kelems] for x in kelems]
    act = [[index[T.mul[sec[b]][x]] for x in kelems] for b in range(B.n)]
    M = FiniteModule(
        ring=B,
        n=len(kelems),
        add=_freeze(add),
        act=_freeze(act),
        zero=index[T.zero],
        name=f"ker({p.name})",
    )
    return SquareZeroExtension(
        alg=B,
        mod=M,
        total=T,
        embed=tuple(kelems),
        project=p,
        base=base,
        base_to_alg=base_to_alg,
        base_lift=base_lift,
        name=name or f"{T.name}->>{B.name}",
    )


# ----------------------------------------------------- equivalence, splits


def equivalence_iso(e1, e2):
    """A ring isomorphism of totals commuting with everything, or None.

    Both extensions must share alg, mod and base data; existence is decided
    by whether the factor systems differ by a gauge move.
    """
    if (e1.alg, e1.mod, e1.base, e1.base_to_alg) != (e2.alg, e2.mod, e2.base, e2.base_to_alg):
        raise TargetMismatch("extensions do not share their boundary data")
    space = space_of(e1)
    fs1 = factor_system_of(e1, space)
    fs2 = factor_system_of(e2, space)
    t = space.is_coboundary(vec_sub(fs1, fs2, space.moduli))
    if t is None:
        return None
    B, M = e1.alg, e1.mod
    T1, T2 = e1.total, e2.total
    table = [None] * T1.n
    for q in range(T1.n):
        b = e1.project(q)
        m = e1.embed_inverse[T1.sub(q, e1.section[b])]
        table[q] = T2.add[e2.section[b]][e2.embed[M.add[m][t[b]]]]
    return RingHom(src=T1, dst=T2, table=tuple(table), name="equiv")


def are_equivalent(e1, e2):
    return equivalence_iso(e1, e2) is not None


def splittings(ext):
    """All ring sections of the projection compatible with the base, as homs."""
    space = space_of(ext)
    fs = factor_system_of(ext, space)
    sols = space.coboundary_solutions(vec_neg(fs, space.moduli))
    if sols is None:
        return []
    out = []
    B, M, T = ext.alg, ext.mod, ext.total
    for tvec in sols.enumerate():
        t = space.t_table_from_vec(tvec)
        table = tuple(T.add[ext.section[b]][ext.embed[t[b]]] for b in range(B.n))
        out.append(RingHom(src=B, dst=T, table=table, name="sect"))
    return out


def splitting_difference(ext, s1, s2):
    """The derivation-like defect b -> e^{-1}(s1(b) - s2(b)) of two sections."""
    T = ext.total
    return tuple(ext.embed_inverse[T.sub(s1(b), s2(b))] for b in range(ext.alg.n))


# ------------------------------------------------------------- derivations


@dataclass(frozen=True)
class DerivationGroup:
    alg: FiniteRing
    mod: FiniteModule
    gens: tuple  # generating tables
    tables: tuple  # every derivation as a table B -> M
    moduli: tuple

    @property
    def size(self):
        return len(self.tables)


def derivations(B, M, base_hom=None, cap=None):
    """All additive Leibniz maps B -> M killing the base image."""
    mlayout = ModuleLayout(M)
    args = [b for b in range(B.n) if b not in (B.zero, B.one)]
    layout = VectorLayout([("t", b) for b in args], mlayout)

    def key(b):
        return ("t", b) if b not in (B.zero, B.one) else None

    out = []
    for b1 in range(B.n):
        for b2 in range(b1, B.n):
            layout.rows_for_equation(
                [
                    (key(B.add[b1][b2]), None, 1),
                    (key(b1), None, -1),
                    (key(b2), None, -1),
                ],
                out,
            )
            layout.rows_for_equation(
                [
                    (key(B.mul[b1][b2]), None, 1),
                    (key(b2), b1, -1),
                    (key(b1), b2, -1),
                ],
                out,
            )
    if base_hom is not None:
        for a in range(base_hom.src.n):
            layout.rows_for_equation([(key(base_hom(a)), None, 1)], out)
    rows = [r for r, _ in out]
    row_moduli = [m for _, m in out]
    sol = solve_affine(layout.moduli, rows, [0] * len(rows), row_moduli)
    assert sol is not None

    def table_of(vec):
        t = [M.zero] * B.n
        for b in args:
            t[b] = layout.decode_entry(vec, ("t", b))
        return tuple(t)

    tables = tuple(table_of(v) for v in sol.enumerate(cap))
    gens = tuple(table_of(g) for g in sol.kernel)
    return DerivationGroup(alg=B, mod=M, gens=gens, tables=tables, moduli=layout.moduli)


def extension_automorphisms(ext):
    """Automorphisms of the total ring fixing M, B and the base structure."""
    ders = derivations(ext.alg, ext.mod, ext.base_to_alg)
    T = ext.total
    out = []
    for t in ders.tables:
        table = tuple(T.add[q][ext.embed[t[ext.project(q)]]] for q in range(T.n))
        out.append(RingHom(src=T, dst=T, table=table, name="aut"))
    return out


def automorphism_to_derivation(ext, psi):
    """Invert the correspondence: read the derivation off an automorphism."""
    T = ext.total
    t = [None] * ext.alg.n
    for q in range(T.n):
        b = ext.project(q)
        m = ext.embed_inverse.get(T.sub(psi(q), q))
        if m is None:
            raise NotAnAutomorphism("map does not fix classes modulo M")
        if t[b] is None:
            t[b] = m
        elif t[b] != m:
            raise NotAnAutomorphism("defect is not constant on fibers")
    return tuple(t)


# ----------------------------------------------- sums, pullback, pushout


def baer_sum(e1, e2, name=None):
    """Baer sum via factor systems."""
    if (e1.alg, e1.mod, e1.base, e1.base_to_alg) != (e2.alg, e2.mod, e2.base, e2.base_to_alg):
        raise TargetMismatch("extensions do not share their boundary data")
    space = space_of(e1)
    fs = vec_add(factor_system_of(e1, space), factor_system_of(e2, space), space.moduli)
    return extension_from_factor_system(space, fs, name=name or f"{e1.name}+{e2.name}")


def baer_sum_direct(e1, e2, name=None):
    """Baer sum built at the ring level: fiber over B modulo the antidiagonal."""
    if (e1.alg, e1.mod, e1.base, e1.base_to_alg) != (e2.alg, e2.mod, e2.base, e2.base_to_alg):
        raise TargetMismatch("extensions do not share their boundary data")
    B, M = e1.alg, e1.mod
    fp = fiber_product(e1.project, e2.project)
    anti = [fp.index[(e1.embed[m], e2.embed[M.neg[m]])] for m in range(M.n)]
    q = quotient_by_ideal(
        fp.ring, sorted(additive_closure(fp.ring.add, fp.ring.zero, anti)), name="baer"
    )
    ring = q.ring
    embed = tuple(q.proj(fp.index[(e1.embed[m], e2.total.zero)]) for m in range(M.n))
    proj_table = [None] * ring.n
    for i, (a, b) in enumerate(fp.pairs):
        proj_table[q.proj(i)] = e1.project(a)
    project = RingHom(src=ring, dst=B, table=tuple(proj_table), name="pr")
    base = base_to_alg = base_lift = None
    if e1.base is not None:
        base, base_to_alg = e1.base, e1.base_to_alg
        base_lift = RingHom(
            src=base,
            dst=ring,
            table=tuple(
                q.proj(fp.index[(e1.base_lift(a), e2.base_lift(a))]) for a in range(base.n)
            ),
            name="lift",
        )
    return SquareZeroExtension(
        alg=B,
        mod=M,
        total=ring,
        embed=embed,
        project=project,
        base=base,
        base_to_alg=base_to_alg,
        base_lift=base_lift,
        name=name or f"{e1.name}(+){e2.name}",
    )


def pullback_extension(ext, h, base_to_src=None, name=None):
    """Pull back along h: B0 -> B; the module becomes M over B0 through h."""
    if h.dst != ext.alg:
        raise TargetMismatch("pullback map must land in the extension's ring")
    B0 = h.src
    fp = fiber_product(ext.project, h)
    M0 = restrict_scalars(ext.mod, h, name=f"{ext.mod.name}|{B0.name}")
    embed = tuple(fp.index[(ext.embed[m], B0.zero)] for m in range(ext.mod.n))
    project = fp.p2
    base = base_to_alg = base_lift = None
    if ext.base is not None:
        if base_to_src is None:
            raise UsageError("pullback of a based extension needs a base map into the source")
        if base_to_src.src != ext.base or base_to_src.dst != B0:
            raise TargetMismatch("base map endpoints are wrong")
        for a in range(ext.base.n):
            if h(base_to_src(a)) != ext.base_to_alg(a):
                raise TargetMismatch("base map does not factor the base structure")
        base, base_to_alg = ext.base, base_to_src
        base_lift = RingHom(
            src=base,
            dst=fp.ring,
            table=tuple(fp.index[(ext.base_lift(a), base_to_src(a))] for a in range(base.n)),
            name="lift",
        )
    return SquareZeroExtension(
        alg=B0,
        mod=M0,
        total=fp.ring,
        embed=embed,
        project=project,
        base=base,
        base_to_alg=base_to_alg,
        base_lift=base_lift,
        name=name or f"{ext.name}|{B0.name}",
    )


def pushout_extension(ext, phi, name=None):
    """Push out along a linear map phi: M -> M' of modules over the same ring."""
    if phi.src != ext.mod or phi.link is not None:
        raise TargetMismatch("pushout map must be a linear map out of the module")
    M, M2 = ext.mod, phi.dst
    T, B = ext.total, ext.alg
    pairs = [(q, m) for q in range(T.n) for m in range(M2.n)]
    sub = _pair_span(
        T, M2, [(ext.embed[m], M2.neg[phi(m)]) for m in range(M.n)]
    )
    rep = {}
    for x in pairs:
        if x in rep:
            continue
        coset = sorted((T.add[x[0]][s0], M2.add[x[1]][s1]) for s0, s1 in sub)
        lead = coset[0]
        for v in coset:
            rep[v] = lead
    classes = sorted(set(rep.values()))
    cindex = {v: i for i, v in enumerate(classes)}

    def addp(x, y):
        return (T.add[x[0]][y[0]], M2.add[x[1]][y[1]])

    def mulp(x, y):
        q, m = x
        q2, m2 = y
        mm = M2.add[M2.act[ext.project(q)][m2]][M2.act[ext.project(q2)][m]]
        return (T.mul[q][q2], mm)

    n = len(classes)
    add = [[cindex[rep[addp(a, b)]] for b in classes] for a in classes]
    mul = [[cindex[rep[mulp(a, b)]] for b in classes] for a in classes]
    ring = FiniteRing(
        n=n,
        add=_freeze(add),
        mul=_freeze(mul),
        zero=cindex[rep[(T.zero, M2.zero)]],
        one=cindex[rep[(T.one, M2.zero)]],
        name=name or f"{T.name}*",
    )
    embed = tuple(cindex[rep[(T.zero, m)]] for m in range(M2.n))
    project = RingHom(
        src=ring,
        dst=B,
        table=tuple(ext.project(classes[i][0]) for i in range(n)),
        name="pr",
    )
    base = base_to_alg = base_lift = None
    if ext.base is not None:
        base, base_to_alg = ext.base, ext.base_to_alg
        base_lift = RingHom(
            src=base,
            dst=ring,
            table=tuple(cindex[rep[(ext.base_lift(a), M2.zero)]] for a in range(base.n)),
            name="lift",
        )
    return SquareZeroExtension(
        alg=B,
        mod=M2,
        total=ring,
        embed=embed,
        project=project,
        base=base,
        base_to_alg=base_to_alg,
        base_lift=base_lift,
        name=name or f"{ext.name}*{phi.name}",
    )


def _pair_span(T, M2, seeds):
    zero = (T.zero, M2.zero)
    seen = {zero}
    frontier = [zero]
    for s in seeds:
        if s not in seen:
            seen.add(s)
            frontier.append(s)
    while frontier:
        fresh = []
        for a in frontier:
            for b in list(seen):
                c = (T.add[a[0]][b[0]], M2.add[a[1]][b[1]])
                if c not in seen:
                    seen.add(c)
                    fresh.append(c)
        frontier = fresh
    return seen


def negate_extension(ext, name=None):
    M = ext.mod
    neg = ModuleHom(src=M, dst=M, table=M.neg, name="-id")
    return pushout_extension(ext, neg, name=name or f"-{ext.name}")


def restrict_base(ext, f, name=None):
    """View an extension over A as one over A0 through f: A0 -> A."""
    if ext.base is None:
        raise UsageError("extension has no base to restrict")
    if f.dst != ext.base:
        raise TargetMismatch("restriction map must land in the base")
    return SquareZeroExtension(
        alg=ext.alg,
        mod=ext.mod,
        total=ext.total,
        embed=ext.embed,
        project=ext.project,
        base=f.src,
        base_to_alg=f.then(ext.base_to_alg),
        base_lift=f.then(ext.base_lift),
        name=name or f"{ext.name}|{f.src.name}",
    )


def forget_base(ext):
    return SquareZeroExtension(
        alg=ext.alg,
        mod=ext.mod,
        total=ext.total,
        embed=ext.embed,
        project=ext.project,
        name=ext.name,
    )


def with_base(ext, base_to_alg, name=None):
    """Equip an absolute extension with a base structure, if some lift exists.

    Searches the finitely many set maps that are candidate lifts by solving
    the structure-defect system; raises ExtensionViolation when no ring lift
    of the base map exists.
    """
    if ext.base is not None:
        raise UsageError("extension already carries a base")
    space = FactorSystemSpace(ext.alg, ext.mod, base_to_alg)
    d, c, _ = space_of(ext).decode(factor_system_of(ext))
    rows = []
    A, g = base_to_alg.src, base_to_alg
    M = ext.mod
    rhs = []
    for a1 in range(A.n):
        for a2 in range(a1, A.n):
            space.layout.rows_for_equation(
                [
                    (space.u_key(A.add[a1][a2]), None, 1),
                    (space.u_key(a1), None, -1),
                    (space.u_key(a2), None, -1),
                ],
                rows,
            )
            rhs.extend(space.mlayout.to_vec(d[g(a1)][g(a2)]))
            space.layout.rows_for_equation(
                [
                    (space.u_key(A.mul[a1][a2]), None, 1),
                    (space.u_key(a2), g(a1), -1),
                    (space.u_key(a1), g(a2), -1),
                ],
                rows,
            )
            rhs.extend(space.mlayout.to_vec(c[g(a1)][g(a2)]))
    sol = solve_affine(
        space.moduli, [r for r, _ in rows], rhs, [m for _, m in rows]
    )
    if sol is None:
        raise ExtensionViolation(f"{ext.name}: base map admits no multiplicative lift")
    u = [M.zero] * A.n
    for a in space.u_args:
        u[a] = space.layout.decode_entry(sol.particular, ("u", a))
    T = ext.total
    lift = RingHom(
        src=A,
        dst=T,
        table=tuple(T.add[ext.section[g(a)]][ext.embed[u[a]]] for a in range(A.n)),
        name="lift",
    )
    return SquareZeroExtension(
        alg=ext.alg,
        mod=ext.mod,
        total=ext.total,
        embed=ext.embed,
        project=ext.project,
        base=A,
        base_to_alg=base_to_alg,
        base_lift=lift,
        name=name or ext.name,
    )


# ------------------------------------------------------------ classification


@dataclass(frozen=True)
class ExalClassification:
    """The group of extension classes of B by M (over an optional base)."""

    space: FactorSystemSpace
    divisors: tuple
    reps: tuple  # (coords, factor-system vector) pairs

    @property
    def size(self):
        out = 1
        for d in self.divisors:
            out *= d
        return out

    def class_coords(self, vec):
        for coords, rep in self.reps:
            if self.space.is_coboundary(vec_sub(vec, rep, self.space.moduli)) is not None:
                return coords
        raise AxiomViolation("vector is not a factor system of this space")

    def class_of_extension(self, ext):
        return self.class_coords(factor_system_of(ext, self.space))

    def extension_for(self, coords, name=None):
        for c, rep in self.reps:
            if c == tuple(coords):
                return extension_from_factor_system(self.space, rep, name=name)
        raise UsageError(f"no class {coords}")

    def add(self, c1, c2):
        return tuple((a + b) % d for a, b, d in zip(c1, c2, self.divisors))

    def neg(self, c1):
        return tuple((-a) % d for a, d in zip(c1, self.divisors))


def exal_classify(B, M, base_hom=None, rep_cap=None):
    space = FactorSystemSpace(B, M, base_hom)
    q = space.classify(rep_cap=rep_cap)
    return ExalClassification(space=space, divisors=q.divisors, reps=q.items)
