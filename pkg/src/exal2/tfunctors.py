"""Tangent cohomology of finitely presented algebras over prime fields.

An algebra arrives as generators, relation polynomials and a terminating
rewrite system that computes normal forms. From these a three-term complex
of modules over the quotient is assembled; the cohomology of its dual with
coefficients in a module gives, in degrees 0, 1 and 2, the dimensions that
the rest of the package computes independently as derivations, extension
classes and 2-extension classes.

Monomials are exponent tuples; polynomials are dicts mapping exponent
tuples to nonzero coefficients mod p. All linear algebra is exact.
"""

import itertools
from dataclasses import dataclass, field

from .config import GUARD
from .errors import (
    CheckFailed,
    NotConfluent,
    NotFiniteDimensional,
    ShapeMismatch,
    TargetMismatch,
    TooLarge,
    UsageError,
)
from .exactlin import solve_affine, span_count
from .finring import FiniteRing, _freeze


def _deglex(m):
    return (sum(m), m)


def _normal(poly, p):
    out = {}
    for m, c in poly.items():
        t = (out.get(m, 0) + int(c)) % p
        if t:
            out[m] = t
        else:
            out.pop(m, None)
    return out


def _padd(u, v, p):
    out = dict(u)
    for m, c in v.items():
        t = (out.get(m, 0) + c) % p
        if t:
            out[m] = t
        else:
            out.pop(m, None)
    return out


def _pshift(u, q, scale, p):
    """u * scale * x^q."""
    out = {}
    for m, c in u.items():
        t = c * scale % p
        if t:
            out[tuple(a + b for a, b in zip(m, q))] = t
    return out


def _diff(poly, k, p):
    out = {}
    for m, c in poly.items():
        if m[k]:
            t = c * m[k] % p
            if t:
                mm = tuple(e - 1 if i == k else e for i, e in enumerate(m))
                out[mm] = t
    return out


def _divides(lead, m):
    return all(a <= b for a, b in zip(lead, m))


def _msub(m, lead):
    return tuple(b - a for a, b in zip(lead, m))


def _monos(nvars, degree):
    """Exponent tuples of the given total degree."""
    out = []
    for picks in itertools.combinations_with_replacement(range(nvars), degree):
        m = [0] * nvars
        for i in picks:
            m[i] += 1
        out.append(tuple(m))
    return sorted(out)


def _monos_upto(nvars, degree):
    out = []
    for d in range(degree + 1):
        out.extend(_monos(nvars, d))
    return out


def _is_prime(n):
    if n < 2:
        return False
    return all(n % q for q in range(2, int(n ** 0.5) + 1))


class PresentedAlgebra:
    """A quotient of a polynomial ring over Z/p with explicit normal forms.

    relations generate the ideal. rules are (lead monomial, replacement)
    pairs; each replacement must be strictly smaller than its lead in the
    degree-lexicographic order, so rewriting terminates. Construction
    checks that the rules join at every overlap, that every relation
    rewrites to zero, and that no irreducible monomial survives at the
    degree bound, which certifies the irreducible monomials below it as a
    basis of the quotient.
    """

    def __init__(self, char, gens, relations, rules, bound, name=None):
        char = int(char)
        if not _is_prime(char):
            raise UsageError("coefficients must form a prime field")
        self.char = char
        self.gens = tuple(gens)
        self.nvars = len(self.gens)
        if len(set(self.gens)) != self.nvars:
            raise UsageError("repeated generator names")
        self.bound = int(bound)
        if self.bound < 1:
            raise UsageError("degree bound must be at least 1")
        self.name = name or f"Z/{char}[{','.join(self.gens)}]"
        rels = []
        for rel in relations:
            poly = _normal(dict(rel), char)
            for m in poly:
                if len(m) != self.nvars:
                    raise ShapeMismatch("relation monomial has the wrong arity")
            if not poly:
                raise UsageError("zero relation")
            rels.append(tuple(sorted(poly.items(), key=lambda mc: _deglex(mc[0]))))
        self.relations = tuple(rels)
        packed = []
        for lead, rhs in rules:
            lead = tuple(int(e) for e in lead)
            if len(lead) != self.nvars:
                raise ShapeMismatch("rule lead has the wrong arity")
            if sum(lead) < 1:
                raise UsageError("rule lead must have degree at least 1")
            rhs = _normal(dict(rhs), char)
            for m in rhs:
                if len(m) != self.nvars:
                    raise ShapeMismatch("rule replacement has the wrong arity")
                if _deglex(m) >= _deglex(lead):
                    raise UsageError("rule replacement must be smaller than its lead")
            packed.append((lead, tuple(sorted(rhs.items(), key=lambda mc: _deglex(mc[0])))))
        self.rules = tuple(packed)
        self._check_confluent()
        for k, rel in enumerate(self.relations):
            if self.normal_form(dict(rel)):
                raise UsageError(f"relation {k} does not rewrite to zero")
        self.basis = self._certify_basis()
        self._realized = None

    def normal_form(self, poly):
        """The unique irreducible representative of a polynomial."""
        p = self.char
        work = _normal(dict(poly), p)
        out = {}
        while work:
            m = max(work, key=_deglex)
            c = work.pop(m)
            for lead, rhs in self.rules:
                if _divides(lead, m):
                    q = _msub(m, lead)
                    for rm, rc in rhs:
                        mm = tuple(a + b for a, b in zip(rm, q))
                        t = (work.get(mm, 0) + c * rc) % p
                        if t:
                            work[mm] = t
                        else:
                            work.pop(mm, None)
                    break
            else:
                out[m] = c
        return out

    def _check_confluent(self):
        p = self.char
        for i in range(len(self.rules)):
            li, ri = self.rules[i]
            for j in range(i + 1, len(self.rules)):
                lj, rj = self.rules[j]
                t = tuple(max(a, b) for a, b in zip(li, lj))
                s = _padd(
                    _pshift(dict(rj), _msub(t, lj), 1, p),
                    _pshift(dict(ri), _msub(t, li), p - 1, p),
                    p,
                )
                if self.normal_form(s):
                    raise NotConfluent(f"rules {i} and {j} do not join at their overlap")

    def _certify_basis(self):
        irr = []
        for d in range(self.bound + 1):
            level = [
                m
                for m in _monos(self.nvars, d)
                if not any(_divides(lead, m) for lead, _ in self.rules)
            ]
            if d == self.bound and level:
                raise NotFiniteDimensional(
                    f"irreducible monomial of degree {d} at the bound"
                )
            irr.extend(level)
        return tuple(sorted(irr, key=_deglex))

    def vector(self, poly):
        """Coefficients of the normal form over the monomial basis."""
        nf = self.normal_form(poly)
        pos = {m: i for i, m in enumerate(self.basis)}
        vec = [0] * len(self.basis)
        for m, c in nf.items():
            vec[pos[m]] = c
        return tuple(vec)

    def ring(self):
        """The quotient as an operation-table ring over coefficient tuples.

        Returns (ring, values, index): values[i] is the coefficient tuple
        of element i over the monomial basis.
        """
        if self._realized is None:
            p = self.char
            dim = len(self.basis)
            n = p ** dim
            if n > GUARD.max_candidates:
                raise TooLarge(f"quotient has {n} elements")
            values = tuple(itertools.product(range(p), repeat=dim))
            index = {v: i for i, v in enumerate(values)}
            prods = [
                [
                    self.vector({tuple(a + b for a, b in zip(m1, m2)): 1})
                    for m2 in self.basis
                ]
                for m1 in self.basis
            ]
            add = [
                [index[tuple((a + b) % p for a, b in zip(u, v))] for v in values]
                for u in values
            ]
            mul = []
            for u in values:
                row = []
                for v in values:
                    acc = [0] * dim
                    for a, ca in enumerate(u):
                        if not ca:
                            continue
                        for b, cb in enumerate(v):
                            if not cb:
                                continue
                            w = prods[a][b]
                            for t in range(dim):
                                acc[t] = (acc[t] + ca * cb * w[t]) % p
                    row.append(index[tuple(acc)])
                mul.append(row)
            one = [0] * dim
            one[self.basis.index(tuple([0] * self.nvars))] = 1
            ring = FiniteRing(
                n=n,
                add=_freeze(add),
                mul=_freeze(mul),
                zero=index[tuple([0] * dim)],
                one=index[tuple(one)],
                name=self.name,
            )
            self._realized = (ring, values, index)
        return self._realized

    def element(self, poly):
        """Index of a polynomial's class in the realized ring."""
        ring, _, index = self.ring()
        return index[self.vector(poly)]


class _Ech:
    """Row echelon over Z/p on sparse dict vectors, tracking combinations.

    Inserted rows may carry a tag; a query then expresses a vector as a
    combination of the tagged rows modulo the untagged ones.
    """

    def __init__(self, p):
        self.p = p
        self.rows = []

    def _invmod(self, a):
        return pow(a, self.p - 2, self.p)

    def _eliminate(self, vec, combo):
        p = self.p
        for pivot, rvec, rcombo in self.rows:
            c = vec.get(pivot, 0)
            if not c:
                continue
            for k, v in rvec.items():
                t = (vec.get(k, 0) - c * v) % p
                if t:
                    vec[k] = t
                else:
                    vec.pop(k, None)
            for k, v in rcombo.items():
                t = (combo.get(k, 0) - c * v) % p
                if t:
                    combo[k] = t
                else:
                    combo.pop(k, None)
        return vec, combo

    def insert(self, vector, tag=None):
        """Add a row; returns True when it was independent."""
        vec = {k: v % self.p for k, v in vector.items() if v % self.p}
        combo = {} if tag is None else {tag: 1}
        vec, combo = self._eliminate(vec, combo)
        if not vec:
            return False
        pivot = max(vec, key=repr)
        inv = self._invmod(vec[pivot])
        vec = {k: v * inv % self.p for k, v in vec.items()}
        combo = {k: v * inv % self.p for k, v in combo.items()}
        self.rows.append((pivot, vec, combo))
        return True

    def rank(self):
        return len(self.rows)

    def coords(self, vector):
        """Tagged coordinates of a vector, or None if it falls outside."""
        vec = {k: v % self.p for k, v in vector.items() if v % self.p}
        vec, combo = self._eliminate(vec, {})
        if vec:
            return None
        return {k: (-v) % self.p for k, v in combo.items() if v % self.p}


@dataclass
class LSComplex:
    """Three-term complex presenting the relative differentials.

    l1 is free of rank the number of relations, l0 free of rank the number
    of generators; the degree-2 part is the syzygy quotient with its
    generator action recorded as matrices over the prime field. depth,
    u_dim and u0_dim record the truncation that certified the quotient.
    """

    pres: object
    l0_rank: int
    l1_rank: int
    l2_dim: int
    d1: tuple
    d2: tuple
    gen_action: tuple
    depth: int
    u_dim: int
    u0_dim: int = field(default=0)


def _f_window(nvars, r, degree):
    """Basis keys (component, monomial) for coefficients up to a degree."""
    return [(i, m) for i in range(r) for m in _monos_upto(nvars, degree)]


def _syzygy_gens(pres, degree):
    """Kernel generators of (c_i) -> sum c_i f_i on the degree window."""
    p = pres.char
    rels = [dict(r) for r in pres.relations]
    r = len(rels)
    cols = _f_window(pres.nvars, r, degree)
    top = max(max(sum(m) for m in rel) for rel in rels)
    targets = _monos_upto(pres.nvars, degree + top)
    tpos = {m: i for i, m in enumerate(targets)}
    rows = [[0] * len(cols) for _ in targets]
    for c, (i, m) in enumerate(cols):
        for rm, rc in rels[i].items():
            mm = tuple(a + b for a, b in zip(rm, m))
            rows[tpos[mm]][c] = (rows[tpos[mm]][c] + rc) % p
    sol = solve_affine((p,) * len(cols), rows, [0] * len(targets), (p,) * len(targets))
    gens = []
    for vec in sol.kernel:
        gens.append({cols[c]: vec[c] for c in range(len(cols)) if vec[c]})
    return gens


def _koszul_rows(pres, degree):
    """All pair rows f_i e_j - f_j e_i times monomials inside the window."""
    p = pres.char
    rels = [dict(r) for r in pres.relations]
    fdeg = [max(sum(m) for m in rel) for rel in rels]
    out = []
    for i in range(len(rels)):
        for j in range(i + 1, len(rels)):
            room = degree - max(fdeg[i], fdeg[j])
            for m in _monos_upto(pres.nvars, max(room, -1)):
                row = {}
                for rm, rc in rels[i].items():
                    key = (j, tuple(a + b for a, b in zip(rm, m)))
                    row[key] = (row.get(key, 0) + rc) % p
                for rm, rc in rels[j].items():
                    key = (i, tuple(a + b for a, b in zip(rm, m)))
                    row[key] = (row.get(key, 0) - rc) % p
                row = {k: v for k, v in row.items() if v}
                if row:
                    out.append(row)
    return out


def build_ls_complex(pres, depth=None):
    """Assemble the three-term complex of a presented algebra.

    The syzygy module is computed on a degree window and quotiented by the
    pair rows; the window must be one degree wider than needed, so the
    quotient dimension can be seen to stabilize. NotFiniteDimensional is
    raised when it does not.
    """
    p = pres.char
    g = pres.nvars
    rels = [dict(r) for r in pres.relations]
    r = len(rels)
    d1 = tuple(
        tuple(pres.element(_diff(rel, k, p)) for k in range(g)) for rel in rels
    )
    if r == 0:
        return LSComplex(pres, g, 0, 0, d1, (), tuple(() for _ in range(g)), 0, 0)
    top = max(max(sum(m) for m in rel) for rel in rels)
    D = depth if depth is not None else pres.bound + top + 1
    small = _syzygy_gens(pres, D - 1)
    ech_small = _Ech(p)
    for row in _koszul_rows(pres, D - 1):
        ech_small.insert(row)
    reps = []
    for vec in small:
        if ech_small.insert(vec, tag=len(reps)):
            reps.append(vec)
    wide = _syzygy_gens(pres, D)
    ech = _Ech(p)
    for row in _koszul_rows(pres, D):
        ech.insert(row)
    w_rank = ech.rank()
    for t, vec in enumerate(reps):
        if not ech.insert(vec, tag=t):
            raise NotFiniteDimensional(
                f"syzygy class {t} collapses one degree up; widen the depth"
            )
    if len(wide) - w_rank != len(reps):
        raise NotFiniteDimensional(
            f"syzygy quotient does not stabilize at depth {D}"
        )
    gen_action = []
    for k in range(g):
        unit = tuple(1 if i == k else 0 for i in range(pres.nvars))
        cols = []
        for vec in reps:
            shifted = {}
            for (i, m), c in vec.items():
                shifted[(i, tuple(a + b for a, b in zip(m, unit)))] = c
            coords = ech.coords(shifted)
            if coords is None:
                raise CheckFailed("generator action leaves the stable window")
            cols.append(tuple(coords.get(t, 0) for t in range(len(reps))))
        gen_action.append(tuple(cols))
    d2 = []
    for vec in reps:
        comps = []
        for i in range(r):
            comps.append(pres.element({m: c for (j, m), c in vec.items() if j == i}))
        d2.append(tuple(comps))
    ring, _, _ = pres.ring()
    for row in d2:
        for k in range(g):
            acc = ring.zero
            for i in range(r):
                acc = ring.add[acc][ring.mul[row[i]][d1[i][k]]]
            if acc != ring.zero:
                raise CheckFailed("composite differential is nonzero")
    return LSComplex(
        pres,
        g,
        r,
        len(reps),
        d1,
        tuple(d2),
        tuple(gen_action),
        D,
        len(wide),
        w_rank,
    )


def _logp(count, p):
    k = 0
    while count > 1:
        if count % p:
            raise CheckFailed("solution count is not a power of the field size")
        count //= p
        k += 1
    return k


def _act_matrix(mod, dec, b):
    """Coordinate matrix of a ring element acting on the module."""
    dm = len(dec.moduli)
    cols = []
    for c in range(dm):
        unit = tuple(1 if i == c else 0 for i in range(dm))
        cols.append(dec.to_vec[mod.act[b][dec.from_vec[unit]]])
    return cols


def t_functor(pres, mod, degree, complex=None):
    """Dimension of the tangent cohomology in the given degree.

    mod must be a module over the realized quotient ring; degree is 0, 1
    or 2. A prebuilt complex can be passed to avoid rebuilding it.
    """
    if degree not in (0, 1, 2):
        raise UsageError("degree must be 0, 1 or 2")
    ring, _, _ = pres.ring()
    if mod.ring != ring:
        raise TargetMismatch("module is not over the presented ring")
    ls = complex if complex is not None else build_ls_complex(pres)
    p = pres.char
    dec = mod.coords
    if any(m != p for m in dec.moduli):
        raise CheckFailed("module is not a vector space over the prime field")
    dm = len(dec.moduli)
    g, r, l2 = ls.l0_rank, ls.l1_rank, ls.l2_dim
    acts = {}

    def act(b):
        if b not in acts:
            acts[b] = _act_matrix(mod, dec, b)
        return acts[b]

    def solve_dim(nvars_, rows_):
        if nvars_ == 0:
            return 0
        sol = solve_affine((p,) * nvars_, rows_, [0] * len(rows_), (p,) * len(rows_))
        return _logp(sol.count, p)

    def rank(nvars_, vecs):
        if nvars_ == 0 or not vecs:
            return 0
        return _logp(span_count((p,) * nvars_, vecs), p)

    if degree == 0:
        rows = []
        for i in range(r):
            mats = [act(ls.d1[i][k]) for k in range(g)]
            for t in range(dm):
                row = [0] * (g * dm)
                for k in range(g):
                    for c in range(dm):
                        row[k * dm + c] = mats[k][c][t]
                rows.append(row)
        return solve_dim(g * dm, rows)

    if degree == 1:
        rows = []
        for row_b in ls.d2:
            mats = [act(row_b[i]) for i in range(r)]
            for t in range(dm):
                row = [0] * (r * dm)
                for i in range(r):
                    for c in range(dm):
                        row[i * dm + c] = mats[i][c][t]
                rows.append(row)
        k1 = solve_dim(r * dm, rows)
        image = []
        for k in range(g):
            mats = [act(ls.d1[i][k]) for i in range(r)]
            for c in range(dm):
                vec = [0] * (r * dm)
                for i in range(r):
                    col = mats[i][c]
                    for t in range(dm):
                        vec[i * dm + t] = col[t]
                image.append(tuple(vec))
        return k1 - rank(r * dm, image)

    rows = []
    xs = [
        pres.element({tuple(1 if i == k else 0 for i in range(pres.nvars)): 1})
        for k in range(pres.nvars)
    ]
    for k in range(g):
        xmat = act(xs[k])
        for b in range(l2):
            for t in range(dm):
                row = [0] * (l2 * dm)
                for bb in range(l2):
                    coef = ls.gen_action[k][b][bb]
                    if coef:
                        row[bb * dm + t] = (row[bb * dm + t] + coef) % p
                for c in range(dm):
                    row[b * dm + c] = (row[b * dm + c] - xmat[c][t]) % p
                rows.append(row)
    h2 = solve_dim(l2 * dm, rows)
    image = []
    for i in range(r):
        for c in range(dm):
            vec = [0] * (l2 * dm)
            for b in range(l2):
                col = act(ls.d2[b][i])[c]
                for t in range(dm):
                    vec[b * dm + t] = col[t]
            image.append(tuple(vec))
    return h2 - rank(l2 * dm, image)


def t_dimensions(pres, mod, depth=None):
    """The triple (T0, T1, T2) computed over one shared complex."""
    ls = build_ls_complex(pres, depth)
    return tuple(t_functor(pres, mod, d, complex=ls) for d in (0, 1, 2))
