"""Degree-truncated free commutative algebras and fiber-product covers.

Monomials are sorted tuples of letters; polynomials are dicts mapping
monomials to nonzero coefficients. Coefficients are plain integers when the
base is None and element indices of an operation-table ring otherwise. The
covering checks work degree by degree: the maps involved preserve degree,
so each degree slice is a finite exact linear problem.
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from .errors import (
    CheckFailed,
    DegreeOverflow,
    NoMatch,
    NotSurjective,
    ShapeMismatch,
    UsageError,
)
from .exactlin import cyclic_decomposition, integer_kernel_basis, solve_affine


def _key(letter):
    # letters may be strings or nested tuples; repr gives one total order
    return repr(letter)


def _mono(letters):
    return tuple(sorted(letters, key=_key))


def _coeff_ops(base):
    """zero, add, neg, mul for the chosen coefficients."""
    if base is None:
        return 0, lambda a, b: a + b, lambda a: -a, lambda a, b: a * b
    return (
        base.zero,
        lambda a, b: base.add[a][b],
        lambda a: base.sub(base.zero, a),
        lambda a, b: base.mul[a][b],
    )


@dataclass
class FiniteSetMap:
    """A total map between finite sets; elements keep their listed order."""

    source: tuple
    target: tuple
    table: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        self.source = tuple(self.source)
        self.target = tuple(self.target)
        self.table = tuple(self.table)
        if len(set(self.source)) != len(self.source):
            raise UsageError("source has repeated elements")
        if len(set(self.target)) != len(self.target):
            raise UsageError("target has repeated elements")
        if len(self.table) != len(self.source):
            raise ShapeMismatch("table length does not match the source")
        tset = set(self.target)
        for v in self.table:
            if v not in tset:
                raise UsageError(f"value {v!r} is not in the target")
        self._pos = {e: i for i, e in enumerate(self.source)}

    def __call__(self, elem):
        return self.table[self._pos[elem]]

    def is_surjective(self):
        return set(self.table) == set(self.target)

    def fiber(self, value):
        """Source elements mapping to value, in source order."""
        return tuple(e for e, v in zip(self.source, self.table) if v == value)


def monomials(letters, degree):
    """All degree-d monomials over the letters, each a sorted tuple."""
    if degree < 0:
        raise UsageError("degree must be at least 0")
    return tuple(combinations_with_replacement(sorted(letters, key=_key), degree))


def degree_slices(poly):
    """Split a polynomial into {degree: homogeneous part}."""
    out = {}
    for m, c in poly.items():
        out.setdefault(len(m), {})[m] = c
    return out


class TruncFreeAlgebra:
    """Polynomials in the listed generators, truncated above a degree bound.

    base None means integer coefficients; otherwise base is a ring given by
    operation tables and coefficients are its element indices. Products
    whose degree would exceed the bound are rejected, never truncated.
    """

    def __init__(self, base, gens, bound, name=None):
        gens = tuple(gens)
        if len(set(gens)) != len(gens):
            raise UsageError("repeated generators")
        if bound < 0:
            raise UsageError("degree bound must be at least 0")
        self.base = base
        self.gens = gens
        self.bound = int(bound)
        self.name = name or f"free[{','.join(str(g) for g in gens)}]<= {bound}"
        self._czero, self._cadd, self._cneg, self._cmul = _coeff_ops(base)

    def monomials(self, degree):
        if degree > self.bound:
            raise DegreeOverflow(f"degree {degree} exceeds bound {self.bound}")
        return monomials(self.gens, degree)

    def zero(self):
        return {}

    def const(self, c):
        return {(): c} if c != self._czero else {}

    def one(self):
        return self.const(1 if self.base is None else self.base.one)

    def var(self, g):
        if g not in self.gens:
            raise UsageError(f"unknown generator {g!r}")
        if self.bound < 1:
            raise DegreeOverflow("bound 0 admits only constants")
        return {(g,): 1 if self.base is None else self.base.one}

    def add(self, u, v):
        out = dict(u)
        for m, c in v.items():
            s = self._cadd(out.get(m, self._czero), c)
            if s == self._czero:
                out.pop(m, None)
            else:
                out[m] = s
        return out

    def neg(self, u):
        return {m: self._cneg(c) for m, c in u.items()}

    def sub(self, u, v):
        return self.add(u, self.neg(v))

    def scale(self, c, u):
        out = {}
        for m, a in u.items():
            s = self._cmul(c, a)
            if s != self._czero:
                out[m] = s
        return out

    def mul(self, u, v):
        out = {}
        for m1, c1 in u.items():
            for m2, c2 in v.items():
                if len(m1) + len(m2) > self.bound:
                    raise DegreeOverflow(
                        f"degree {len(m1) + len(m2)} exceeds bound {self.bound}"
                    )
                c = self._cmul(c1, c2)
                if c == self._czero:
                    continue
                m = _mono(m1 + m2)
                s = self._cadd(out.get(m, self._czero), c)
                if s == self._czero:
                    out.pop(m, None)
                else:
                    out[m] = s
        return out

    def map_letters(self, u, setmap):
        """Relabel every letter along a set map; the induced algebra map."""
        out = {}
        for m, c in u.items():
            mm = _mono(setmap(letter) for letter in m)
            s = self._cadd(out.get(mm, self._czero), c)
            if s == self._czero:
                out.pop(mm, None)
            else:
                out[mm] = s
        return out


def _strip(vec, zero):
    return {k: c for k, c in vec.items() if c != zero}


def _push(vec, setmap, base=None):
    """Pushforward of a coefficient vector along a set map on its support."""
    z, add, _, _ = _coeff_ops(base)
    out = {}
    for x, c in vec.items():
        s = setmap(x)
        t = add(out.get(s, z), c)
        if t == z:
            out.pop(s, None)
        else:
            out[s] = t
    return out


def _proj(vec, side, base=None):
    """Push a vector of pair letters onto one component."""
    z, add, _, _ = _coeff_ops(base)
    out = {}
    for pair, c in vec.items():
        k = pair[side]
        t = add(out.get(k, z), c)
        if t == z:
            out.pop(k, None)
        else:
            out[k] = t
    return out


def _proj_poly(poly, side, base=None):
    """Project a polynomial in pair letters componentwise."""
    z, add, _, _ = _coeff_ops(base)
    out = {}
    for m, c in poly.items():
        mm = _mono(pair[side] for pair in m)
        t = add(out.get(mm, z), c)
        if t == z:
            out.pop(mm, None)
        else:
            out[mm] = t
    return out


def monoid_fiber_lift(qs, rs, f, g):
    """Merge two equal-image monomials into one monomial of pairs.

    Letters are grouped over the shared target and paired off in sorted
    order inside each group, so the result is deterministic and projects
    back onto both inputs.
    """
    if f.target != g.target:
        raise ShapeMismatch("maps do not share a target")
    qs = tuple(qs)
    rs = tuple(rs)
    if len(qs) != len(rs):
        raise NoMatch("monomials have different degrees")
    byq = {}
    for q in qs:
        byq.setdefault(f(q), []).append(q)
    byr = {}
    for r in rs:
        byr.setdefault(g(r), []).append(r)
    if set(byq) != set(byr) or any(len(byq[s]) != len(byr[s]) for s in byq):
        raise NoMatch("monomials have different images")
    out = []
    for s in byq:
        out.extend(zip(sorted(byq[s], key=_key), sorted(byr[s], key=_key)))
    return _mono(out)


def module_fiber_lift(u, v, f, g, base=None):
    """Lift a compatible pair of coefficient vectors to the pair letters.

    u is supported on the source of f, v on the source of g, and their
    pushforwards to the shared target must agree. The second component is
    matched first through the least-index preimage under f; what is left
    of the first component then rides along the least-index section of g.
    """
    if f.target != g.target:
        raise ShapeMismatch("maps do not share a target")
    if not f.is_surjective():
        raise NotSurjective("first map is not onto")
    if not g.is_surjective():
        raise NotSurjective("second map is not onto")
    z, add, neg, _ = _coeff_ops(base)
    u = _strip(u, z)
    v = _strip(v, z)
    if _push(u, f, base) != _push(v, g, base):
        raise NoMatch("components disagree over the shared target")
    qsec = {}
    for q, s in zip(f.source, f.table):
        qsec.setdefault(s, q)
    rsec = {}
    for r, s in zip(g.source, g.table):
        rsec.setdefault(s, r)
    out = {}

    def acc(pair, c):
        t = add(out.get(pair, z), c)
        if t == z:
            out.pop(pair, None)
        else:
            out[pair] = t

    for r in g.source:
        c = v.get(r, z)
        if c != z:
            acc((qsec[g(r)], r), c)
    rem = dict(u)
    for (q, _), c in list(out.items()):
        t = add(rem.get(q, z), neg(c))
        if t == z:
            rem.pop(q, None)
        else:
            rem[q] = t
    for q in f.source:
        c = rem.get(q, z)
        if c != z:
            acc((q, rsec[f(q)]), c)
    if _proj(out, 0, base) != u or _proj(out, 1, base) != v:
        raise CheckFailed("lift does not project back onto its inputs")
    return out


def _kernel_vectors(base, variables, equations):
    """Generators of the joint kernel of integer-coefficient equations.

    Each equation is a dict variable -> small integer; solutions assign a
    base coefficient to every variable. Over a finite base the additive
    group is split into cyclic coordinates first.
    """
    n = len(variables)
    if n == 0:
        return []
    pos = {x: i for i, x in enumerate(variables)}
    if base is None:
        rows = [[eq.get(x, 0) for x in variables] for eq in equations]
        gens = integer_kernel_basis(rows, n)
        return [
            {variables[i]: g[i] for i in range(n) if g[i]} for g in gens
        ]
    dec = cyclic_decomposition(base.n, base.add, base.zero)
    t = len(dec.moduli)
    if t == 0:
        return []
    moduli = tuple(dec.moduli) * n
    rows = []
    rowm = []
    for eq in equations:
        for j in range(t):
            row = [0] * (n * t)
            for x, c in eq.items():
                row[pos[x] * t + j] = c
            rows.append(row)
            rowm.append(dec.moduli[j])
    sol = solve_affine(moduli, rows, [0] * len(rows), rowm)
    out = []
    for gvec in sol.kernel:
        vec = {}
        for i, x in enumerate(variables):
            c = dec.from_vec[tuple(gvec[i * t : (i + 1) * t])]
            if c != base.zero:
                vec[x] = c
        if vec:
            out.append(vec)
    return out


def _mono_maps(f, g, degree):
    """The induced maps on degree-d monomials over both sources."""
    qd = monomials(f.source, degree)
    rd = monomials(g.source, degree)
    sd = monomials(f.target, degree)
    fd = FiniteSetMap(qd, sd, tuple(_mono(f(x) for x in m) for m in qd))
    gd = FiniteSetMap(rd, sd, tuple(_mono(g(x) for x in m) for m in rd))
    return fd, gd


def _fiber_generators(base, fd, gd):
    """Generators of {(u, v) : pushforwards agree} at one degree."""
    variables = [("q", m) for m in fd.source] + [("r", m) for m in gd.source]
    equations = []
    for s in fd.target:
        eq = {}
        for m in fd.fiber(s):
            eq[("q", m)] = 1
        for m in gd.fiber(s):
            eq[("r", m)] = -1
        if eq:
            equations.append(eq)
    gens = []
    for vec in _kernel_vectors(base, variables, equations):
        u = {m: c for (tag, m), c in vec.items() if tag == "q"}
        v = {m: c for (tag, m), c in vec.items() if tag == "r"}
        gens.append((u, v))
    return gens


def _lift_slice(u, v, f, g, degree, base=None):
    """Lift one homogeneous fiber element through the module and monoid steps."""
    z, add, _, _ = _coeff_ops(base)
    fd, gd = _mono_maps(f, g, degree)
    staged = module_fiber_lift(u, v, fd, gd, base)
    out = {}
    for (mq, mr), c in staged.items():
        m = monoid_fiber_lift(mq, mr, f, g)
        t = add(out.get(m, z), c)
        if t == z:
            out.pop(m, None)
        else:
            out[m] = t
    if _proj_poly(out, 0, base) != _strip(u, z) or _proj_poly(out, 1, base) != _strip(v, z):
        raise CheckFailed("cover lift does not project back onto its inputs")
    return out


@dataclass
class CoverReport:
    """Degreewise surjectivity record for a fiber-product covering map."""

    pairs: tuple
    per_degree: tuple
    lift: object = field(compare=False, repr=False)

    def all_covered(self):
        return all(ok for _, _, ok in self.per_degree)


def ring_fiber_cover_check(base, f, g, bound):
    """Verify degreewise that pair polynomials cover the fiber product.

    For each degree up to the bound, generators of the fiber product of
    the two free algebras over the shared one come from exact linear
    algebra; each is lifted through the monoid and module steps and the
    round trip is checked. The returned report keeps the lift for reuse
    on arbitrary elements within the bound.
    """
    if f.target != g.target:
        raise ShapeMismatch("maps do not share a target")
    if not f.is_surjective() or not g.is_surjective():
        raise NotSurjective("cover check needs surjections on both sides")
    pairs = _mono((q, r) for q in f.source for r in g.source if f(q) == g(r))
    per_degree = []
    for d in range(bound + 1):
        fd, gd = _mono_maps(f, g, d)
        gens = _fiber_generators(base, fd, gd)
        ok = True
        for u, v in gens:
            try:
                _lift_slice(u, v, f, g, d, base)
            except (NoMatch, CheckFailed):
                ok = False
        per_degree.append((d, len(gens), ok))

    def lift(u, v):
        """A preimage of the fiber element (u, v), degree slice by slice."""
        su = degree_slices(u)
        sv = degree_slices(v)
        out = {}
        for d in sorted(set(su) | set(sv)):
            if d > bound:
                raise DegreeOverflow(f"degree {d} exceeds bound {bound}")
            out.update(_lift_slice(su.get(d, {}), sv.get(d, {}), f, g, d, base))
        return out

    return CoverReport(pairs=pairs, per_degree=tuple(per_degree), lift=lift)


@dataclass
class KernelWitnessReport:
    """Outcome of hunting a pair-linear element killed by both projections."""

    found: bool
    anchor: object
    witness: dict
    nonzero: bool
    maps_to_zero: bool

    def holds(self):
        return self.found and self.nonzero and self.maps_to_zero


def kernel_witness_check(f, g):
    """Look for a nonzero alternating square of pairs projecting to zero.

    Any shared target value with two preimages on each side yields one:
    pair the first two preimages both ways with alternating signs. The
    coefficients are plain integers, so the witness stays valid over any
    base where 1 is distinct from 0.
    """
    if f.target != g.target:
        raise ShapeMismatch("maps do not share a target")
    for s in f.target:
        qf = f.fiber(s)
        rf = g.fiber(s)
        if len(qf) >= 2 and len(rf) >= 2:
            q0, q1 = qf[0], qf[1]
            r0, r1 = rf[0], rf[1]
            w = {
                ((q0, r0),): 1,
                ((q0, r1),): -1,
                ((q1, r1),): 1,
                ((q1, r0),): -1,
            }
            return KernelWitnessReport(
                found=True,
                anchor=s,
                witness=w,
                nonzero=len(w) == 4 and all(c != 0 for c in w.values()),
                maps_to_zero=not _proj_poly(w, 0) and not _proj_poly(w, 1),
            )
    return KernelWitnessReport(
        found=False, anchor=None, witness={}, nonzero=False, maps_to_zero=True
    )


@dataclass
class EqualizerReport:
    """Degreewise comparison of an algebra equalizer with its set core."""

    equalizer: tuple
    per_degree: tuple
    witness: dict

    def covered(self):
        return all(ok for _, _, ok in self.per_degree)


def equalizer_noncover_check(base, h1, h2, bound):
    """Compare the degreewise equalizer of two parallel maps with the set one.

    Monomials in letters the maps agree on always land in the equalizer;
    the check computes kernel generators of the degreewise difference map
    and tests each for support inside those monomials. The first straying
    generator is kept as a witness.
    """
    if h1.source != h2.source or h1.target != h2.target:
        raise ShapeMismatch("maps are not parallel")
    agree = tuple(x for x in h1.source if h1(x) == h2(x))
    agree_set = set(agree)
    per_degree = []
    witness = {}
    for d in range(bound + 1):
        variables = list(monomials(h1.source, d))
        equations = {}
        for m in variables:
            s1 = _mono(h1(x) for x in m)
            s2 = _mono(h2(x) for x in m)
            if s1 == s2:
                continue
            e1 = equations.setdefault(s1, {})
            e1[m] = e1.get(m, 0) + 1
            e2 = equations.setdefault(s2, {})
            e2[m] = e2.get(m, 0) - 1
        gens = _kernel_vectors(
            base, variables, [equations[s] for s in sorted(equations, key=_key)]
        )
        ok = True
        for vec in gens:
            if any(set(m) - agree_set for m in vec):
                ok = False
                if not witness:
                    witness = dict(vec)
        per_degree.append((d, tuple(gens), ok))
    return EqualizerReport(
        equalizer=agree, per_degree=tuple(per_degree), witness=witness
    )


def _letter_text(letter):
    if isinstance(letter, tuple):
        return "(" + ",".join(_letter_text(p) for p in letter) + ")"
    return str(letter)


def format_poly(poly):
    """Deterministic text for a monomial dict; the empty monomial prints as 1."""
    if not poly:
        return "0"
    parts = []
    for m in sorted(poly, key=lambda m: (len(m), repr(m))):
        c = poly[m]
        body = "*".join(_letter_text(x) for x in m)
        if isinstance(c, int) and c < 0:
            sign, mag = "-", -c
        else:
            sign, mag = "+", c
        if body and mag == 1:
            term = body
        elif body:
            term = f"{mag}*{body}"
        else:
            term = f"{mag}"
        parts.append((sign, term))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, term in parts[1:]:
        text += f" {sign} {term}"
    return text
