"""Exact linear algebra over products of finite cyclic groups.

The solvers here answer affine questions about maps between groups of the
form Z/m_1 x ... x Z/m_n: solve A x = b where unknown u is taken mod
moduli[u] and row r is a congruence mod row_moduli[r], enumerate the
solution coset, measure spans, and compute quotients of one spanned
subgroup by another.

Everything is reduced per prime to matrices over Z/p^K and eliminated with
a local Smith form (row and column operations, pivoting on the entry of
least p-valuation). GF(2) systems take a packed bitwise path. Results are
recombined across primes by CRT, so mixed moduli (say Z/4 x Z/3 x Z/2)
are handled uniformly.
"""

from dataclasses import dataclass
from math import gcd, lcm, prod

import numpy as np

from .config import GUARD
from .errors import ShapeMismatch, TooLarge, UsageError


def prime_power_factors(n):
    """Factor a positive integer into {prime: exponent}."""
    if n < 1:
        raise UsageError(f"cannot factor {n}")
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _crt_pair(a1, m1, a2, m2):
    # gcd(m1, m2) == 1
    if m1 == 1:
        return a2 % m2, m2
    if m2 == 1:
        return a1 % m1, m1
    inv = pow(m2, -1, m1)
    x = (a2 + m2 * (((a1 - a2) * inv) % m1)) % (m1 * m2)
    return x, m1 * m2


def crt_combine(residues, moduli):
    """Combine residues over pairwise coprime moduli into one residue."""
    a, m = 0, 1
    for r, q in zip(residues, moduli):
        a, m = _crt_pair(a, m, r, q)
    return a


def _pval(x, p, cap):
    v = 0
    while v < cap and x % p == 0:
        x //= p
        v += 1
    return v


def _local_smith(A, p, K, b=None, want_v=False, want_uinv=False):
    """Diagonalize A over Z/p^K in place: U A V = diag(p^d_0, p^d_1, ...).

    Returns (dexp, V, Uinv, b) where dexp lists the pivot valuations in
    order, V accumulates the column operations (so x = V z turns diagonal
    solutions into solutions of the original system), Uinv accumulates the
    inverse of the row operations, and b has had the row operations applied.
    Diagonal entries are exactly p**d (units absorbed into the row scale).
    """
    pK = p**K
    m, n = A.shape
    V = np.eye(n, dtype=np.int64) if want_v else None
    Uinv = np.eye(m, dtype=np.int64) if want_uinv else None
    dexp = []
    t = 0
    while t < min(m, n):
        sub = A[t:, t:]
        # valuation table; zeros (mod p^K) count as K and are never pivots
        vals = np.zeros(sub.shape, dtype=np.int64)
        for v in range(1, K + 1):
            vals += (sub % p**v == 0)
        best = int(vals.min(initial=K))
        if best >= K:
            break
        pos = np.argwhere(vals == best)[0]
        i0, j0 = int(pos[0]) + t, int(pos[1]) + t
        if i0 != t:
            A[[t, i0], :] = A[[i0, t], :]
            if b is not None:
                b[[t, i0]] = b[[i0, t]]
            if Uinv is not None:
                Uinv[:, [t, i0]] = Uinv[:, [i0, t]]
        if j0 != t:
            A[:, [t, j0]] = A[:, [j0, t]]
            if V is not None:
                V[:, [t, j0]] = V[:, [j0, t]]
        pv = p**best
        unit = int(A[t, t]) // pv
        if unit % p == 0:
            raise AssertionError("pivot lost its valuation")
        uinv_mult = pow(unit, -1, pK)
        A[t, :] = (A[t, :] * uinv_mult) % pK
        if b is not None:
            b[t] = (b[t] * uinv_mult) % pK
        if Uinv is not None:
            Uinv[:, t] = (Uinv[:, t] * unit) % pK
        # clear the pivot column below, then the pivot row to the right
        if t + 1 < m:
            coef = A[t + 1 :, t] // pv
            nz = coef != 0
            if nz.any():
                A[t + 1 :, :][nz] = (A[t + 1 :, :][nz] - np.outer(coef[nz], A[t, :])) % pK
                if b is not None:
                    b[t + 1 :][nz] = (b[t + 1 :][nz] - coef[nz] * b[t]) % pK
                if Uinv is not None:
                    Uinv[:, t] = (Uinv[:, t] + Uinv[:, t + 1 :][:, nz] @ coef[nz]) % pK
        if t + 1 < n:
            coefc = A[t, t + 1 :] // pv
            nz = coefc != 0
            if nz.any():
                A[:, t + 1 :][:, nz] = (A[:, t + 1 :][:, nz] - np.outer(A[:, t], coefc[nz])) % pK
                if V is not None:
                    V[:, t + 1 :][:, nz] = (V[:, t + 1 :][:, nz] - np.outer(V[:, t], coefc[nz])) % pK
        dexp.append(best)
        t += 1
    return dexp, V, Uinv, b


def _solve_gf2_packed(A, b):
    """Reduced row echelon over GF(2) with rows packed into bytes.

    A is (m, n) with 0/1 entries, b is (m,). Returns
    (particular, kernel_gens, free_count) or None if inconsistent.
    """
    m, n = A.shape
    aug = np.empty((m, n + 1), dtype=np.uint8)
    aug[:, :n] = A & 1
    aug[:, n] = b & 1
    P = np.packbits(aug, axis=1)
    P = np.unique(P, axis=0)
    m = P.shape[0]
    r = 0
    pivots = []
    for col in range(n):
        byte, bit = col >> 3, 0x80 >> (col & 7)
        hits = np.nonzero(P[r:, byte] & bit)[0]
        if hits.size == 0:
            continue
        i0 = r + int(hits[0])
        if i0 != r:
            P[[r, i0]] = P[[i0, r]]
        rows = np.nonzero(P[:, byte] & bit)[0]
        rows = rows[rows != r]
        if rows.size:
            P[rows] ^= P[r]
        pivots.append(col)
        r += 1
        if r == m:
            break
    bbyte, bbit = n >> 3, 0x80 >> (n & 7)
    if r < m and (P[r:, bbyte] & bbit).any():
        return None
    bits = np.unpackbits(P[:r], axis=1)[:, : n + 1] if r else np.zeros((0, n + 1), dtype=np.uint8)
    part = np.zeros(n, dtype=np.int64)
    for i, c in enumerate(pivots):
        part[c] = int(bits[i, n])
    pivset = set(pivots)
    free = [j for j in range(n) if j not in pivset]
    gens = []
    for j in free:
        g = np.zeros(n, dtype=np.int64)
        g[j] = 1
        for i, c in enumerate(pivots):
            g[c] = int(bits[i, j])
        gens.append(g)
    return part, gens, len(free)


def _solve_gfp(A, b, p):
    """Reduced row echelon over GF(p), p an odd prime.

    Same contract as _solve_gf2_packed: (particular, kernel_gens,
    free_count) or None if inconsistent.
    """
    m, n = A.shape
    aug = np.empty((m, n + 1), dtype=np.int32)
    aug[:, :n] = A % p
    aug[:, n] = b % p
    aug = np.unique(aug, axis=0)
    m = aug.shape[0]
    inv = np.zeros(p, dtype=np.int32)
    for x in range(1, p):
        inv[x] = pow(x, -1, p)
    r = 0
    pivots = []
    for col in range(n):
        hits = np.nonzero(aug[r:, col])[0]
        if hits.size == 0:
            continue
        i0 = r + int(hits[0])
        if i0 != r:
            aug[[r, i0]] = aug[[i0, r]]
        if aug[r, col] != 1:
            aug[r] = aug[r] * inv[aug[r, col]] % p
        rows = np.nonzero(aug[:, col])[0]
        rows = rows[rows != r]
        if rows.size:
            # (p-1)^2 stays well inside int32
            aug[rows] = (aug[rows] - aug[rows, col, None] * aug[r][None, :]) % p
        pivots.append(col)
        r += 1
        if r == m:
            break
    if r < m and aug[r:, n].any():
        return None
    part = np.zeros(n, dtype=np.int64)
    for i, c in enumerate(pivots):
        part[c] = int(aug[i, n])
    pivset = set(pivots)
    free = [j for j in range(n) if j not in pivset]
    gens = []
    for j in free:
        g = np.zeros(n, dtype=np.int64)
        g[j] = 1
        for i, c in enumerate(pivots):
            g[c] = (-int(aug[i, j])) % p
        gens.append(g)
    return part, gens, len(free)


@dataclass(frozen=True)
class AffineSolution:
    """The full solution set of an affine system: particular + span(kernel)."""

    moduli: tuple
    particular: tuple
    kernel: tuple
    count: int

    def enumerate(self, cap=None):
        """All solutions as sorted tuples; TooLarge if count exceeds the cap."""
        cap = GUARD.max_candidates if cap is None else cap
        if self.count > cap:
            raise TooLarge(f"{self.count} solutions exceeds cap {cap}")
        seen = {self.particular}
        frontier = [self.particular]
        while len(seen) < self.count and frontier:
            fresh = []
            for v in frontier:
                for g in self.kernel:
                    w = tuple((a + c) % m for a, c, m in zip(v, g, self.moduli))
                    if w not in seen:
                        seen.add(w)
                        fresh.append(w)
            frontier = fresh
        return sorted(seen)

    def contains(self, vec):
        diff = tuple((a - c) % m for a, c, m in zip(vec, self.particular, self.moduli))
        return in_span(self.moduli, self.kernel, diff)


def _as_matrix(rows, n):
    A = np.asarray(rows, dtype=np.int64)
    if A.ndim == 1 and A.size == 0:
        A = A.reshape(0, n)
    if A.ndim != 2 or A.shape[1] != n:
        raise ShapeMismatch(f"rows have shape {A.shape}, expected (*, {n})")
    return A


def solve_affine(moduli, rows, rhs, row_moduli):
    """Solve sum_u rows[r][u] * x[u] = rhs[r] (mod row_moduli[r]), x[u] in Z/moduli[u].

    Returns an AffineSolution (particular point, generators of the
    homogeneous solution subgroup, exact count) or None if inconsistent.
    The system must be well posed: changing x[u] by moduli[u] may not
    change any congruence, i.e. row_moduli[r] | rows[r][u] * moduli[u].
    """
    moduli = tuple(int(m) for m in moduli)
    if any(m < 1 for m in moduli):
        raise UsageError("moduli must be positive")
    n = len(moduli)
    A = _as_matrix(rows, n)
    b = np.asarray(rhs, dtype=np.int64)
    rm = np.asarray(row_moduli, dtype=np.int64)
    if A.shape[0] != b.shape[0] or A.shape[0] != rm.shape[0]:
        raise ShapeMismatch("rows, rhs and row_moduli disagree in length")
    if A.size and A.shape[0] * A.shape[1] > GUARD.max_system_cells:
        raise TooLarge(f"system has {A.shape[0] * A.shape[1]} cells")
    keep = rm != 1
    A, b, rm = A[keep], b[keep], rm[keep]
    if A.shape[0]:
        mv = np.array(moduli, dtype=np.int64)
        if ((A % rm[:, None]) * mv[None, :] % rm[:, None]).any():
            raise ShapeMismatch("system not well posed over the given moduli")
    primes = set()
    for m in moduli:
        primes |= set(prime_power_factors(m)) if m > 1 else set()
    for m in rm.tolist():
        primes |= set(prime_power_factors(int(m)))
    parts = []  # (p, K, kexp per unknown, particular, kernel gens, count)
    for p in sorted(primes):
        kexp = [_pval(m, p, 64) for m in moduli]
        K = max(
            kexp + [_pval(int(m), p, 64) for m in rm.tolist()],
            default=0,
        )
        if K == 0:
            continue
        pK = p**K
        jr = np.array([_pval(int(m), p, K) for m in rm.tolist()], dtype=np.int64)
        rkeep = jr > 0
        scale = p ** (K - jr[rkeep])
        Ap = (A[rkeep] % pK) * scale[:, None] % pK
        bp = (b[rkeep] % pK) * scale % pK
        if K == 1:
            got = _solve_gf2_packed(Ap, bp) if p == 2 else _solve_gfp(Ap, bp, p)
            if got is None:
                return None
            part, gens, nfree = got
            kernel_exp = nfree  # log_p of embedded kernel size
            dex_total = kernel_exp
        else:
            Amat = Ap.copy()
            bvec = bp.copy()
            dexp, V, _, bvec = _local_smith(Amat, p, K, b=bvec, want_v=True)
            r = len(dexp)
            mrows = Amat.shape[0]
            z = np.zeros(n, dtype=np.int64)
            for i in range(r):
                ci = int(bvec[i])
                if ci % p ** dexp[i] != 0:
                    return None
                z[i] = ci // p ** dexp[i]
            if any(int(bvec[i]) % pK != 0 for i in range(r, mrows)):
                return None
            part = (V @ z) % pK if V is not None else z % pK
            gens = []
            for i in range(r):
                if dexp[i] > 0:
                    gens.append((V[:, i] * p ** (K - dexp[i])) % pK)
            for i in range(r, n):
                gens.append(V[:, i] % pK)
            dex_total = sum(dexp) + (n - r) * K
        # reduce from the uniform Z/p^K picture to the true unknown moduli
        red = lambda vec: tuple(int(x) % p ** k for x, k in zip(vec, kexp))
        over = sum(K - k for k in kexp)
        count_p = p ** (dex_total - over)
        assert count_p >= 1
        gens_red = [g for g in (red(g) for g in gens) if any(g)]
        parts.append((p, kexp, red(part), gens_red, count_p))
    # CRT-combine the per-prime answers
    particular = [0] * n
    for u in range(n):
        res, mods = [], []
        for p, kexp, part, _, _ in parts:
            res.append(part[u])
            mods.append(p ** kexp[u])
        rest = moduli[u] // prod(mods) if mods else moduli[u]
        if rest > 1:
            res.append(0)
            mods.append(rest)
        particular[u] = crt_combine(res, mods) if mods else 0
    kernel = []
    for p, kexp, _, gens_red, _ in parts:
        for g in gens_red:
            vec = []
            for u in range(n):
                q = p ** kexp[u]
                rest = moduli[u] // q
                vec.append(crt_combine([g[u], 0], [q, rest]) if rest > 1 else g[u] % moduli[u])
            kernel.append(tuple(vec))
    count = prod(c for _, _, _, _, c in parts) if parts else 1
    return AffineSolution(
        moduli=moduli,
        particular=tuple(particular),
        kernel=tuple(kernel),
        count=count,
    )


def _int_row_reduce(rows, limit=None):
    """Integer row echelon by Euclidean operations, pivoting left of limit.

    Returns (rows, pivots) where pivots lists (row, col) pairs with
    positive pivot entries and zeros below each pivot. Columns at or past
    limit ride along unpivoted (used to carry identity blocks).
    """
    rows = [list(r) for r in rows]
    m = len(rows)
    ncols = len(rows[0]) if m else 0
    stop = ncols if limit is None else limit
    piv = []
    r0 = 0
    for c in range(stop):
        if r0 == m:
            break
        while True:
            live = [r for r in range(r0, m) if rows[r][c]]
            if not live:
                break
            rmin = min(live, key=lambda r: abs(rows[r][c]))
            rows[r0], rows[rmin] = rows[rmin], rows[r0]
            pv = rows[r0][c]
            done = True
            for r in range(r0 + 1, m):
                if rows[r][c]:
                    q = rows[r][c] // pv
                    if q:
                        rows[r] = [a - q * b for a, b in zip(rows[r], rows[r0])]
                    if rows[r][c]:
                        done = False
            if done:
                break
        if r0 < m and rows[r0][c]:
            if rows[r0][c] < 0:
                rows[r0] = [-a for a in rows[r0]]
            piv.append((r0, c))
            r0 += 1
    return rows, piv


def integer_kernel_basis(rows, n):
    """Basis of the integer kernel {x in Z^n : M x = 0} of an m x n matrix."""
    m = len(rows)
    for r in rows:
        if len(r) != n:
            raise ShapeMismatch(f"row has length {len(r)}, expected {n}")
    aug = [
        [rows[r][c] for r in range(m)] + [1 if j == c else 0 for j in range(n)]
        for c in range(n)
    ]
    red, _ = _int_row_reduce(aug, limit=m)
    out = []
    for row in red:
        if all(v == 0 for v in row[:m]) and any(row[m:]):
            out.append(tuple(row[m:]))
    return out


def integer_in_span(basis, vec):
    """Whether vec lies in the Z-span of the basis vectors."""
    basis = [list(b) for b in basis]
    if basis:
        red, piv = _int_row_reduce(basis)
    else:
        red, piv = [], []
    v = list(vec)
    for r, c in piv:
        if v[c]:
            q, rem = divmod(v[c], red[r][c])
            if rem:
                return False
            v = [a - q * b for a, b in zip(v, red[r])]
    return all(a == 0 for a in v)


def in_span(moduli, gens, target):
    """Is target in the subgroup of prod Z/moduli spanned by gens?"""
    gens = [tuple(g) for g in gens]
    if not gens:
        return all(t % m == 0 for t, m in zip(target, moduli))
    E = lcm(*moduli) if moduli else 1
    rows = [[g[u] for g in gens] for u in range(len(moduli))]
    sol = solve_affine((E,) * len(gens), rows, list(target), list(moduli))
    return sol is not None


def span_count(moduli, gens):
    """Order of the subgroup of prod Z/moduli spanned by gens."""
    gens = [tuple(g) for g in gens]
    if not gens:
        return 1
    E = lcm(*moduli) if moduli else 1
    rows = [[g[u] for g in gens] for u in range(len(moduli))]
    sol = solve_affine((E,) * len(gens), rows, [0] * len(moduli), list(moduli))
    return E ** len(gens) // sol.count


def same_span(moduli, gens_a, gens_b):
    return all(in_span(moduli, gens_b, g) for g in gens_a) and all(
        in_span(moduli, gens_a, g) for g in gens_b
    )


@dataclass(frozen=True)
class QuotientGroup:
    """A quotient big/small of spanned subgroups, with class representatives.

    divisors are prime powers > 1; classes are indexed by coordinate tuples
    c with 0 <= c[i] < divisors[i]; items pairs each coordinate tuple with a
    representative vector in the ambient group (an element of big whose
    class it is).
    """

    divisors: tuple
    size: int
    items: tuple  # ((coords, rep_vector), ...)

    def rep(self, coords):
        for c, v in self.items:
            if c == tuple(coords):
                return v
        raise UsageError(f"no class with coordinates {coords}")


def subgroup_quotient(moduli, big_gens, small_gens, rep_cap=None):
    """Compute span(big_gens)/span(small_gens) inside prod Z/moduli.

    small must be contained in big. Returns a QuotientGroup whose
    representatives are actual vectors from the big subgroup.
    """
    rep_cap = GUARD.max_candidates if rep_cap is None else rep_cap
    moduli = tuple(int(m) for m in moduli)
    big = [tuple(g) for g in big_gens]
    small = [tuple(g) for g in small_gens]
    for g in small:
        if not in_span(moduli, big, g):
            raise UsageError("small subgroup is not contained in big subgroup")
    s = len(big)
    if s == 0:
        return QuotientGroup(divisors=(), size=1, items=(((), tuple(0 for _ in moduli)),))
    E = lcm(*moduli) if moduli else 1
    t = len(small)
    rows = [[big[i][u] for i in range(s)] + [-small[j][u] for j in range(t)] for u in range(len(moduli))]
    sol = solve_affine((E,) * (s + t), rows, [0] * len(moduli), list(moduli))
    pre = [g[:s] for g in sol.kernel]  # generators of the preimage of small in Z/E^s
    per_prime = []
    for p, K in sorted(prime_power_factors(E).items()):
        pK = p**K
        cols = [[g[i] % pK for i in range(s)] for g in pre]
        Ap = np.array(cols, dtype=np.int64).T if cols else np.zeros((s, 0), dtype=np.int64)
        dexp, _, Uinv, _ = _local_smith(Ap.copy(), p, K, want_uinv=True)
        r = len(dexp)
        divs, reps = [], []
        for i in range(r):
            if dexp[i] > 0:
                divs.append(p ** dexp[i])
                reps.append(tuple(int(x) % pK for x in Uinv[:, i]))
        for i in range(r, s):
            divs.append(pK)
            reps.append(tuple(int(x) % pK for x in Uinv[:, i]))
        per_prime.append((p, K, divs, reps))
    divisors = []
    gen_zvecs = []  # z-vector in (Z/E)^s generating each cyclic factor
    for p, K, divs, reps in per_prime:
        for d, rep in zip(divs, reps):
            divisors.append(d)
            zvec = []
            for u in range(s):
                q = p**K
                rest = E // q
                zvec.append(crt_combine([rep[u], 0], [q, rest]) if rest > 1 else rep[u] % E)
            gen_zvecs.append(tuple(zvec))
    size = prod(divisors) if divisors else 1
    if size > rep_cap:
        raise TooLarge(f"quotient has {size} classes, cap {rep_cap}")
    order = sorted(range(len(divisors)), key=lambda i: (divisors[i], i))
    divisors_sorted = tuple(divisors[i] for i in order)
    gens_sorted = [gen_zvecs[i] for i in order]

    def phi(zvec):
        out = [0] * len(moduli)
        for i in range(s):
            zi = zvec[i]
            if zi:
                for u in range(len(moduli)):
                    out[u] = (out[u] + zi * big[i][u]) % moduli[u]
        return tuple(out)

    items = []
    coords = [0] * len(divisors_sorted)
    while True:
        z = [0] * s
        for c, g in zip(coords, gens_sorted):
            if c:
                for u in range(s):
                    z[u] = (z[u] + c * g[u]) % E
        items.append((tuple(coords), phi(z)))
        i = 0
        while i < len(coords):
            coords[i] += 1
            if coords[i] < divisors_sorted[i]:
                break
            coords[i] = 0
            i += 1
        else:
            break
        if not divisors_sorted:
            break
    return QuotientGroup(divisors=divisors_sorted, size=size, items=tuple(items))


@dataclass(frozen=True)
class GroupCoords:
    """Coordinates for a finite abelian group given by an addition table.

    moduli are prime-power cyclic orders; to_vec[i] gives the coordinates
    of element i and from_vec inverts it.
    """

    moduli: tuple
    to_vec: tuple
    from_vec: dict


def _order_of(add, zero, x):
    k, y = 1, x
    while y != zero:
        y = add[y][x]
        k += 1
    return k


def _mult(add, zero, x, k):
    y = zero
    for _ in range(k):
        y = add[y][x]
    return y


def _peel(add, zero, elems):
    # elems: the underlying set of a p-subgroup; returns [(gen, order), ...]
    if len(elems) == 1:
        return []
    orders = {x: _order_of(add, zero, x) for x in elems}
    mx = max(orders.values())
    g = min(x for x in elems if orders[x] == mx)
    cyc = []
    y = zero
    for _ in range(mx):
        cyc.append(y)
        y = add[y][g]
    rep = {}
    for x in sorted(elems):
        if x in rep:
            continue
        coset = []
        y = x
        for _ in range(mx):
            coset.append(y)
            y = add[y][g]
        lead = min(coset)
        for c in coset:
            rep[c] = lead
    qelems = sorted(set(rep.values()))
    qindex = {x: i for i, x in enumerate(qelems)}
    qadd = [[qindex[rep[add[a][b]]] for b in qelems] for a in qelems]
    qzero = qindex[rep[zero]]
    sub = _peel(qadd, qzero, list(range(len(qelems))))
    out = [(g, mx)]
    for qg, d in sub:
        h = qelems[qg]
        dh = _mult(add, zero, h, d)
        t = cyc.index(dh)
        c = t // d
        assert c * d == t, "cannot lift quotient generator"
        neg = _mult(add, zero, g, (mx - c) % mx)
        lifted = add[h][neg]
        assert _order_of(add, zero, lifted) == d
        out.append((lifted, d))
    return out


def cyclic_decomposition(n, add, zero):
    """Split a finite abelian group into prime-power cyclic coordinates.

    add is an n x n index table, zero the identity. The returned coordinates
    satisfy add[i][j] == from_vec[(to_vec[i] + to_vec[j]) mod moduli].
    """
    add = [list(r) for r in add]
    if n == 1:
        return GroupCoords(moduli=(), to_vec=((),), from_vec={(): zero})
    orders = [_order_of(add, zero, x) for x in range(n)]
    gens = []
    for p in sorted(prime_power_factors(n)):
        elems = [x for x in range(n) if _is_p_power(orders[x], p)]
        sub = _peel(add, zero, elems)
        sub.sort(key=lambda go: (-go[1], go[0]))
        gens.extend(sub)
    moduli = tuple(o for _, o in gens)
    assert prod(moduli) == n, "generators do not span"
    combos = [((), zero)]
    for g, q in gens:
        nxt = []
        for coords, e in combos:
            y = e
            for k in range(q):
                nxt.append((coords + (k,), y))
                y = add[y][g]
        combos = nxt
    from_vec = {c: e for c, e in combos}
    assert len(set(from_vec.values())) == n, "coordinates do not separate elements"
    to_vec = [None] * n
    for c, e in combos:
        to_vec[e] = c
    return GroupCoords(moduli=moduli, to_vec=tuple(to_vec), from_vec=from_vec)


def _is_p_power(k, p):
    while k % p == 0:
        k //= p
    return k == 1
