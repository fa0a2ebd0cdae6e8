"""Command-line front end: fixture loading, verb dispatch, census sweeps.

Verbs fall into three kinds. Computations (exal, exal2, split, split2,
baer-sum, sum2, compose, invert, tfun, obstruct, deform, kernel-witness)
answer a question and exit 0 when the answer was produced. Assertions
(validate2, iso2, cover-check, equalizer-check, defm-theorem, transitivity,
census) exit 1 when the asserted law fails, with a witness in the report.
Usage problems, unresolvable fixtures and guard overruns exit 2.

Reports are deterministic: the same fixtures and bounds produce the same
bytes. Census rows are computed in a worker pool but keyed and emitted in
canonical order. The machine-readable stream (--format jsonl) carries one
JSON object per report line group.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

from .config import set_max_candidates
from .defm import (
    based_trivial_2ext,
    check_transitivity_exactness,
    deformation_problem,
    deformations,
    obstruction,
    obstruction_vanishes,
    verify_deformation_theorem,
)
from .errors import CheckFailed, FixtureError, TooLarge, UsageError
from .ext2 import (
    baer_sum_2ext,
    compose,
    exal2_classify,
    invert,
    isomorphic_2ext,
    split_search,
    validate_2extension,
    validate_butterfly,
)
from .extn import (
    baer_sum,
    exal_classify,
    extension_from_factor_system,
    splittings,
    validate_extension,
)
from .finring import (
    FiniteModule,
    RingHom,
    Zn,
    module_from_ring,
    preset_ring,
    validate_ring,
    validate_ring_hom,
)
from .fixtures import FixtureBundle, builtin_bundle, load_fixture_dir
from .freealg import (
    FiniteSetMap,
    equalizer_noncover_check,
    format_poly,
    kernel_witness_check,
    ring_fiber_cover_check,
)
from .tfunctors import PresentedAlgebra, build_ls_complex, t_functor


@dataclass
class Report:
    code: int
    lines: list = field(default_factory=list)
    records: list = field(default_factory=list)

    def say(self, line, **record):
        self.lines.append(line)
        if record:
            self.records.append(record)


# ------------------------------------------------------------ resolution


def _structure_map(bundle, spec, B, ctx):
    """A base given as a map name, or as a ring name with a unique hom in."""
    if spec is None:
        return None
    if spec in bundle.maps:
        g = bundle.maps[spec]
        if not isinstance(g, RingHom):
            raise FixtureError(f"{ctx}: base {spec!r} is not a ring map")
        if g.dst != B:
            raise FixtureError(f"{ctx}: base map {spec!r} does not land in the algebra")
        return g
    A = bundle.ring(spec)
    homs = _all_ring_homs(A, B)
    if len(homs) != 1:
        raise FixtureError(
            f"{ctx}: {len(homs)} ring maps {spec} -> {B.name}; name the map instead"
        )
    return homs[0]


def _set_map(letters, images, name):
    src = tuple(s for s in letters.split(",") if s)
    if images is None:
        raise UsageError(f"missing images for {name}")
    table = tuple(s for s in images.split(",") if s)
    return src, table


# --------------------------------------------------------------- census


CENSUS_RINGS = ("Z2", "Z3", "F2[x]/(x^2)", "F4", "Z2xZ2", "Z4")
CENSUS_MAX_ALG = 4
CENSUS_MAX_MOD = 2


def catalog_rings(max_order):
    """Every commutative unital ring with 2..max_order elements, up to iso."""
    out = [preset_ring(name) for name in CENSUS_RINGS]
    out = [R for R in out if R.n <= max_order]
    return sorted(out, key=lambda R: (R.n, R.name))


def _all_ring_homs(A, B):
    out = []
    for tab in product(range(B.n), repeat=A.n):
        if tab[A.zero] != B.zero or tab[A.one] != B.one:
            continue
        ok = True
        for a in range(A.n):
            for b in range(A.n):
                if tab[A.add[a][b]] != B.add[tab[a]][tab[b]] or tab[A.mul[a][b]] != B.mul[tab[a]][tab[b]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(RingHom(src=A, dst=B, table=tab, name=f"h{len(out)}"))
    return out


def small_modules(B, max_order):
    """Module structures on cyclic groups of order <= max_order, zero first."""
    out = [
        FiniteModule(
            ring=B, n=1, add=((0,),), act=tuple((0,) for _ in range(B.n)), zero=0, name="0"
        )
    ]
    if max_order >= 2:
        for k, e in enumerate(_all_ring_homs(B, Zn(2))):
            act = tuple((0, e(b)) for b in range(B.n))
            out.append(
                FiniteModule(ring=B, n=2, add=((0, 1), (1, 0)), act=act, zero=0, name=f"M2.{k}")
            )
    return out


def _phi_tables(I, M, g):
    out = []
    for tab in product(range(M.n), repeat=I.n):
        if tab[I.zero] != M.zero:
            continue
        ok = all(
            tab[I.add[i][j]] == M.add[tab[i]][tab[j]] for i in range(I.n) for j in range(I.n)
        ) and all(
            tab[I.act[a][i]] == M.act[g(a)][tab[i]]
            for a in range(I.ring.n)
            for i in range(I.n)
        )
        if ok:
            out.append(tab)
    return out


def _prime_unit(B):
    """The structure map from the prime ring Z/char onto 1, 1+1, ..."""
    P = Zn(B.char)
    table = [B.zero]
    for _ in range(P.n - 1):
        table.append(B.add[table[-1]][B.one])
    return RingHom(src=P, dst=B, table=tuple(table), name=f"unit_{B.name}")


def census_problems(max_alg, max_mod):
    """Deformation problems within bounds, in canonical sweep order."""
    rings = catalog_rings(max_alg)
    for A in rings:
        for I in small_modules(A, max_mod):
            cls = exal_classify(A, I)
            for coords, rep in cls.reps:
                om = extension_from_factor_system(cls.space, rep, name=f"om{coords}")
                for B in rings:
                    for gi, g in enumerate(_all_ring_homs(A, B)):
                        for M in small_modules(B, max_mod):
                            if M.n == 1:
                                continue
                            for tab in _phi_tables(I, M, g):
                                label = (
                                    f"{A.name}|{I.name}|{''.join(map(str, coords))}"
                                    f"|{B.name}|g{gi}|{M.name}|{''.join(map(str, tab))}"
                                )
                                yield label, deformation_problem(om, g, M, tab, name=label)


def _census_guard(max_alg, max_mod):
    if max_alg > CENSUS_MAX_ALG:
        raise TooLarge(
            f"census catalog stops at rings of order {CENSUS_MAX_ALG}; asked for {max_alg}"
        )
    if max_mod > CENSUS_MAX_MOD:
        raise TooLarge(
            f"census catalog stops at modules of order {CENSUS_MAX_MOD}; asked for {max_mod}"
        )


def _exal_row(B, M):
    unit = _prime_unit(B)
    cls = exal_classify(B, M, base_hom=unit)
    zero = cls.class_of_extension(
        extension_from_factor_system(cls.space, (0,) * len(cls.space.moduli))
    )
    coords = [c for c, _ in cls.reps]
    exts = {c: cls.extension_for(c) for c in coords}
    bad = []
    for c1 in coords:
        for c2 in coords:
            got = cls.class_of_extension(baer_sum(exts[c1], exts[c2]))
            if got != cls.add(c1, c2):
                bad.append(f"sum {c1}+{c2} landed in {got}")
        if cls.class_of_extension(baer_sum(exts[c1], exts[zero])) != c1:
            bad.append(f"zero is not neutral at {c1}")
        if cls.class_of_extension(baer_sum(exts[c1], exts[cls.neg(c1)])) != zero:
            bad.append(f"no inverse at {c1}")
    return cls.size, cls.divisors, bad


def _exal2_row(B, M):
    unit = _prime_unit(B)
    cls = exal2_classify(B, M, base_hom=unit)
    ks = list(range(cls.size))
    zero = cls.class_of(based_trivial_2ext(unit, M))
    bad = []
    add = {}
    for k1 in ks:
        for k2 in ks:
            add[(k1, k2)] = cls.add(k1, k2)
    for k1 in ks:
        for k2 in ks:
            if add[(k1, k2)] != add[(k2, k1)]:
                bad.append(f"sum not commutative at ({k1},{k2})")
            for k3 in ks:
                if cls.add(add[(k1, k2)], k3) != cls.add(k1, add[(k2, k3)]):
                    bad.append(f"sum not associative at ({k1},{k2},{k3})")
    for k in ks:
        if add[(k, zero)] != k:
            bad.append(f"zero is not neutral at {k}")
        if all(add[(k, j)] != zero for j in ks):
            bad.append(f"no inverse at {k}")
    return cls.size, bad


def _run_rows(tasks):
    """Evaluate index-keyed callables in a pool, return results in order."""
    with ThreadPoolExecutor(max_workers=4) as pool:
        futures = [(k, pool.submit(fn)) for k, fn in enumerate(tasks)]
        return [f.result() for _, f in sorted(futures, key=lambda kv: kv[0])]


def _census(report, max_alg, max_mod, suite):
    _census_guard(max_alg, max_mod)
    rings = catalog_rings(max_alg)
    violations = 0
    if suite in ("exal", "all"):
        tasks = []
        keys = []
        for B in rings:
            for M in small_modules(B, max_mod):
                keys.append((B, M))
                if M.n == 1:
                    tasks.append(lambda: None)
                else:
                    tasks.append(lambda B=B, M=M: _exal_row(B, M))
        for (B, M), row in zip(keys, _run_rows(tasks)):
            if row is None:
                report.say(
                    f"exal {B.name} {M.name}: skipped (zero module)",
                    suite="exal",
                    ring=B.name,
                    module=M.name,
                    skipped=True,
                )
                continue
            size, divisors, bad = row
            violations += len(bad)
            status = "group law ok" if not bad else "VIOLATION " + "; ".join(bad)
            report.say(
                f"exal {B.name} {M.name}: size {size} divisors {tuple(divisors)} {status}",
                suite="exal",
                ring=B.name,
                module=M.name,
                size=size,
                divisors=list(divisors),
                violations=bad,
            )
    if suite in ("exal2", "all"):
        tasks = []
        keys = []
        for B in rings:
            for M in small_modules(B, max_mod):
                if M.n == 1:
                    continue
                keys.append((B, M))
                tasks.append(lambda B=B, M=M: _exal2_row(B, M))
        for (B, M), (size, bad) in zip(keys, _run_rows(tasks)):
            violations += len(bad)
            status = "group law ok" if not bad else "VIOLATION " + "; ".join(bad)
            report.say(
                f"exal2 {B.name} {M.name}: size {size} {status}",
                suite="exal2",
                ring=B.name,
                module=M.name,
                size=size,
                violations=bad,
            )
    if suite in ("defm", "all"):
        probs = list(census_problems(max_alg, max_mod))
        rows = _run_rows([lambda p=p: verify_deformation_theorem(p) for _, p in probs])
        obstructed = 0
        for (label, _), rep in zip(probs, rows):
            ok = rep.holds()
            if not rep.vanishes:
                obstructed += 1
            if not ok:
                violations += 1
            report.say(
                f"defm {label}: {'ok' if ok else 'VIOLATION'} vanishes={rep.vanishes}"
                f" classes={rep.deformation_count}",
                suite="defm",
                problem=label,
                ok=ok,
                vanishes=rep.vanishes,
                classes=rep.deformation_count,
            )
        report.say(
            f"defm problems: {len(probs)}, obstructed: {obstructed}",
            suite="defm",
            problems=len(probs),
            obstructed=obstructed,
        )
    report.say(f"violations: {violations}", violations=violations)
    return 0 if violations == 0 else 1


# ---------------------------------------------------------------- verbs


def _verb_exal(args, bundle, report):
    B = bundle.ring(args.alg)
    M = bundle.module(args.mod)
    base = _structure_map(bundle, args.base, B, "exal")
    cls = exal_classify(B, M, base_hom=base)
    over = f" over {args.base}" if args.base else ""
    plural = "es" if cls.size != 1 else ""
    report.say(
        f"Exal({args.alg}, {args.mod}){over}: {cls.size} class{plural},"
        f" divisors {tuple(cls.divisors)}",
        verb="exal",
        alg=args.alg,
        mod=args.mod,
        base=args.base,
        size=cls.size,
        divisors=list(cls.divisors),
    )
    for coords, _ in cls.reps:
        ext = cls.extension_for(coords)
        report.say(
            f"class {coords}: total of order {ext.total.n}, char {ext.total.char}",
            coords=list(coords),
            total_order=ext.total.n,
            total_char=ext.total.char,
        )
    return 0


def _verb_split(args, bundle, report):
    ext = bundle.extension(args.extension)
    validate_extension(ext)
    secs = splittings(ext)
    report.say(
        f"{args.extension}: {len(secs)} ring sections",
        verb="split",
        extension=args.extension,
        sections=len(secs),
    )
    return 0


def _verb_baer_sum(args, bundle, report):
    e1 = bundle.extension(args.left)
    e2 = bundle.extension(args.right)
    out = baer_sum(e1, e2)
    validate_extension(out)
    split = bool(splittings(out))
    report.say(
        f"{args.left} + {args.right}: total of order {out.total.n}, char {out.total.char},"
        f" {'split' if split else 'not split'}",
        verb="baer-sum",
        left=args.left,
        right=args.right,
        total_order=out.total.n,
        total_char=out.total.char,
        split=split,
    )
    return 0


def _verb_validate2(args, bundle, report):
    xi = bundle.two_extension(args.fixture)
    validate_2extension(xi)
    report.say(f"PASS: {args.fixture} is a 2-extension", verb="validate2", fixture=args.fixture, ok=True)
    return 0


def _verb_compose(args, bundle, report):
    b1 = bundle.butterfly(args.first)
    b2 = bundle.butterfly(args.second)
    out = compose(b1, b2)
    validate_butterfly(out)
    report.say(
        f"{args.first} . {args.second}: butterfly over ring of order {out.ring.n}",
        verb="compose",
        first=args.first,
        second=args.second,
        ring_order=out.ring.n,
    )
    return 0


def _verb_invert(args, bundle, report):
    bf = bundle.butterfly(args.butterfly)
    out = invert(bf)
    validate_butterfly(out)
    report.say(
        f"{args.butterfly}^-1: butterfly over ring of order {out.ring.n}",
        verb="invert",
        butterfly=args.butterfly,
        ring_order=out.ring.n,
    )
    return 0


def _verb_sum2(args, bundle, report):
    x1 = bundle.two_extension(args.left)
    x2 = bundle.two_extension(args.right)
    out = baer_sum_2ext(x1, x2)
    validate_2extension(out)
    split = split_search(out) is not None
    report.say(
        f"{args.left} + {args.right}: middle ring of order {out.ring.n},"
        f" {'split' if split else 'not split'}",
        verb="sum2",
        left=args.left,
        right=args.right,
        ring_order=out.ring.n,
        split=split,
    )
    return 0


def _verb_split2(args, bundle, report):
    xi = bundle.two_extension(args.fixture)
    s = split_search(xi)
    if s is None:
        report.say(f"{args.fixture}: no splitting", verb="split2", fixture=args.fixture, split=False)
    else:
        report.say(
            f"{args.fixture}: splitting over ring of order {s.ring.n}",
            verb="split2",
            fixture=args.fixture,
            split=True,
            ring_order=s.ring.n,
        )
    return 0


def _verb_iso2(args, bundle, report):
    x1 = bundle.two_extension(args.left)
    x2 = bundle.two_extension(args.right)
    ok = isomorphic_2ext(x1, x2)
    report.say(
        f"{args.left} {'~' if ok else '!~'} {args.right}",
        verb="iso2",
        left=args.left,
        right=args.right,
        isomorphic=bool(ok),
    )
    return 0 if ok else 1


def _verb_exal2(args, bundle, report):
    B = bundle.ring(args.alg)
    M = bundle.module(args.mod)
    base = _structure_map(bundle, args.base, B, "exal2")
    pres = _load_presentation(args.presentation) if args.presentation else None
    cls = exal2_classify(B, M, base_hom=base, presentation=pres)
    over = f" over {args.base}" if args.base else ""
    plural = "es" if cls.size != 1 else ""
    report.say(
        f"Exal2({args.alg}, {args.mod}){over}: {cls.size} class{plural}"
        f" ({cls.candidates} candidates examined)",
        verb="exal2",
        alg=args.alg,
        mod=args.mod,
        base=args.base,
        size=cls.size,
        candidates=cls.candidates,
    )
    report.say(cls.frame_report, frame_report=cls.frame_report)
    return 0


def _appendix_maps():
    f = FiniteSetMap(("x", "y"), ("t",), ("t", "t"), name="f")
    g = FiniteSetMap(("x'", "y'"), ("t",), ("t", "t"), name="g")
    return f, g


def _verb_cover_check(args, bundle, report):
    base = bundle.ring(args.base)
    validate_ring(base)
    if args.q is None and args.r is None:
        f, g = _appendix_maps()
    else:
        qsrc, qtab = _set_map(args.q, args.f, "--f")
        rsrc, rtab = _set_map(args.r, args.g, "--g")
        tgt = tuple(s for s in args.s.split(",") if s)
        f = FiniteSetMap(qsrc, tgt, qtab, name="f")
        g = FiniteSetMap(rsrc, tgt, rtab, name="g")
    rep = ring_fiber_cover_check(base, f, g, args.bound)
    for d, gens, ok in rep.per_degree:
        report.say(
            f"degree {d}: {gens} generators {'covered' if ok else 'NOT covered'}",
            verb="cover-check",
            degree=d,
            generators=gens,
            covered=ok,
        )
    if rep.all_covered():
        report.say("PASS: covering in all checked degrees", ok=True)
        return 0
    report.say("FAIL: some degree is not covered", ok=False)
    return 1


def _verb_kernel_witness(args, bundle, report):
    if args.q is None:
        f, g = _appendix_maps()
    else:
        qsrc, qtab = _set_map(args.q, args.f, "--f")
        rsrc, rtab = _set_map(args.r, args.g, "--g")
        tgt = tuple(s for s in args.s.split(",") if s)
        f = FiniteSetMap(qsrc, tgt, qtab, name="f")
        g = FiniteSetMap(rsrc, tgt, rtab, name="g")
    rep = kernel_witness_check(f, g)
    if not rep.found:
        report.say("no pair-linear kernel witness", verb="kernel-witness", found=False)
        return 0
    report.say(
        f"witness over fiber of {rep.anchor!r}: {format_poly(rep.witness)}",
        verb="kernel-witness",
        found=True,
        anchor=rep.anchor,
        witness=format_poly(rep.witness),
        nonzero=rep.nonzero,
        maps_to_zero=rep.maps_to_zero,
    )
    report.say(
        f"nonzero: {'yes' if rep.nonzero else 'no'};"
        f" maps to zero on both sides: {'yes' if rep.maps_to_zero else 'no'}"
    )
    return 0 if rep.holds() else 1


def _verb_equalizer_check(args, bundle, report):
    base = bundle.ring(args.base)
    if args.q is None:
        h1 = FiniteSetMap(("x", "y"), ("x", "y"), ("x", "y"), name="id")
        h2 = FiniteSetMap(("x", "y"), ("x", "y"), ("y", "x"), name="swap")
    else:
        src = tuple(s for s in args.q.split(",") if s)
        tgt = tuple(s for s in args.s.split(",") if s)
        h1 = FiniteSetMap(src, tgt, tuple(args.h1.split(",")), name="h1")
        h2 = FiniteSetMap(src, tgt, tuple(args.h2.split(",")), name="h2")
    rep = equalizer_noncover_check(base, h1, h2, args.bound)
    for d, gens, ok in rep.per_degree:
        report.say(
            f"degree {d}: {len(gens)} kernel generators {'covered' if ok else 'NOT covered'}",
            verb="equalizer-check",
            degree=d,
            generators=[format_poly(g) for g in gens],
            covered=ok,
        )
    if rep.covered():
        report.say("PASS: equalizer is covered", ok=True)
        return 0
    report.say(f"FAIL: witness {format_poly(rep.witness)}", ok=False, witness=format_poly(rep.witness))
    return 1


def _load_presentation(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read presentation file: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"presentation file is not valid JSON: {exc}") from exc
    try:
        relations = [
            [(tuple(exps), int(c)) for exps, c in rel] for rel in data.get("relations", [])
        ]
        rules = [
            (tuple(lead), [(tuple(exps), int(c)) for exps, c in rhs])
            for lead, rhs in data.get("rules", [])
        ]
        return PresentedAlgebra(
            char=data["char"],
            gens=tuple(data["gens"]),
            relations=relations,
            rules=rules,
            bound=data["bound"],
            name=data.get("name"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed presentation file: {exc}") from exc


def _tfun_module(pres, spec, bundle):
    ring, values, index = pres.ring()
    if spec == "self":
        return module_from_ring(ring)
    if spec == "residue":
        const = pres.basis.index((0,) * pres.nvars)
        eps = RingHom(
            src=ring, dst=Zn(pres.char), table=tuple(v[const] for v in values), name="eps"
        )
        validate_ring_hom(eps)
        act = tuple(tuple((eps(b) * m) % pres.char for m in range(pres.char)) for b in range(ring.n))
        add = tuple(tuple((a + b) % pres.char for b in range(pres.char)) for a in range(pres.char))
        return FiniteModule(ring=ring, n=pres.char, add=add, act=act, zero=0, name="residue")
    M = bundle.module(spec)
    if M.ring != ring:
        raise FixtureError(f"module {spec!r} is not over the presented ring")
    return M


def _verb_tfun(args, bundle, report):
    pres = _load_presentation(args.pres)
    mod = _tfun_module(pres, args.mod, bundle)
    ls = build_ls_complex(pres)
    degrees = (0, 1, 2) if args.degree == "all" else (int(args.degree),)
    dims = {}
    for d in degrees:
        dims[d] = t_functor(pres, mod, d, complex=ls)
    for d in degrees:
        report.say(
            f"T^{d}({pres.name}; {args.mod}) has dimension {dims[d]} over F_{pres.char}",
            verb="tfun",
            degree=d,
            dim=dims[d],
            char=pres.char,
        )
    return 0


def _verb_obstruct(args, bundle, report):
    prob = bundle.problem(args.problem)
    ob = obstruction(prob)
    vanishes = obstruction_vanishes(prob)
    report.say(
        f"{args.problem}: obstruction in Exal2({prob.alg.name}, {prob.mod.name});"
        f" vanishes: {'yes' if vanishes else 'no'}",
        verb="obstruct",
        problem=args.problem,
        vanishes=vanishes,
        ring_order=ob.ring.n,
    )
    return 0


def _verb_deform(args, bundle, report):
    prob = bundle.problem(args.problem)
    ds = deformations(prob)
    plural = "es" if len(ds) != 1 else ""
    report.say(
        f"{args.problem}: {len(ds)} deformation class{plural}",
        verb="deform",
        problem=args.problem,
        classes=len(ds),
    )
    for k, d in enumerate(ds):
        report.say(
            f"class {k}: total of order {d.ext.total.n}, char {d.ext.total.char}",
            cls=k,
            total_order=d.ext.total.n,
            total_char=d.ext.total.char,
        )
    return 0


def _verb_defm_theorem(args, bundle, report):
    prob = bundle.problem(args.problem)
    rep = verify_deformation_theorem(prob)
    parts = [
        ("existence iff obstruction vanishes", rep.existence_iff_vanishing),
        ("torsor under Exal_A(B, M)", rep.torsor),
        ("automorphisms match derivations", rep.automorphisms_match),
    ]
    for label, ok in parts:
        report.say(f"{label}: {'pass' if ok else 'FAIL'}", part=label, ok=ok)
    report.say(
        f"classes {rep.deformation_count}, group size {rep.exal_size},"
        f" derivations {rep.der_size}, vanishes {rep.vanishes}",
        verb="defm-theorem",
        problem=args.problem,
        classes=rep.deformation_count,
        exal=rep.exal_size,
        der=rep.der_size,
        vanishes=rep.vanishes,
        holds=rep.holds(),
    )
    return 0 if rep.holds() else 1


def _verb_transitivity(args, bundle, report):
    u = bundle.map(args.u)
    v = bundle.map(args.v)
    if not isinstance(u, RingHom) or not isinstance(v, RingHom):
        raise FixtureError("transitivity needs two ring maps")
    mod = bundle.module(args.mod)
    rep = check_transitivity_exactness(u, v, mod)
    report.say(
        f"sizes {rep.sizes}",
        verb="transitivity",
        u=args.u,
        v=args.v,
        mod=args.mod,
        sizes=list(rep.sizes),
    )
    names = (
        "restriction of derivations injective",
        "exact at Der_A(C, M)",
        "exact at Der_A(B, M)",
        "exact at Exal_B(C, M)",
        "exact at Exal_A(C, M)",
        "boundary kernel matches restriction image",
    )
    flags = (rep.injective,) + rep.exact_at + (rep.boundary_node,)
    for label, ok in zip(names, flags):
        report.say(f"{label}: {'pass' if ok else 'FAIL'}", node=label, ok=ok)
    return 0 if rep.exact() else 1


def _verb_census(args, bundle, report):
    return _census(report, args.max_alg, args.max_mod, args.suite)


# ------------------------------------------------------------- dispatch


def _parser():
    top = argparse.ArgumentParser(
        prog="exal2",
        description="Exact calculus of square-zero extensions, 2-extensions and deformations.",
    )
    top.add_argument("--fixtures", metavar="DIR", help="directory of JSON fixture bundles")
    top.add_argument("--max-candidates", type=int, metavar="N", help="enumeration guard override")
    top.add_argument(
        "--format", choices=("text", "jsonl"), default="text", help="report stream format"
    )
    sub = top.add_subparsers(dest="verb", metavar="VERB")

    p = sub.add_parser("exal", help="classify square-zero extensions")
    p.add_argument("--alg", required=True)
    p.add_argument("--mod", required=True)
    p.add_argument("--base", help="map name, or ring name with a unique map in")
    p.set_defaults(fn=_verb_exal)

    p = sub.add_parser("split", help="count ring sections of an extension")
    p.add_argument("--extension", required=True)
    p.set_defaults(fn=_verb_split)

    p = sub.add_parser("baer-sum", help="Baer sum of two extension fixtures")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.set_defaults(fn=_verb_baer_sum)

    p = sub.add_parser("validate2", help="validate a 2-extension fixture")
    p.add_argument("--fixture", required=True)
    p.set_defaults(fn=_verb_validate2)

    p = sub.add_parser("compose", help="compose two butterfly fixtures")
    p.add_argument("--first", required=True)
    p.add_argument("--second", required=True)
    p.set_defaults(fn=_verb_compose)

    p = sub.add_parser("invert", help="invert a butterfly fixture")
    p.add_argument("--butterfly", required=True)
    p.set_defaults(fn=_verb_invert)

    p = sub.add_parser("sum2", help="Baer sum of two 2-extension fixtures")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.set_defaults(fn=_verb_sum2)

    p = sub.add_parser("split2", help="search for a splitting of a 2-extension")
    p.add_argument("--fixture", required=True)
    p.set_defaults(fn=_verb_split2)

    p = sub.add_parser("iso2", help="assert two 2-extensions are isomorphic")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.set_defaults(fn=_verb_iso2)

    p = sub.add_parser("exal2", help="classify 2-extensions")
    p.add_argument("--alg", required=True)
    p.add_argument("--mod", required=True)
    p.add_argument("--base")
    p.add_argument("--presentation", metavar="FILE")
    p.set_defaults(fn=_verb_exal2)

    p = sub.add_parser("cover-check", help="degreewise covering of a fiber product")
    p.add_argument("--base", default="Z4")
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--q")
    p.add_argument("--r")
    p.add_argument("--s")
    p.add_argument("--f")
    p.add_argument("--g")
    p.set_defaults(fn=_verb_cover_check)

    p = sub.add_parser("kernel-witness", help="pair-linear element killed by both projections")
    p.add_argument("--q")
    p.add_argument("--r")
    p.add_argument("--s")
    p.add_argument("--f")
    p.add_argument("--g")
    p.set_defaults(fn=_verb_kernel_witness)

    p = sub.add_parser("equalizer-check", help="compare an equalizer with its set core")
    p.add_argument("--base", default="Z4")
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--q")
    p.add_argument("--s")
    p.add_argument("--h1")
    p.add_argument("--h2")
    p.set_defaults(fn=_verb_equalizer_check)

    p = sub.add_parser("tfun", help="tangent cohomology dimensions of a presentation")
    p.add_argument("--pres", required=True, metavar="FILE")
    p.add_argument("--mod", default="residue", help="'self', 'residue' or a module fixture")
    p.add_argument("--degree", default="all", choices=("0", "1", "2", "all"))
    p.set_defaults(fn=_verb_tfun)

    p = sub.add_parser("obstruct", help="obstruction class of a deformation problem")
    p.add_argument("--problem", required=True)
    p.set_defaults(fn=_verb_obstruct)

    p = sub.add_parser("deform", help="deformation classes of a problem")
    p.add_argument("--problem", required=True)
    p.set_defaults(fn=_verb_deform)

    p = sub.add_parser("defm-theorem", help="existence, torsor and automorphism checks")
    p.add_argument("--problem", required=True)
    p.set_defaults(fn=_verb_defm_theorem)

    p = sub.add_parser("transitivity", help="six-term exactness for a composable pair")
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--mod", required=True)
    p.set_defaults(fn=_verb_transitivity)

    p = sub.add_parser("census", help="sweep all frames and problems within bounds")
    p.add_argument("--max-alg", type=int, default=2)
    p.add_argument("--max-mod", type=int, default=2)
    p.add_argument("--suite", choices=("exal", "exal2", "defm", "all"), default="all")
    p.set_defaults(fn=_verb_census)

    return top


def run(verb, argv, fixtures=None):
    """Dispatch one verb with its own argument list against a bundle."""
    bundle = fixtures if fixtures is not None else builtin_bundle()
    parser = _parser()
    report = Report(code=0)
    try:
        try:
            args = parser.parse_args([verb] + list(argv))
        except SystemExit as exc:
            raise UsageError(f"bad arguments for {verb!r}") from exc
        if getattr(args, "fn", None) is None:
            raise UsageError(f"unrecognized verb {verb!r}")
        report.code = args.fn(args, bundle, report)
    except CheckFailed as exc:
        report.say(f"FAIL: {exc}", status="fail", witness=str(exc))
        report.code = 1
    except (UsageError, TooLarge) as exc:
        report.say(f"error: {exc}", status="error", message=str(exc))
        report.code = 2
    return report


def main(argv=None):
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if getattr(args, "fn", None) is None:
        parser.print_usage(sys.stderr)
        return 2
    if args.max_candidates is not None:
        try:
            set_max_candidates(args.max_candidates)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    bundle = builtin_bundle()
    if args.fixtures:
        try:
            bundle = load_fixture_dir(args.fixtures, base=bundle)
        except FixtureError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    report = Report(code=0)
    try:
        report.code = args.fn(args, bundle, report)
    except CheckFailed as exc:
        report.say(f"FAIL: {exc}", status="fail", witness=str(exc))
        report.code = 1
    except (UsageError, TooLarge) as exc:
        report.say(f"error: {exc}", status="error", message=str(exc))
        report.code = 2
    if args.format == "jsonl":
        for rec in report.records:
            print(json.dumps(rec, sort_keys=True))
    else:
        for line in report.lines:
            print(line)
    return report.code


if __name__ == "__main__":
    sys.exit(main())
