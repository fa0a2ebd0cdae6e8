"""Named fixture bundles for the command-line front end and the test suites.

A bundle holds rings, modules, maps, extensions, 2-extensions, butterflies
and deformation problems under stable names, plus free-form provenance
notes. The built-in bundle freezes every object the acceptance suites refer
to by name; extra bundles load from JSON files and every object is
revalidated on the way in.

Obstructed deformation problems carry a search certificate: a digest of the
transcript of the failed solution search. The expected digests are frozen
here and checked each time the built-in bundle is assembled, so a quiet
regression in the solver cannot pass itself off as the recorded fixture.

Structured 2-extensions (those carrying a splitting as extra data) are
rebuilt in code rather than serialized; a JSON entry asking for one is
rejected. Everything else round-trips through bundle_to_json.
"""

import hashlib
import json
import os
from functools import lru_cache

from .crossed import CrossedRing
from .defm import deformation_problem, deformations, obstruction_vanishes, validate_problem
from .errors import Exal2Error, FixtureError
from .ext2 import (
    Butterfly,
    TwoExtension,
    compose,
    identity_butterfly,
    invert,
    split_search,
    trivial_2extension,
    two_extension_from_chain,
    validate_2extension,
    validate_butterfly,
)
from .extn import (
    FactorSystemSpace,
    SquareZeroExtension,
    extension_from_surjection,
    validate_extension,
)
from .finring import (
    FiniteModule,
    FiniteRing,
    ModuleHom,
    RingHom,
    Zn,
    identity_hom,
    module_from_ring,
    preset_ring,
    restrict_scalars,
    univariate_quotient,
    validate_module,
    validate_module_hom,
    validate_ring,
    validate_ring_hom,
)

_CATEGORIES = (
    "rings",
    "modules",
    "maps",
    "extensions",
    "two_extensions",
    "butterflies",
    "problems",
)


class FixtureBundle:
    """Named objects resolvable by the CLI verbs. Treat as read-only."""

    def __init__(self, **kw):
        for cat in _CATEGORIES:
            setattr(self, cat, dict(kw.get(cat) or {}))
        self.notes = dict(kw.get("notes") or {})

    def _get(self, cat, name):
        table = getattr(self, cat)
        if name not in table:
            raise FixtureError(f"unknown {cat[:-1].replace('_', '-')} {name!r}; known: {sorted(table)}")
        return table[name]

    def ring(self, name):
        return self._get("rings", name)

    def module(self, name):
        return self._get("modules", name)

    def map(self, name):
        return self._get("maps", name)

    def extension(self, name):
        return self._get("extensions", name)

    def two_extension(self, name):
        return self._get("two_extensions", name)

    def butterfly(self, name):
        return self._get("butterflies", name)

    def problem(self, name):
        return self._get("problems", name)

    def merged(self, other):
        """A new bundle with the other's entries laid over this one's."""
        kw = {}
        for cat in _CATEGORIES:
            table = dict(getattr(self, cat))
            table.update(getattr(other, cat))
            kw[cat] = table
        notes = dict(self.notes)
        notes.update(other.notes)
        kw["notes"] = notes
        return FixtureBundle(**kw)


# ----------------------------------------------------------- certificates


def _object_signature(prob):
    """Structural digest pinning the problem's tables, not its names."""
    om = prob.omega
    blob = repr(
        (
            om.total.add,
            om.total.mul,
            om.project.table,
            om.embed,
            prob.base_to_alg.table,
            prob.mod.add,
            prob.mod.act,
            prob.phi.table,
        )
    )
    return hashlib.sha256(blob.encode("ascii")).hexdigest()


def search_certificate(prob):
    """Transcript and digest of the deformation solution search.

    The transcript records the problem signature, the size of the pinned
    factor-system system, how many solution classes the search produced and
    whether the obstruction class vanishes. Frozen obstructed fixtures store
    the digest; a mismatch on rebuild fails loudly.
    """
    space = FactorSystemSpace(prob.alg, prob.mod, prob.total_hom)
    found = len(deformations(prob))
    lines = [
        "deformation search transcript",
        f"signature {_object_signature(prob)}",
        f"algebra order {prob.alg.n}",
        f"upstairs base order {prob.total_base.n}",
        f"module order {prob.mod.n}",
        f"unknowns {len(space.moduli)}",
        f"solution classes {found}",
        f"obstruction vanishes {obstruction_vanishes(prob)}",
    ]
    text = "\n".join(lines)
    return text, hashlib.sha256(text.encode("ascii")).hexdigest()


FROZEN_CERTIFICATES = {
    "jet_residue_obstructed": "35e6aaf17f023cdbf44890651f1e8eda8a0c9b9f7c0188bea7b340f1067262df",
    "cubic_jet_obstructed": "e1be6c5bfb431d4e5e86cc022097d88491b68cd5caf7f958dddd3ebb9c779aed",
}


# --------------------------------------------------------- built-in bundle


def _residue_module(B, eps_table, name="F2"):
    act = tuple((0, e) for e in eps_table)
    return FiniteModule(ring=B, n=2, add=((0, 1), (1, 0)), act=act, zero=0, name=name)


@lru_cache(maxsize=1)
def builtin_bundle():
    Z2, Z4, Z8 = Zn(2), Zn(4), Zn(8)
    dual, v2, i2 = univariate_quotient(2, (0, 0, 1), name="F2[x]/(x^2)")
    jet3, v3, i3 = univariate_quotient(2, (0, 0, 0, 1), name="F2[x]/(x^3)")
    jet4, v4, i4 = univariate_quotient(2, (0, 0, 0, 0, 1), name="F2[x]/(x^4)")
    from .finring import monomial_truncation, product_ring

    m2r, m2v, m2i, _ = monomial_truncation(
        2, ("x", "y"), [(0, 0), (1, 0), (0, 1)], name="F2[x,y]/(x^2,xy,y^2)"
    )
    wit4, _, _ = univariate_quotient(4, (0, 0, 1), name="Z4[x]/(x^2)")

    rings = {
        "Z2": Z2,
        "Z3": Zn(3),
        "Z4": Z4,
        "Z8": Z8,
        "F4": preset_ring("F4"),
        "Z2xZ2": preset_ring("Z2xZ2"),
        "F2[x]/(x^2)": dual,
        "F2[x]/(x^3)": jet3,
        "F2[x]/(x^4)": jet4,
        "F2[x,y]/(x^2,xy,y^2)": m2r,
        "Z4[x]/(x^2)": wit4,
    }

    eps_dual = RingHom(src=dual, dst=Z2, table=tuple(v[0] for v in v2), name="eps_dual")
    # monomial basis of m2r is (1, x, y); the augmentation keeps the constant
    eps_m2 = RingHom(src=m2r, dst=Z2, table=tuple(v[0] for v in m2v), name="eps_m2")

    F2 = module_from_ring(Z2, name="F2")
    modules = {
        "F2": F2,
        "F2_over_dual": _residue_module(dual, eps_dual.table, name="F2_over_dual"),
        "F2_over_m2": _residue_module(m2r, eps_m2.table, name="F2_over_m2"),
        "dual_numbers_self": module_from_ring(dual, name="dual_numbers_self"),
        "Z2_over_Z4": restrict_scalars(F2, RingHom(src=Z4, dst=Z2, table=(0, 1, 0, 1)), name="Z2_over_Z4"),
    }

    maps = {
        "id_Z2": identity_hom(Z2),
        "id_dual": identity_hom(dual),
        "unit_dual": RingHom(src=Z2, dst=dual, table=(dual.zero, dual.one), name="unit_dual"),
        "unit_m2": RingHom(src=Z2, dst=m2r, table=(m2r.zero, m2r.one), name="unit_m2"),
        "eps_dual": eps_dual,
        "eps_m2": eps_m2,
        "mod2": RingHom(src=Z4, dst=Z2, table=(0, 1, 0, 1), name="mod2"),
        "mod4": RingHom(src=Z8, dst=Z4, table=tuple(a % 4 for a in range(8)), name="mod4"),
        "trunc32": RingHom(src=jet3, dst=dual, table=tuple(i2[v[:2]] for v in v3), name="trunc32"),
        "trunc43": RingHom(src=jet4, dst=jet3, table=tuple(i3[v[:3]] for v in v4), name="trunc43"),
    }

    extensions = {
        "omega_z4": extension_from_surjection(maps["mod2"], name="omega_z4"),
        "omega_jet3": extension_from_surjection(maps["trunc32"], name="omega_jet3"),
        "omega_jet4": extension_from_surjection(maps["trunc43"], name="omega_jet4"),
    }

    two_extensions = {
        "trivial": trivial_2extension(Z2, modules["F2"], name="trivial"),
        "zero_dual_F2": trivial_2extension(dual, modules["F2_over_dual"], name="zero_dual_F2"),
        "jet_chain": two_extension_from_chain(maps["trunc32"], eps_dual, name="jet_chain"),
        "integer_chain": two_extension_from_chain(
            maps["mod4"], maps["mod2"], name="integer_chain"
        ),
        "zero_m2_F2": trivial_2extension(m2r, modules["F2_over_m2"], name="zero_m2_F2"),
    }
    P8, pv, pidx, _, _ = product_ring(Z2, Z4, name="Z2xZ4")
    P4, qv, qidx, _, qp2 = product_ring(Z2, Z2, name="Z2xZ2")
    pr = RingHom(src=P8, dst=P4, table=tuple(qidx[(a, b % 2)] for (a, b) in pv), name="pr")
    two_extensions["product_chain"] = two_extension_from_chain(pr, qp2, name="product_chain")

    jet_split = split_search(two_extensions["jet_chain"], name="jet_split")
    integer_split = split_search(two_extensions["integer_chain"], name="integer_split")
    butterflies = {
        "identity_zero_dual": identity_butterfly(two_extensions["zero_dual_F2"]),
        "jet_split": jet_split,
        "integer_split": integer_split,
        "jet_to_integer": compose(jet_split, invert(integer_split), name="jet_to_integer"),
    }

    problems = {
        "z4_over_z2_dual_numbers": deformation_problem(
            extensions["omega_z4"],
            maps["unit_dual"],
            modules["dual_numbers_self"],
            (modules["dual_numbers_self"].zero, dual.one),
            name="z4_over_z2_dual_numbers",
        ),
        "jet_residue_obstructed": deformation_problem(
            extensions["omega_jet3"], eps_dual, F2, (0, 1), name="jet_residue_obstructed"
        ),
        "cubic_jet_obstructed": deformation_problem(
            extensions["omega_jet4"],
            maps["trunc32"],
            modules["F2_over_dual"],
            (0, 1),
            name="cubic_jet_obstructed",
        ),
        "residue_flat": deformation_problem(
            extensions["omega_z4"], maps["id_Z2"], F2, (0, 0), name="residue_flat"
        ),
    }

    notes = {
        "z4_over_z2_dual_numbers": (
            "unobstructed: deform the dual numbers over Z/2 along Z/4; the four"
            " solution classes include Z/4[x]/(x^2)"
        ),
        "jet_residue_obstructed": (
            "first obstructed problem in the canonical census sweep at bounds"
            " (4, 2): the residue field of the dual numbers does not deform"
            " along the second-to-third jet prolongation"
        ),
        "cubic_jet_obstructed": (
            "hand-built companion: the dual numbers do not deform along the"
            " third-to-fourth jet prolongation when phi picks out x^3"
        ),
        "residue_flat": "trivial comparison map over the identity: exactly one class",
        "jet_chain": "carried by F2[x]/(x^3) -> F2[x]/(x^2) -> F2",
        "integer_chain": "carried by Z/8 -> Z/4 -> Z/2",
        "product_chain": "carried by Z2xZ4 -> Z2xZ2 -> Z2",
        "transitivity_frames": (
            "named frames for the six-term sequence: (id_Z2, id_Z2, F2),"
            " (id_Z2, unit_dual, F2_over_dual), (unit_dual, id_dual,"
            " F2_over_dual), (unit_dual, eps_dual, F2)"
        ),
    }
    for name, expected in FROZEN_CERTIFICATES.items():
        text, digest = search_certificate(problems[name])
        if digest != expected:
            raise FixtureError(
                f"fixture {name!r}: search certificate {digest} does not match the frozen record"
            )
        notes[name] = notes[name] + f"; search certificate sha256:{digest}"

    return FixtureBundle(
        rings=rings,
        modules=modules,
        maps=maps,
        extensions=extensions,
        two_extensions=two_extensions,
        butterflies=butterflies,
        problems=problems,
        notes=notes,
    )


# ------------------------------------------------------------------- JSON


def _ring_key(bundle, R, ctx):
    for name, S in bundle.rings.items():
        if S == R:
            return name
    raise FixtureError(f"{ctx}: ring {R.name!r} is not a named fixture")


def _module_key(bundle, M, ctx):
    for name, T in bundle.modules.items():
        if T == M:
            return name
    raise FixtureError(f"{ctx}: module {M.name!r} is not a named fixture")


def _two_ext_key(bundle, xi, ctx):
    for name, eta in bundle.two_extensions.items():
        if eta == xi:
            return name
    raise FixtureError(f"{ctx}: 2-extension {xi.name!r} is not a named fixture")


def bundle_to_json(bundle):
    """A JSON-ready dict. Every referenced object must itself be named."""
    out = {cat: {} for cat in _CATEGORIES}
    for name, R in bundle.rings.items():
        out["rings"][name] = {
            "order": R.n,
            "add": [list(row) for row in R.add],
            "mul": [list(row) for row in R.mul],
            "zero": R.zero,
            "one": R.one,
        }
    for name, M in bundle.modules.items():
        out["modules"][name] = {
            "ring": _ring_key(bundle, M.ring, name),
            "order": M.n,
            "add": [list(row) for row in M.add],
            "act": [list(row) for row in M.act],
            "zero": M.zero,
        }
    for name, f in bundle.maps.items():
        if isinstance(f, RingHom):
            out["maps"][name] = {
                "kind": "ring",
                "src": _ring_key(bundle, f.src, name),
                "dst": _ring_key(bundle, f.dst, name),
                "table": list(f.table),
            }
        elif isinstance(f, ModuleHom):
            entry = {
                "kind": "module",
                "src": _module_key(bundle, f.src, name),
                "dst": _module_key(bundle, f.dst, name),
                "table": list(f.table),
                "link": None,
            }
            if f.link is not None:
                for mname, g in bundle.maps.items():
                    if isinstance(g, RingHom) and g == f.link:
                        entry["link"] = mname
                        break
                else:
                    raise FixtureError(f"{name}: link map is not a named fixture")
            out["maps"][name] = entry
        else:
            raise FixtureError(f"{name}: not a map")
    for name, ext in bundle.extensions.items():
        entry = {
            "alg": _ring_key(bundle, ext.alg, name),
            "mod": _module_key(bundle, ext.mod, name),
            "total": _ring_key(bundle, ext.total, name),
            "embed": list(ext.embed),
            "project": list(ext.project.table),
        }
        if ext.base is not None:
            entry["base"] = _ring_key(bundle, ext.base, name)
            entry["base_to_alg"] = list(ext.base_to_alg.table)
            entry["base_lift"] = list(ext.base_lift.table)
        out["extensions"][name] = entry
    for name, xi in bundle.two_extensions.items():
        if xi.a_structure is not None:
            raise FixtureError(f"{name}: structured 2-extensions are rebuilt in code, not serialized")
        entry = {
            "alg": _ring_key(bundle, xi.alg, name),
            "mod": _module_key(bundle, xi.mod, name),
            "ring": _ring_key(bundle, xi.ring, name),
            "nmod": _module_key(bundle, xi.nmod, name),
            "nmul": [list(row) for row in xi.crossed.nmul],
            "f": list(xi.crossed.f),
            "augment": list(xi.augment.table),
            "embed": list(xi.embed),
        }
        if xi.base is not None:
            entry["base"] = _ring_key(bundle, xi.base, name)
            entry["base_to_alg"] = list(xi.base_to_alg.table)
        out["two_extensions"][name] = entry
    for name, bf in bundle.butterflies.items():
        out["butterflies"][name] = {
            "src": _two_ext_key(bundle, bf.src, name),
            "dst": _two_ext_key(bundle, bf.dst, name),
            "ring": _ring_key(bundle, bf.ring, name),
            "i": list(bf.i),
            "ip": list(bf.ip),
            "p": list(bf.p.table),
            "pp": list(bf.pp.table),
            "mod_iso": list(bf.mod_iso),
            "base_iso": list(bf.base_iso.table),
        }
    for name, prob in bundle.problems.items():
        omega_key = None
        for ename, ext in bundle.extensions.items():
            if ext == prob.omega:
                omega_key = ename
                break
        if omega_key is None:
            raise FixtureError(f"{name}: omega is not a named fixture")
        gkey = None
        for mname, g in bundle.maps.items():
            if isinstance(g, RingHom) and g == prob.base_to_alg:
                gkey = mname
                break
        if gkey is None:
            raise FixtureError(f"{name}: structure map is not a named fixture")
        out["problems"][name] = {
            "omega": omega_key,
            "structure": gkey,
            "mod": _module_key(bundle, prob.mod, name),
            "phi": list(prob.phi.table),
        }
    out["notes"] = dict(bundle.notes)
    return out


def _check(name, fn):
    try:
        return fn()
    except FixtureError:
        raise
    except Exal2Error as exc:
        raise FixtureError(f"fixture {name!r}: {exc}") from exc


def _load_ring(name, entry):
    if "preset" in entry:
        return _check(name, lambda: preset_ring(entry["preset"]))

    def build():
        R = FiniteRing(
            n=int(entry["order"]),
            add=tuple(tuple(row) for row in entry["add"]),
            mul=tuple(tuple(row) for row in entry["mul"]),
            zero=int(entry["zero"]),
            one=int(entry["one"]),
            name=name,
        )
        validate_ring(R)
        return R

    return _check(name, build)


class _Resolver:
    """Two-layer name lookup: entries being loaded, then the base bundle."""

    def __init__(self, fresh, base):
        self.fresh = fresh
        self.base = base

    def get(self, cat, name, ctx):
        if name in self.fresh[cat]:
            return self.fresh[cat][name]
        table = getattr(self.base, cat) if self.base is not None else {}
        if name in table:
            return table[name]
        raise FixtureError(f"fixture {ctx!r}: unresolved {cat[:-1].replace('_', '-')} {name!r}")


def bundle_from_json(data, base=None):
    """Build a bundle from a JSON dict, revalidating every object.

    Names referenced but not defined in the data resolve against the base
    bundle when one is given.
    """
    if not isinstance(data, dict):
        raise FixtureError("fixture data must be a JSON object")
    unknown = set(data) - set(_CATEGORIES) - {"notes"}
    if unknown:
        raise FixtureError(f"unknown fixture categories: {sorted(unknown)}")
    fresh = {cat: {} for cat in _CATEGORIES}
    res = _Resolver(fresh, base)

    for name, entry in (data.get("rings") or {}).items():
        fresh["rings"][name] = _load_ring(name, entry)

    for name, entry in (data.get("modules") or {}).items():
        ring = res.get("rings", entry["ring"], name)

        def build(entry=entry, ring=ring, name=name):
            M = FiniteModule(
                ring=ring,
                n=int(entry["order"]),
                add=tuple(tuple(row) for row in entry["add"]),
                act=tuple(tuple(row) for row in entry["act"]),
                zero=int(entry["zero"]),
                name=name,
            )
            validate_module(M)
            return M

        fresh["modules"][name] = _check(name, build)

    deferred = []
    for name, entry in (data.get("maps") or {}).items():
        kind = entry.get("kind", "ring")
        if kind == "ring":

            def build(entry=entry, name=name):
                f = RingHom(
                    src=res.get("rings", entry["src"], name),
                    dst=res.get("rings", entry["dst"], name),
                    table=tuple(entry["table"]),
                    name=name,
                )
                validate_ring_hom(f)
                return f

            fresh["maps"][name] = _check(name, build)
        elif kind == "module":
            deferred.append((name, entry))
        else:
            raise FixtureError(f"fixture {name!r}: unknown map kind {kind!r}")
    for name, entry in deferred:

        def build(entry=entry, name=name):
            link = None
            if entry.get("link") is not None:
                link = res.get("maps", entry["link"], name)
                if not isinstance(link, RingHom):
                    raise FixtureError(f"fixture {name!r}: link must be a ring map")
            f = ModuleHom(
                src=res.get("modules", entry["src"], name),
                dst=res.get("modules", entry["dst"], name),
                table=tuple(entry["table"]),
                link=link,
                name=name,
            )
            validate_module_hom(f)
            return f

        fresh["maps"][name] = _check(name, build)

    for name, entry in (data.get("extensions") or {}).items():

        def build(entry=entry, name=name):
            alg = res.get("rings", entry["alg"], name)
            total = res.get("rings", entry["total"], name)
            kw = {}
            if entry.get("base") is not None:
                base_ring = res.get("rings", entry["base"], name)
                kw = dict(
                    base=base_ring,
                    base_to_alg=RingHom(
                        src=base_ring, dst=alg, table=tuple(entry["base_to_alg"]), name=f"{name}.g"
                    ),
                    base_lift=RingHom(
                        src=base_ring, dst=total, table=tuple(entry["base_lift"]), name=f"{name}.lift"
                    ),
                )
            ext = SquareZeroExtension(
                alg=alg,
                mod=res.get("modules", entry["mod"], name),
                total=total,
                embed=tuple(entry["embed"]),
                project=RingHom(src=total, dst=alg, table=tuple(entry["project"]), name=f"{name}.p"),
                name=name,
                **kw,
            )
            validate_extension(ext)
            return ext

        fresh["extensions"][name] = _check(name, build)

    for name, entry in (data.get("two_extensions") or {}).items():
        if "a_structure" in entry:
            raise FixtureError(
                f"fixture {name!r}: structured 2-extensions are rebuilt in code, not loaded"
            )

        def build(entry=entry, name=name):
            alg = res.get("rings", entry["alg"], name)
            ring = res.get("rings", entry["ring"], name)
            nmod = res.get("modules", entry["nmod"], name)
            crossed = CrossedRing(
                module=nmod,
                nmul=tuple(tuple(row) for row in entry["nmul"]),
                f=tuple(entry["f"]),
                name=f"{name}.N",
            )
            kw = {}
            if entry.get("base") is not None:
                base_ring = res.get("rings", entry["base"], name)
                kw = dict(
                    base=base_ring,
                    base_to_alg=RingHom(
                        src=base_ring, dst=alg, table=tuple(entry["base_to_alg"]), name=f"{name}.g"
                    ),
                )
            xi = TwoExtension(
                alg=alg,
                mod=res.get("modules", entry["mod"], name),
                crossed=crossed,
                augment=RingHom(src=ring, dst=alg, table=tuple(entry["augment"]), name=f"{name}.aug"),
                embed=tuple(entry["embed"]),
                name=name,
                **kw,
            )
            validate_2extension(xi)
            return xi

        fresh["two_extensions"][name] = _check(name, build)

    for name, entry in (data.get("butterflies") or {}).items():

        def build(entry=entry, name=name):
            src = res.get("two_extensions", entry["src"], name)
            dst = res.get("two_extensions", entry["dst"], name)
            ring = res.get("rings", entry["ring"], name)
            bf = Butterfly(
                src=src,
                dst=dst,
                ring=ring,
                i=tuple(entry["i"]),
                ip=tuple(entry["ip"]),
                p=RingHom(src=ring, dst=src.ring, table=tuple(entry["p"]), name=f"{name}.p"),
                pp=RingHom(src=ring, dst=dst.ring, table=tuple(entry["pp"]), name=f"{name}.pp"),
                mod_iso=tuple(entry["mod_iso"]),
                base_iso=RingHom(
                    src=src.alg, dst=dst.alg, table=tuple(entry["base_iso"]), name=f"{name}.b"
                ),
                name=name,
            )
            validate_butterfly(bf)
            return bf

        fresh["butterflies"][name] = _check(name, build)

    for name, entry in (data.get("problems") or {}).items():

        def build(entry=entry, name=name):
            g = res.get("maps", entry["structure"], name)
            if not isinstance(g, RingHom):
                raise FixtureError(f"fixture {name!r}: structure must be a ring map")
            prob = deformation_problem(
                res.get("extensions", entry["omega"], name),
                g,
                res.get("modules", entry["mod"], name),
                tuple(entry["phi"]),
                name=name,
            )
            validate_problem(prob)
            return prob

        fresh["problems"][name] = _check(name, build)

    fresh["notes"] = dict(data.get("notes") or {})
    return FixtureBundle(**fresh)


def load_fixture_dir(path, base=None):
    """Merge every .json file under path (sorted by name) over the base."""
    if not os.path.isdir(path):
        raise FixtureError(f"fixture directory {path!r} does not exist")
    bundle = base if base is not None else FixtureBundle()
    files = sorted(f for f in os.listdir(path) if f.endswith(".json"))
    if not files:
        raise FixtureError(f"fixture directory {path!r} holds no .json files")
    for fname in files:
        with open(os.path.join(path, fname)) as fh:
            try:
                data = json.load(fh)
            except ValueError as exc:
                raise FixtureError(f"{fname}: not valid JSON: {exc}") from exc
        bundle = bundle.merged(bundle_from_json(data, base=bundle))
    return bundle
