"""Deformations of algebras over a squarezero base extension.

A deformation problem fixes an extension 0 -> I -> A' -> A -> 0, an
A-algebra B, a B-module M and a linear map phi: I -> M. Solutions are
A'-algebra extensions of B by M whose structure lift restricts to phi on
I. The obstruction to solving lives among 2-extension classes of B by M;
this module computes both sides and the boundary maps of the restriction
sequence Der -> Exal -> Exal^2 that organizes them.
"""

from dataclasses import dataclass, field

from .errors import ShapeMismatch, TargetMismatch, UsageError
from .exactlin import subgroup_quotient, solve_affine
from .ext2 import (
    Splitting,
    a_structure_from_factorization,
    attach_a_structure,
    isomorphic_2ext,
    restrict_to_base,
    trivial_2extension,
    twist_splitting,
    with_base_2ext,
)
from .extn import (
    FactorSystemSpace,
    SquareZeroExtension,
    automorphism_to_derivation,
    baer_sum,
    derivations,
    equivalence_iso,
    exal_classify,
    extension_automorphisms,
    extension_from_factor_system,
    forget_base,
    pullback_extension,
    pushout_extension,
    restrict_base,
    trivial_extension,
    validate_extension,
    vec_add,
)
from .finring import (
    ModuleHom,
    RingHom,
    fiber_product,
    identity_hom,
    restrict_scalars,
    validate_ring_hom,
)


# ---------------------------------------------------------------- problems


@dataclass(frozen=True)
class DeformationProblem:
    """The data (omega, B, M, phi) a deformation has to solve.

    omega is the fixed extension 0 -> I -> A' -> A -> 0 with no base of its
    own. base_to_alg: A -> B makes B an A-algebra, mod is a B-module and
    phi maps I into mod restricted to A.
    """

    omega: SquareZeroExtension
    base_to_alg: RingHom
    mod: object
    phi: ModuleHom
    name: str = field(default="prob", compare=False)

    @property
    def base(self):
        return self.omega.alg

    @property
    def total_base(self):
        return self.omega.total

    @property
    def alg(self):
        return self.base_to_alg.dst

    @property
    def total_hom(self):
        """The composite A' -> A -> B every solution is an algebra over."""
        return self.omega.project.then(self.base_to_alg)

    def __repr__(self):
        return (
            f"DeformationProblem({self.name}: {self.omega.mod.name} -> "
            f"{self.mod.name} over {self.alg.name})"
        )


def deformation_problem(omega, base_to_alg, mod, phi_table, name=None):
    """Assemble and validate a problem from a plain table for phi."""
    ma = restrict_scalars(mod, base_to_alg, name=f"{mod.name}|{base_to_alg.src.name}")
    phi = ModuleHom(src=omega.mod, dst=ma, table=tuple(phi_table), name="phi")
    prob = DeformationProblem(
        omega=omega,
        base_to_alg=base_to_alg,
        mod=mod,
        phi=phi,
        name=name or "prob",
    )
    validate_problem(prob)
    return prob


def validate_problem(prob):
    om = prob.omega
    if om.base is not None:
        raise UsageError(f"{prob.name}: the fixed extension must not carry a base")
    validate_extension(om)
    validate_ring_hom(prob.base_to_alg)
    if prob.base_to_alg.src != om.alg:
        raise TargetMismatch(f"{prob.name}: structure map must start at the quotient of omega")
    if prob.mod.ring != prob.alg:
        raise TargetMismatch(f"{prob.name}: module must live over the algebra")
    I, M, phi = om.mod, prob.mod, prob.phi
    ma = restrict_scalars(prob.mod, prob.base_to_alg)
    if phi.src != I or phi.dst != ma or phi.link is not None:
        raise TargetMismatch(f"{prob.name}: phi must map the kernel into the restricted module")
    if len(phi.table) != I.n:
        raise ShapeMismatch(f"{prob.name}: phi table has the wrong length")
    g = prob.base_to_alg
    for i in range(I.n):
        for j in range(I.n):
            if phi(I.add[i][j]) != M.add[phi(i)][phi(j)]:
                raise UsageError(f"{prob.name}: phi is not additive at ({i},{j})")
    for a in range(om.alg.n):
        for i in range(I.n):
            if phi(I.act[a][i]) != M.act[g(a)][phi(i)]:
                raise UsageError(f"{prob.name}: phi is not equivariant at ({a},{i})")
    return True


@dataclass(frozen=True)
class Deformation:
    """A solution: an A'-algebra extension of B by M restricting to phi."""

    problem: DeformationProblem
    ext: SquareZeroExtension
    name: str = field(default="defm", compare=False)

    def comparison_iso(self):
        """The recorded identification of phi pushed into omega with ext pulled back."""
        prob = self.problem
        om = prob.omega
        om_based = SquareZeroExtension(
            alg=om.alg,
            mod=om.mod,
            total=om.total,
            embed=om.embed,
            project=om.project,
            base=om.total,
            base_to_alg=om.project,
            base_lift=identity_hom(om.total),
            name=om.name,
        )
        push = pushout_extension(om_based, prob.phi, name="phi*omega")
        pull = pullback_extension(
            self.ext, prob.base_to_alg, base_to_src=om.project, name=f"{self.name}|A"
        )
        return equivalence_iso(push, pull)

    def __repr__(self):
        return f"Deformation({self.name}: {self.ext.total.name} over {self.problem.name})"


def validate_deformation(d):
    prob = d.problem
    om = prob.omega
    validate_extension(d.ext)
    if d.ext.alg != prob.alg or d.ext.mod != prob.mod:
        raise TargetMismatch(f"{d.name}: extension has the wrong ends")
    if d.ext.base != om.total or d.ext.base_to_alg != prob.total_hom:
        raise TargetMismatch(f"{d.name}: extension is not an algebra over the total base")
    for i in range(om.mod.n):
        if d.ext.base_lift(om.embed[i]) != d.ext.embed[prob.phi(i)]:
            raise UsageError(f"{d.name}: structure lift disagrees with phi at {i}")
    if d.comparison_iso() is None:
        raise UsageError(f"{d.name}: pushforward and pullback squares do not match")
    return True


# -------------------------------------------------------------- obstruction


def based_trivial_2ext(base_to_alg, mod, twist=None, name=None):
    """The trivial 2-extension of B by mod, based through base_to_alg.

    Its structure is the canonical one from lifting the base map along the
    identity augmentation, shifted by the one-step extension class twist
    when one is given.
    """
    B = base_to_alg.dst
    xi = trivial_2extension(B, mod)
    xi = with_base_2ext(xi, base_to_alg, name=name or xi.name)
    xi = a_structure_from_factorization(xi, base_to_alg, name=f"str({xi.name})")
    if twist is None:
        return xi
    if twist.alg != base_to_alg.src or twist.mod.n != mod.n:
        raise ShapeMismatch("twisting class does not match the base and module")
    shifted = twist_splitting(xi.a_structure, forget_base(twist), name=f"str({xi.name})")
    return attach_a_structure(xi, shifted)


def obstruction(prob, name=None):
    """The class phi pushed into omega, as a structure on the trivial 2-extension.

    The structure is the canonical splitting shifted by the pushout of
    omega along phi, in that order.
    """
    validate_problem(prob)
    om = prob.omega
    zeta = pushout_extension(om, prob.phi, name=f"phi*{om.name}")
    return based_trivial_2ext(
        prob.base_to_alg, prob.mod, twist=zeta, name=name or f"ob({prob.name})"
    )


def obstruction_vanishes(prob):
    zero = based_trivial_2ext(prob.base_to_alg, prob.mod)
    return isomorphic_2ext(obstruction(prob), zero)


# -------------------------------------------------------------- enumeration


def _solution_bundle(prob):
    """The affine system of factor systems over A' pinned to phi on I."""
    om = prob.omega
    space = FactorSystemSpace(prob.alg, prob.mod, prob.total_hom)
    base_rows, base_moduli = space.condition_system
    out = []
    rhs = [0] * (len(base_rows))
    for i in range(om.mod.n):
        space.layout.rows_for_equation([(space.u_key(om.embed[i]), None, 1)], out)
        rhs.extend(space.mlayout.to_vec(prob.phi(i)))
    rows = list(base_rows) + [r for r, _ in out]
    row_moduli = list(base_moduli) + [m for _, m in out]
    sol = solve_affine(space.moduli, rows, rhs, row_moduli)
    return space, sol


def deformations(prob, rep_cap=None):
    """All solutions up to isomorphism over the full deformation square."""
    validate_problem(prob)
    space, sol = _solution_bundle(prob)
    if sol is None:
        return []
    q = subgroup_quotient(space.moduli, list(sol.kernel), space.gauge_gens, rep_cap=rep_cap)
    out = []
    for k, (_, rep) in enumerate(q.items):
        vec = vec_add(sol.particular, rep, space.moduli)
        ext = extension_from_factor_system(space, vec, name=f"defm{k}({prob.name})")
        out.append(Deformation(problem=prob, ext=ext, name=f"defm{k}"))
    return out


def act_on_deformation(d, ext_class, name=None):
    """Shift a deformation by an extension of B by M over A (the Baer sum)."""
    prob = d.problem
    if ext_class.alg != prob.alg or ext_class.mod != prob.mod:
        raise ShapeMismatch("acting extension has the wrong ends")
    if ext_class.base != prob.base or ext_class.base_to_alg != prob.base_to_alg:
        raise ShapeMismatch("acting extension must be an algebra over A")
    lifted = restrict_base(ext_class, prob.omega.project)
    s = baer_sum(d.ext, lifted, name=name or f"{d.name}+{ext_class.name}")
    return Deformation(problem=prob, ext=s, name=name or f"{d.name}+{ext_class.name}")


def _class_index(ds, candidate):
    for k, d in enumerate(ds):
        if equivalence_iso(d.ext, candidate.ext) is not None:
            return k
    return None


# ------------------------------------------------------------------ theorem


@dataclass(frozen=True)
class DeformationTheoremReport:
    """Existence, torsor and automorphism checks for one problem."""

    existence_iff_vanishing: bool
    torsor: bool
    automorphisms_match: bool
    vanishes: bool
    deformation_count: int
    exal_size: int
    der_size: int

    def holds(self):
        return self.existence_iff_vanishing and self.torsor and self.automorphisms_match


def verify_deformation_theorem(prob, rep_cap=None):
    """Check the three assertions of the classification on one problem.

    Existence of a solution must match vanishing of the obstruction, the
    extension classes over A must act freely and transitively on solution
    classes by Baer sum, and automorphisms of each solution must realize
    exactly the derivations of B into M over A.
    """
    ds = deformations(prob, rep_cap=rep_cap)
    vanishes = obstruction_vanishes(prob)
    existence_ok = (len(ds) > 0) == vanishes
    cls = exal_classify(prob.alg, prob.mod, base_hom=prob.base_to_alg, rep_cap=rep_cap)
    torsor_ok = True
    for d in ds:
        seen = []
        for coords, vec in cls.reps:
            moved = act_on_deformation(d, cls.extension_for(coords))
            k = _class_index(ds, moved)
            if k is None:
                raise UsageError(f"{prob.name}: action left the solution set")
            seen.append(k)
        if sorted(seen) != list(range(len(ds))):
            torsor_ok = False
            break
    ders = derivations(prob.alg, prob.mod, base_hom=prob.base_to_alg, cap=rep_cap)
    want = set(ders.tables)
    aut_ok = True
    for d in ds:
        got = set()
        for psi in extension_automorphisms(d.ext):
            got.add(automorphism_to_derivation(d.ext, psi))
        if got != want:
            aut_ok = False
            break
    return DeformationTheoremReport(
        existence_iff_vanishing=existence_ok,
        torsor=torsor_ok,
        automorphisms_match=aut_ok,
        vanishes=vanishes,
        deformation_count=len(ds),
        exal_size=cls.size,
        der_size=ders.size,
    )


# --------------------------------------------------- restriction boundary


def _frame(u, v):
    if u.dst != v.src:
        raise ShapeMismatch("maps do not compose into a frame")
    validate_ring_hom(u)
    validate_ring_hom(v)
    return u.src, u.dst, v.dst


def gamma(theta, u, v, mod, name=None):
    """A derivation theta: B -> mod as a based extension of C by mod.

    The underlying extension is trivial; the structure lift sends b to
    (v(b), theta(b)).
    """
    A, B, C = _frame(u, v)
    if mod.ring != C:
        raise ShapeMismatch("module must live over the far ring of the frame")
    mb = restrict_scalars(mod, v)
    theta = tuple(theta)
    if len(theta) != B.n:
        raise ShapeMismatch("derivation table has the wrong length")
    for b1 in range(B.n):
        for b2 in range(B.n):
            if theta[B.add[b1][b2]] != mb.add[theta[b1]][theta[b2]]:
                raise UsageError(f"table is not additive at ({b1},{b2})")
            leib = mb.add[mb.act[b1][theta[b2]]][mb.act[b2][theta[b1]]]
            if theta[B.mul[b1][b2]] != leib:
                raise UsageError(f"table violates the product rule at ({b1},{b2})")
    for a in range(A.n):
        if theta[u(a)] != mb.zero:
            raise UsageError(f"table does not kill the image of the base at {a}")
    triv = trivial_extension(C, mod)
    T = triv.total
    lift = RingHom(
        src=B,
        dst=T,
        table=tuple(T.add[triv.section[v(b)]][triv.embed[theta[b]]] for b in range(B.n)),
        name="lift",
    )
    out = SquareZeroExtension(
        alg=C,
        mod=mod,
        total=T,
        embed=triv.embed,
        project=triv.project,
        base=B,
        base_to_alg=v,
        base_lift=lift,
        name=name or "gamma",
    )
    validate_extension(out)
    return out


def delta(zeta, v, mod, name=None):
    """An extension of B by mod as a structure on the trivial 2-extension of C."""
    B, C = v.src, v.dst
    validate_ring_hom(v)
    if mod.ring != C:
        raise ShapeMismatch("module must live over the far ring")
    if zeta.alg != B or zeta.mod != restrict_scalars(mod, v):
        raise ShapeMismatch("extension must present B by the restricted module")
    return based_trivial_2ext(v, mod, twist=forget_base(zeta), name=name or "delta")


def tau(xi, u, name=None):
    """Weaken the base of an extension along u; the total ring is untouched."""
    if xi.base is None:
        raise UsageError("tau needs a based extension")
    if u.dst != xi.base:
        raise ShapeMismatch("restriction map must land in the base")
    validate_ring_hom(u)
    out = restrict_base(xi, u, name=name)
    validate_extension(out)
    return out


def rho(xi, u, name=None):
    """Weaken the base of a structured 2-extension along u.

    The underlying 2-extension is untouched; the recorded splitting of the
    restriction to the old base is pulled back to the new one.
    """
    if xi.base is None or xi.a_structure is None:
        raise UsageError("rho needs a based 2-extension carrying a structure")
    if u.dst != xi.base:
        raise ShapeMismatch("restriction map must land in the base")
    validate_ring_hom(u)
    A = u.src
    W = xi.a_structure
    out = with_base_2ext(xi, u.then(xi.base_to_alg), name=name or f"{xi.name}|{A.name}")
    chi_a = restrict_to_base(out)
    triv_a = trivial_2extension(A, chi_a.mod)
    old = fiber_product(xi.augment, xi.base_to_alg, name=f"{xi.ring.name}|{xi.base.name}")
    fresh = fiber_product(xi.augment, out.base_to_alg, name=f"{xi.ring.name}|{A.name}")
    K = fiber_product(W.pp, u)
    p_table = []
    for q, a in K.pairs:
        r, _ = old.pairs[W.p(q)]
        p_table.append(fresh.index[(r, a)])
    s = Splitting(
        src=chi_a,
        dst=triv_a,
        ring=K.ring,
        i=tuple(K.index[(W.i[x], A.zero)] for x in range(chi_a.nmod.n)),
        ip=tuple(K.index[(W.ip[m], A.zero)] for m in range(chi_a.mod.n)),
        p=RingHom(src=K.ring, dst=chi_a.ring, table=tuple(p_table), name="p"),
        pp=K.p2,
        mod_iso=W.mod_iso,
        base_iso=identity_hom(A),
        name=f"{W.name}|{A.name}",
    )
    return attach_a_structure(out, s)


# ------------------------------------------------------- exactness report


@dataclass(frozen=True)
class TransitivityReport:
    """Kernel-image comparisons along Der -> Exal -> Exal^2 for one frame."""

    sizes: tuple  # orders of the six groups, sequence order
    injective: bool
    exact_at: tuple  # four interior nodes
    boundary_node: bool  # kernel of the 2-extension boundary

    def exact(self):
        return self.injective and all(self.exact_at) and self.boundary_node


def check_transitivity_exactness(u, v, mod, rep_cap=None):
    """Exactness of the derivation and extension sequence of a frame.

    Computes all six groups for u: A -> B, v: B -> C and the C-module mod,
    then compares kernels with images at the interior nodes from explicit
    representatives. The last node uses the 2-extension boundary: a class
    of extensions of B dies exactly when its structure on the trivial
    2-extension of C is isomorphic to the canonical one.
    """
    A, B, C = _frame(u, v)
    if mod.ring != C:
        raise ShapeMismatch("module must live over the far ring of the frame")
    uv = u.then(v)
    mb = restrict_scalars(mod, v)
    der_bc = derivations(C, mod, base_hom=v, cap=rep_cap)
    der_ac = derivations(C, mod, base_hom=uv, cap=rep_cap)
    der_ab = derivations(B, mb, base_hom=u, cap=rep_cap)
    exal_bc = exal_classify(C, mod, base_hom=v, rep_cap=rep_cap)
    exal_ac = exal_classify(C, mod, base_hom=uv, rep_cap=rep_cap)
    exal_ab = exal_classify(B, mb, base_hom=u, rep_cap=rep_cap)
    zero_bc = exal_bc.class_of_extension(trivial_extension(C, mod, base_hom=v))
    zero_ac = exal_ac.class_of_extension(trivial_extension(C, mod, base_hom=uv))
    zero_ab = exal_ab.class_of_extension(trivial_extension(B, mb, base_hom=u))

    injective = set(der_bc.tables) <= set(der_ac.tables)

    def res_der(t):
        return tuple(t[v(b)] for b in range(B.n))

    ker_res = {t for t in der_ac.tables if all(m == mod.zero for m in res_der(t))}
    node_der_ac = ker_res == set(der_bc.tables)

    gamma_class = {}
    for t in der_ab.tables:
        gamma_class[t] = exal_bc.class_of_extension(gamma(t, u, v, mod))
    ker_gamma = {t for t, k in gamma_class.items() if k == zero_bc}
    node_der_ab = ker_gamma == {res_der(t) for t in der_ac.tables}

    tau_class = {}
    for coords, _ in exal_bc.reps:
        moved = tau(exal_bc.extension_for(coords), u)
        tau_class[coords] = exal_ac.class_of_extension(moved)
    ker_tau = {c for c, k in tau_class.items() if k == zero_ac}
    node_exal_bc = ker_tau == set(gamma_class.values())

    pull_class = {}
    for coords, _ in exal_ac.reps:
        moved = pullback_extension(exal_ac.extension_for(coords), v, base_to_src=u)
        pull_class[coords] = exal_ab.class_of_extension(moved)
    ker_pull = {c for c, k in pull_class.items() if k == zero_ab}
    node_exal_ac = ker_pull == set(tau_class.values())

    zero2 = based_trivial_2ext(v, mod)
    ker_delta = set()
    for coords, _ in exal_ab.reps:
        image = delta(exal_ab.extension_for(coords), v, mod)
        if isomorphic_2ext(image, zero2):
            ker_delta.add(coords)
    boundary_node = ker_delta == set(pull_class.values())

    return TransitivityReport(
        sizes=(
            der_bc.size,
            der_ac.size,
            der_ab.size,
            exal_bc.size,
            exal_ac.size,
            exal_ab.size,
        ),
        injective=injective,
        exact_at=(node_der_ac, node_der_ab, node_exal_bc, node_exal_ac),
        boundary_node=boundary_node,
    )


# ---------------------------------------------------------- base equality


def der_base_invariance(omega, base_to_alg, mod):
    """Derivations over A and over A' agree for any squarezero omega.

    base_to_alg carries the A-structure of the algebra; the A'-structure
    goes through the projection of omega. Returns literal equality of the
    two derivation tables.
    """
    if omega.base is not None:
        raise UsageError("the fixed extension must not carry a base")
    validate_extension(omega)
    if base_to_alg.src != omega.alg:
        raise TargetMismatch("structure map must start at the quotient of omega")
    over_a = derivations(base_to_alg.dst, mod, base_hom=base_to_alg)
    over_ap = derivations(base_to_alg.dst, mod, base_hom=omega.project.then(base_to_alg))
    return set(over_a.tables) == set(over_ap.tables)
