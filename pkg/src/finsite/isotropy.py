"""Extended inner automorphisms of sheaves and the main verification.

A candidate is a family picking, for every object C, an element of the
sheaf's free extension by one generator at C.  Membership asks for
substitutional invertibility, generic commutation with every restriction
and amalgamation symbol, and reflection of definedness; the group product
is substitution.  The verifier compares these groups against the centre of
the site and the centre of the category of sheafified representables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import HypothesisViolationError, SizeLimitError
from .fincat import CentreElement, FinCategory, centre, full_subcategory
from .groups import FiniteGroup, finite_group
from .presheaf import (
    AycCategory,
    DEFAULT_MAX_FAMILIES,
    Presheaf,
    PresheafMap,
    ayc_category,
    coproduct_many,
    is_subcanonical,
    quotient_presheaf,
    representable,
    sheafify,
    terminal_presheaf,
)
from .freeext import FreeExtension, free_extension, sieve_extension, subst_map
from .site import Site, empty_cover_objects

DEFAULT_MAX_CANDIDATES = 1_000_000


@dataclass(frozen=True)
class IsotropyElement:
    """One free-extension element per object, aligned with object order."""

    components: tuple[str, ...]
    inverse_components: tuple[str, ...] | None = field(default=None, compare=False)

    def component(self, x: int) -> str:
        return self.components[x]

    def display(self, cat: FinCategory) -> dict[str, str]:
        return {cat.objects[x]: e for x, e in enumerate(self.components)}


@dataclass
class MembershipReport:
    invertible: bool
    alpha_commutes: bool
    sigma_commutes: bool
    reflects_definedness: bool
    witnesses: dict[str, object]
    inverse: tuple[str, ...] | None = None

    @property
    def member(self) -> bool:
        return (
            self.invertible
            and self.alpha_commutes
            and self.sigma_commutes
            and self.reflects_definedness
        )


class IsotropyContext:
    """Caches the per-object free extensions and candidate-independent maps
    used by membership checks over a fixed sheaf."""

    def __init__(self, sheaf: Presheaf, site: Site, max_families: int = DEFAULT_MAX_FAMILIES):
        self.sheaf = sheaf
        self.site = site
        self.max_families = max_families
        cat = site.category
        self.extensions: dict[int, FreeExtension] = {
            c: free_extension(sheaf, site, [("x", c)], max_families)
            for c in range(len(cat.objects))
        }
        self._subst_endo: dict[tuple[int, str], PresheafMap] = {}
        self._alpha_maps: dict[int, PresheafMap] = {}
        self._invertibles: dict[int, dict[str, str]] = {}
        self._sigma_data: dict[tuple[int, tuple], dict] = {}
        self._reflect_data: dict[tuple[int, tuple], dict] = {}

    def extension(self, c: int) -> FreeExtension:
        return self.extensions[c]

    def subst_endo(self, c: int, point: str) -> PresheafMap:
        """The carrier endomap substituting ``point`` for the generator at c."""
        key = (c, point)
        if key not in self._subst_endo:
            ext = self.extensions[c]
            self._subst_endo[key] = subst_map(
                ext, ext.carrier, ext.insert, {"x": point}
            )
        return self._subst_endo[key]

    def alpha_map(self, f: int) -> PresheafMap:
        """carrier(x at dom f) -> carrier(x at cod f), substituting the
        restricted generator; candidate-independent."""
        if f not in self._alpha_maps:
            cat = self.site.category
            c, d = cat.dom(f), cat.cod(f)
            ext_c, ext_d = self.extensions[c], self.extensions[d]
            point = ext_d.carrier.act(f, ext_d.generic["x"])
            self._alpha_maps[f] = subst_map(
                ext_c, ext_d.carrier, ext_d.insert, {"x": point}
            )
        return self._alpha_maps[f]

    def invertibles(self, c: int) -> dict[str, str]:
        """Every substitutionally invertible element at c with its inverse."""
        if c not in self._invertibles:
            ext = self.extensions[c]
            generic = ext.generic["x"]
            out: dict[str, str] = {}
            for e in ext.carrier.sets[c]:
                for e_inv in ext.carrier.sets[c]:
                    if (
                        self.subst_endo(c, e_inv).apply(c, e) == generic
                        and self.subst_endo(c, e).apply(c, e_inv) == generic
                    ):
                        out[e] = e_inv
                        break
            self._invertibles[c] = out
        return self._invertibles[c]

    def sigma_data(self, c: int, cover) -> dict:
        """Candidate-independent data for the amalgamation commutation check."""
        key = (c, cover.key())
        if key not in self._sigma_data:
            bundle, insert, generic, amalgam = sieve_extension(
                self.sheaf, self.site, cover, self.max_families
            )
            cat = self.site.category
            member_maps = {
                f: subst_map(
                    self.extensions[cat.dom(f)], bundle.sheaf, insert, {"x": generic[f]}
                )
                for f in cover.members
            }
            top_map = subst_map(
                self.extensions[c], bundle.sheaf, insert, {"x": amalgam}
            )
            self._sigma_data[key] = {
                "sheaf": bundle.sheaf,
                "member_maps": member_maps,
                "top_map": top_map,
            }
        return self._sigma_data[key]

    def reflect_data(self, c: int, cover) -> dict:
        """Candidate-independent data for the definedness-reflection check."""
        key = (c, cover.key())
        if key not in self._reflect_data:
            cat = self.site.category
            members = cover.sorted_members()
            gens = [(f"x_{cat.name(f)}", cat.dom(f)) for f in members]
            ext = free_extension(self.sheaf, self.site, gens, self.max_families)
            member_maps = {
                f: subst_map(
                    self.extensions[cat.dom(f)],
                    ext.carrier,
                    ext.insert,
                    {"x": ext.generic[f"x_{cat.name(f)}"]},
                )
                for f in members
            }
            self._reflect_data[key] = {"extension": ext, "member_maps": member_maps}
        return self._reflect_data[key]


def _check_alpha(ctx: IsotropyContext, components: tuple[str, ...]):
    # For f : C -> D, substituting the restricted generator into the C
    # component must agree with restricting the D component; both sides
    # live at object C of the extension at D.
    cat = ctx.site.category
    for f in range(len(cat.morphisms)):
        c, d = cat.dom(f), cat.cod(f)
        ext_d = ctx.extensions[d]
        left = ctx.alpha_map(f).apply(c, components[c])
        right = ext_d.carrier.act(f, components[d])
        if left != right:
            return cat.name(f)
    return None


def _check_sigma(ctx: IsotropyContext, components: tuple[str, ...]):
    cat = ctx.site.category
    for c in range(len(cat.objects)):
        for cover in ctx.site.topology.covers_of(c):
            data = ctx.sigma_data(c, cover)
            sheaf = data["sheaf"]
            images = {
                f: data["member_maps"][f].apply(cat.dom(f), components[cat.dom(f)])
                for f in cover.members
            }
            matching = all(
                sheaf.act(g, images[f]) == images[cat.comp[(f, g)]]
                for f in cover.members
                for g in cat.cone(cat.dom(f))
            )
            expected = data["top_map"].apply(c, components[c])
            if not matching:
                return (cat.objects[c], cover)
            candidates = [
                y
                for y in sheaf.sets[c]
                if all(sheaf.act(f, y) == images[f] for f in cover.members)
            ]
            if candidates != [expected]:
                return (cat.objects[c], cover)
    return None


def _check_reflect(ctx: IsotropyContext, components: tuple[str, ...]):
    cat = ctx.site.category
    for c in range(len(cat.objects)):
        for cover in ctx.site.topology.covers_of(c):
            data = ctx.reflect_data(c, cover)
            ext = data["extension"]
            images = {
                f: data["member_maps"][f].apply(cat.dom(f), components[cat.dom(f)])
                for f in cover.members
            }
            relations = [
                (cat.dom(g), ext.carrier.act(g, images[f]), images[cat.comp[(f, g)]])
                for f in cover.members
                for g in cat.cone(cat.dom(f))
            ]
            quotient, projection = quotient_presheaf(ext.carrier, relations)
            q_sheaf, unit = sheafify(quotient, ctx.site.topology, ctx.max_families)

            def push(x: int, e: str) -> str:
                return unit.apply(x, projection.apply(x, e))

            generic_ok = all(
                q_sheaf.act(g, push(cat.dom(f), ext.generic[f"x_{cat.name(f)}"]))
                == push(cat.dom(cat.comp[(f, g)]), ext.generic[f"x_{cat.name(cat.comp[(f, g)])}"])
                for f in cover.members
                for g in cat.cone(cat.dom(f))
            )
            if not generic_ok:
                return (cat.objects[c], cover)
    return None


def check_membership(
    sheaf: Presheaf, site: Site, family, ctx: IsotropyContext | None = None
) -> MembershipReport:
    """Run the four membership conditions on a candidate family.

    ``family`` maps object names (or ids) to free-extension carrier
    elements; witnesses name the failing morphism or cover.
    """
    ctx = ctx or IsotropyContext(sheaf, site)
    cat = site.category
    if isinstance(family, IsotropyElement):
        components = family.components
    else:
        resolved = {}
        for key, value in family.items():
            x = cat.object_id(key) if isinstance(key, str) else key
            resolved[x] = value
        components = tuple(resolved[x] for x in range(len(cat.objects)))
    for x, e in enumerate(components):
        if e not in ctx.extensions[x].carrier.sets[x]:
            raise HypothesisViolationError(
                f"family component at {cat.objects[x]!r} is not a carrier element"
            )
    witnesses: dict[str, object] = {}
    inverse: list[str] | None = []
    for x in range(len(cat.objects)):
        inv = ctx.invertibles(x).get(components[x])
        if inv is None:
            witnesses["invertible"] = cat.objects[x]
            inverse = None
            break
        inverse.append(inv)
    alpha_witness = _check_alpha(ctx, components)
    if alpha_witness is not None:
        witnesses["alpha_commutes"] = alpha_witness
    sigma_witness = _check_sigma(ctx, components)
    if sigma_witness is not None:
        witnesses["sigma_commutes"] = sigma_witness
    reflect_witness = _check_reflect(ctx, components)
    if reflect_witness is not None:
        witnesses["reflects_definedness"] = reflect_witness
    return MembershipReport(
        invertible="invertible" not in witnesses,
        alpha_commutes=alpha_witness is None,
        sigma_commutes=sigma_witness is None,
        reflects_definedness=reflect_witness is None,
        witnesses=witnesses,
        inverse=tuple(inverse) if inverse is not None else None,
    )


def _enumerate_members(
    ctx: IsotropyContext, pure_only: bool, max_candidates: int
) -> list[IsotropyElement]:
    """Backtracking over per-object candidates with commutation pruning.

    Invertibility filters candidates up front; the naturality constraint
    along every morphism between already-assigned objects prunes the
    product space.  With ``pure_only`` the candidates are restricted to
    generator images, and the amalgamation checks are skipped (they follow
    from invertibility plus commutation on subcanonical sites without
    empty covers).
    """
    cat = ctx.site.category
    n = len(cat.objects)
    candidate_sets: list[list[str]] = []
    for c in range(n):
        ext = ctx.extensions[c]
        invertible = ctx.invertibles(c)
        if pure_only:
            pure = []
            for f in cat.endomorphisms(c):
                e = ext.carrier.act(f, ext.generic["x"])
                if e in invertible and e not in pure:
                    pure.append(e)
            candidate_sets.append(pure)
        else:
            candidate_sets.append([e for e in ext.carrier.sets[c] if e in invertible])

    chosen: list[str] = []
    survivors: list[tuple[str, ...]] = []
    visited = 0

    def alpha_ok(x: int, e: str) -> bool:
        for f in range(len(cat.morphisms)):
            m = cat.morphisms[f]
            if m.dom > x or m.cod > x or (m.dom != x and m.cod != x):
                continue
            e_dom = e if m.dom == x else chosen[m.dom]
            e_cod = e if m.cod == x else chosen[m.cod]
            if ctx.alpha_map(f).apply(m.dom, e_dom) != ctx.extensions[m.cod].carrier.act(
                f, e_cod
            ):
                return False
        return True

    def rec(x: int):
        nonlocal visited
        if x == n:
            survivors.append(tuple(chosen))
            return
        for e in candidate_sets[x]:
            visited += 1
            if visited > max_candidates:
                raise SizeLimitError(
                    f"candidate enumeration exceeded {max_candidates}"
                )
            if alpha_ok(x, e):
                chosen.append(e)
                rec(x + 1)
                chosen.pop()

    rec(0)
    members = []
    for components in survivors:
        if not pure_only:
            if _check_sigma(ctx, components) is not None:
                continue
            if _check_reflect(ctx, components) is not None:
                continue
        inverse = tuple(ctx.invertibles(c)[components[c]] for c in range(n))
        members.append(IsotropyElement(components, inverse))
    return members


def isotropy_group(
    sheaf: Presheaf,
    site: Site,
    method: str = "auto",
    ctx: IsotropyContext | None = None,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
) -> FiniteGroup:
    """The group of membership-passing families under substitution.

    ``method`` "full" enumerates the whole candidate product with all four
    checks; "pure" restricts to generator-image families, valid on
    subcanonical sites without empty covers; "auto" picks "pure" when those
    hypotheses hold.
    """
    ctx = ctx or IsotropyContext(sheaf, site)
    if method not in ("auto", "full", "pure"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        ok, _ = is_subcanonical(site.category, site.topology, ctx.max_families)
        method = "pure" if ok and not empty_cover_objects(site.category, site.topology) else "full"
    if method == "pure":
        ok, _ = is_subcanonical(site.category, site.topology, ctx.max_families)
        if not ok or empty_cover_objects(site.category, site.topology):
            raise HypothesisViolationError(
                "the pure-family fast path needs a subcanonical site without empty covers"
            )
    members = _enumerate_members(ctx, method == "pure", max_candidates)

    cat = site.category

    def multiply(a: IsotropyElement, b: IsotropyElement) -> IsotropyElement:
        components = tuple(
            ctx.subst_endo(c, b.components[c]).apply(c, a.components[c])
            for c in range(len(cat.objects))
        )
        for m in members:
            if m.components == components:
                return m
        return IsotropyElement(components)

    return finite_group(members, multiply)


def centre_embedding(
    site: Site, sheaf: Presheaf, psi: CentreElement, ctx: IsotropyContext | None = None
) -> IsotropyElement:
    """The family sending each object to the generator moved by the centre.

    Component at C is the generator at C restricted along psi's component;
    on subcanonical sites without empty covers this lands bijectively on
    the isotropy group.
    """
    ctx = ctx or IsotropyContext(sheaf, site)
    cat = site.category
    components = []
    inverse = []
    for c in range(len(cat.objects)):
        ext = ctx.extensions[c]
        components.append(ext.carrier.act(psi.components[c], ext.generic["x"]))
        inv = cat.two_sided_inverse(psi.components[c])
        if inv is not None:
            inverse.append(ext.carrier.act(inv, ext.generic["x"]))
    return IsotropyElement(
        tuple(components),
        tuple(inverse) if len(inverse) == len(components) else None,
    )


def is_inner(
    sheaf: Presheaf, gamma: PresheafMap, site: Site
) -> CentreElement | None:
    """A centre element acting as the given endomorphism, if one exists."""
    ok, _ = is_subcanonical(site.category, site.topology)
    if not ok:
        raise HypothesisViolationError("inner recognition needs a subcanonical site")
    cat = site.category
    for psi in centre(cat).elements:
        if all(
            gamma.components[c] == {e: sheaf.act(psi.components[c], e) for e in sheaf.sets[c]}
            for c in range(len(cat.objects))
        ):
            return psi
    return None


def extended_action(psi: CentreElement, gamma: PresheafMap) -> PresheafMap:
    """The automorphism of gamma's target with components along the centre."""
    target = gamma.target
    cat = target.cat
    components = {
        c: {e: target.act(psi.components[c], e) for e in target.sets[c]}
        for c in range(len(cat.objects))
    }
    return PresheafMap(target, target, components)


def dense_extension(ayc: AycCategory, beta: CentreElement, sheaf: Presheaf) -> PresheafMap:
    """Extend a centre element of the sheafified-representable category.

    Every sheaf is a canonical colimit of sheafified representables, so a
    natural automorphism of their identity functor determines a unique
    compatible endomorphism here: the component at C sends e to the image
    of beta's twist of the canonical point under the map classifying e.
    """
    cat = sheaf.cat
    components: dict[int, dict[str, str]] = {}
    for c in range(len(cat.objects)):
        bundle = ayc.sheafifications[c]
        beta_map = ayc.maps[beta.components[c]]
        canonical = bundle.unit.apply(c, cat.name(cat.identity[c]))
        twisted = beta_map.apply(c, canonical)
        comp = {}
        for e in sheaf.sets[c]:
            classify = PresheafMap(
                bundle.presheaf,
                sheaf,
                {
                    d: {
                        cat.name(g): sheaf.act(g, e) for g in cat.hom_ids(d, c)
                    }
                    for d in range(len(cat.objects))
                },
            )
            comp[e] = bundle.extend(classify).apply(c, twisted)
        components[c] = comp
    return PresheafMap(sheaf, sheaf, components)


def auto_catalogue(site: Site, max_families: int = DEFAULT_MAX_FAMILIES) -> list[tuple[str, Presheaf]]:
    """Sheafified representables, the terminal sheaf, and sheafified binary
    coproducts of those, named deterministically."""
    cat = site.category
    named: list[tuple[str, Presheaf]] = []
    for x in range(len(cat.objects)):
        sheaf, _ = sheafify(representable(cat, x), site.topology, max_families)
        named.append((f"a(y {cat.objects[x]})", sheaf))
    named.append(("terminal", terminal_presheaf(cat)))
    base = list(named)
    for i in range(len(base)):
        for j in range(i, len(base)):
            total, _ = coproduct_many([base[i][1], base[j][1]])
            sheaf, _ = sheafify(total, site.topology, max_families)
            named.append((f"a({base[i][0]} + {base[j][0]})", sheaf))
    return named


def verify_main_theorem(
    site: Site,
    catalogue: list[tuple[str, Presheaf]] | None = None,
    method: str = "full",
    max_families: int = DEFAULT_MAX_FAMILIES,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
) -> dict:
    """Check that every sheaf's isotropy group is the relevant centre.

    Computes the centre of the site's category, the centre of the category
    of sheafified representables, and the isotropy group of every catalogue
    sheaf; asserts the dense-extension map is a group isomorphism from the
    former onto each of the latter, plus the subcanonical comparisons
    (restriction to objects without empty covers, and the embedding of the
    site centre itself).  Violations are collected, not raised.
    """
    cat = site.category
    violations: list[str] = []
    centre_group = centre(cat)
    subcanonical, _ = is_subcanonical(cat, site.topology, max_families)
    empties = empty_cover_objects(cat, site.topology)
    ayc = ayc_category(cat, site.topology, max_families)
    ayc_centre = centre(ayc.category)
    if catalogue is None:
        catalogue = auto_catalogue(site, max_families)

    restricted_order = None
    if subcanonical:
        keep = [o for o in cat.objects if o not in empties]
        sub = full_subcategory(cat, keep)
        sub_centre = centre(sub)
        restricted_order = sub_centre.order

        def restrict(psi: CentreElement) -> CentreElement:
            return CentreElement(
                tuple(
                    sub.morphism_id(cat.name(psi.components[cat.object_id(o)]))
                    for o in sub.objects
                )
            )

        images = [restrict(psi) for psi in centre_group.elements]
        if len(set(images)) != centre_group.order or set(images) != set(
            sub_centre.elements
        ):
            violations.append(
                "restricting the centre to objects without empty covers is not bijective"
            )
        else:
            for i, a in enumerate(centre_group.elements):
                for j, b in enumerate(centre_group.elements):
                    product = centre_group.elements[centre_group.table[(i, j)]]
                    if restrict(product) != CentreElement(
                        tuple(
                            sub.comp[
                                (
                                    restrict(a).components[x],
                                    restrict(b).components[x],
                                )
                            ]
                            for x in range(len(sub.objects))
                        )
                    ):
                        violations.append("centre restriction is not a homomorphism")

        def to_ayc(psi: CentreElement) -> CentreElement:
            comps = []
            for x in range(len(cat.objects)):
                bundle = ayc.sheafifications[x]
                rep = bundle.presheaf
                post = PresheafMap(
                    rep,
                    rep,
                    {
                        d: {
                            cat.name(g): cat.name(
                                cat.comp[(psi.components[x], g)]
                            )
                            for g in cat.hom_ids(d, x)
                        }
                        for d in range(len(cat.objects))
                    },
                )
                sheaf_map = bundle.extend(post.then(bundle.unit))
                comps.append(ayc.morphism_for(x, x, sheaf_map))
            return CentreElement(tuple(comps))

        ayc_images = [to_ayc(psi) for psi in centre_group.elements]
        if len(set(ayc_images)) != centre_group.order or set(ayc_images) != set(
            ayc_centre.elements
        ):
            violations.append(
                "the centre does not transfer bijectively onto the "
                "sheafified-representable category"
            )

    per_sheaf = []
    for name, sheaf in catalogue:
        ctx = IsotropyContext(sheaf, site, max_families)
        group = isotropy_group(sheaf, site, method, ctx, max_candidates)
        entry = {"name": name, "isotropy_order": group.order, "bijection": []}
        if group.order != ayc_centre.order:
            violations.append(
                f"sheaf {name!r}: isotropy order {group.order} differs from "
                f"the sheafified-representable centre order {ayc_centre.order}"
            )
        dense_images = []
        for beta in ayc_centre.elements:
            components = []
            for c in range(len(cat.objects)):
                ext = ctx.extension(c)
                twist = dense_extension(ayc, beta, ext.carrier)
                components.append(twist.components[c][ext.generic["x"]])
            image = IsotropyElement(tuple(components))
            dense_images.append(image)
            entry["bijection"].append(
                [beta.display(ayc.category), image.display(cat)]
            )
        member_set = {m.components for m in group.elements}
        if any(im.components not in member_set for im in dense_images):
            violations.append(
                f"sheaf {name!r}: a dense extension image is not an isotropy member"
            )
        elif len({im.components for im in dense_images}) != ayc_centre.order or {
            im.components for im in dense_images
        } != member_set:
            violations.append(
                f"sheaf {name!r}: dense extension is not a bijection onto isotropy"
            )
        else:
            for i in range(ayc_centre.order):
                for j in range(ayc_centre.order):
                    product = ayc_centre.table[(i, j)]
                    gi = group.index(
                        next(
                            m
                            for m in group.elements
                            if m.components == dense_images[i].components
                        )
                    )
                    gj = group.index(
                        next(
                            m
                            for m in group.elements
                            if m.components == dense_images[j].components
                        )
                    )
                    if (
                        group.elements[group.table[(gi, gj)]].components
                        != dense_images[product].components
                    ):
                        violations.append(
                            f"sheaf {name!r}: dense extension is not a homomorphism"
                        )
        if subcanonical and not empties:
            embedded = {
                centre_embedding(site, sheaf, psi, ctx).components
                for psi in centre_group.elements
            }
            if embedded != member_set:
                violations.append(
                    f"sheaf {name!r}: the centre embedding does not land "
                    "bijectively on the isotropy group"
                )
        per_sheaf.append(entry)

    return {
        "centre_order": centre_group.order,
        "ayc_centre_order": ayc_centre.order,
        "subcanonical": subcanonical,
        "empty_cover_objects": list(empties),
        "restricted_centre_order": restricted_order,
        "per_sheaf": per_sheaf,
        "violations": violations,
    }
