"""Finite presheaves: maps, matching families, sheafification, quotients.

Element ids are strings, unique per object.  Constructed presheaves use
canonical provenance ids (coproducts tag parts, plus-construction classes
are named by their least representative index) so all outputs are stable
across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations

from .errors import (
    NotMatchingError,
    NoAmalgamationError,
    PresheafInvalidError,
    SizeLimitError,
    UnknownObjectError,
)
from .fincat import FinCategory, validate_category
from .site import Sieve, Topology, maximal_sieve, pullback_sieve

DEFAULT_MAX_FAMILIES = 1_000_000


@dataclass
class Presheaf:
    """A contravariant set-valued functor on a finite category.

    ``sets`` maps object id to an ordered tuple of element ids; ``actions``
    maps each morphism f : X -> Y to a dict sending elements of sets[Y] to
    elements of sets[X].
    """

    cat: FinCategory
    sets: dict[int, tuple[str, ...]]
    actions: dict[int, dict[str, str]]

    def elements(self, x: int) -> tuple[str, ...]:
        return self.sets[x]

    def act(self, f: int, e: str) -> str:
        return self.actions[f][e]

    def restrict_map(self, f: int) -> dict[str, str]:
        return self.actions[f]

    def size(self) -> dict[str, int]:
        return {self.cat.objects[x]: len(v) for x, v in sorted(self.sets.items())}

    def __eq__(self, other):
        return (
            isinstance(other, Presheaf)
            and self.cat is other.cat
            and self.sets == other.sets
            and self.actions == other.actions
        )


@dataclass
class PresheafMap:
    """A natural transformation between presheaves on the same category."""

    source: Presheaf
    target: Presheaf
    components: dict[int, dict[str, str]]

    def apply(self, x: int, e: str) -> str:
        return self.components[x][e]

    def then(self, other: "PresheafMap") -> "PresheafMap":
        if other.source is not self.target and other.source != self.target:
            raise NotMatchingError("maps are not composable")
        comps = {
            x: {e: other.components[x][v] for e, v in comp.items()}
            for x, comp in self.components.items()
        }
        return PresheafMap(self.source, other.target, comps)

    def is_bijective(self) -> bool:
        for x, comp in self.components.items():
            if len(set(comp.values())) != len(comp) or len(comp) != len(
                self.target.sets[x]
            ):
                return False
        return True

    def __eq__(self, other):
        return (
            isinstance(other, PresheafMap)
            and self.source == other.source
            and self.target == other.target
            and self.components == other.components
        )


def identity_map(presheaf: Presheaf) -> PresheafMap:
    return PresheafMap(
        presheaf,
        presheaf,
        {x: {e: e for e in v} for x, v in presheaf.sets.items()},
    )


def check_presheaf_map(m: PresheafMap) -> None:
    """Raise if components are ill-typed or naturality fails."""
    f_, g_ = m.source, m.target
    for x in range(len(f_.cat.objects)):
        comp = m.components.get(x)
        if comp is None or set(comp) != set(f_.sets[x]):
            raise NotMatchingError(
                f"map component at {f_.cat.objects[x]!r} does not cover the source"
            )
        for e, v in comp.items():
            if v not in g_.sets[x]:
                raise NotMatchingError(
                    f"component at {f_.cat.objects[x]!r} sends {e!r} outside the target"
                )
    for f in range(len(f_.cat.morphisms)):
        mor = f_.cat.morphisms[f]
        for e in f_.sets[mor.cod]:
            if m.components[mor.dom][f_.act(f, e)] != g_.act(
                f, m.components[mor.cod][e]
            ):
                raise NotMatchingError(
                    f"naturality fails along {f_.cat.name(f)!r} at {e!r}"
                )


@dataclass(frozen=True)
class PresheafViolation:
    kind: str
    message: str
    witnesses: tuple[str, ...] = ()


def validate_presheaf(cat: FinCategory, sets, actions) -> Presheaf:
    """Check coverage and functoriality of a raw presheaf description.

    ``sets`` maps object name to element list; ``actions`` maps morphism
    name to an element dict.  Raises :class:`PresheafInvalidError` with all
    violations on failure.
    """
    violations: list[PresheafViolation] = []
    by_obj: dict[int, tuple[str, ...]] = {}
    for x in range(len(cat.objects)):
        name = cat.objects[x]
        elems = list(sets.get(name, ()))
        if len(set(elems)) != len(elems):
            violations.append(
                PresheafViolation(
                    "dangling-element", f"duplicate element id at {name!r}", (name,)
                )
            )
        by_obj[x] = tuple(elems)
    acts: dict[int, dict[str, str]] = {}
    for f in range(len(cat.morphisms)):
        mname = cat.name(f)
        table = actions.get(mname)
        if table is None:
            violations.append(
                PresheafViolation("missing-action", f"no action for {mname!r}", (mname,))
            )
            continue
        codset, domset = by_obj[cat.cod(f)], by_obj[cat.dom(f)]
        if set(table) != set(codset):
            violations.append(
                PresheafViolation(
                    "missing-action",
                    f"action of {mname!r} is not total on its codomain set",
                    (mname,),
                )
            )
            continue
        for e, v in table.items():
            if v not in domset:
                violations.append(
                    PresheafViolation(
                        "dangling-element",
                        f"action of {mname!r} sends {e!r} to undeclared {v!r}",
                        (mname, e, v),
                    )
                )
        acts[f] = dict(table)
    if violations:
        raise PresheafInvalidError(violations)

    for x in range(len(cat.objects)):
        ident = cat.identity[x]
        for e in by_obj[x]:
            if acts[ident][e] != e:
                violations.append(
                    PresheafViolation(
                        "functoriality",
                        f"identity action at {cat.objects[x]!r} moves {e!r}",
                        (cat.objects[x], e),
                    )
                )
    for (g, f), gf in cat.comp.items():
        for e in by_obj[cat.cod(g)]:
            if acts[f][acts[g][e]] != acts[gf][e]:
                violations.append(
                    PresheafViolation(
                        "functoriality",
                        f"action of {cat.name(gf)!r} disagrees with "
                        f"{cat.name(f)!r} after {cat.name(g)!r} on {e!r}",
                        (cat.name(g), cat.name(f), e),
                    )
                )
    if violations:
        raise PresheafInvalidError(violations)
    return Presheaf(cat, by_obj, acts)


def representable(cat: FinCategory, x) -> Presheaf:
    """The presheaf of morphisms into x; actions are precomposition."""
    xi = cat.object_id(x) if isinstance(x, str) else x
    if not 0 <= xi < len(cat.objects):
        raise UnknownObjectError(f"unknown object id {x!r}")
    sets = {
        y: tuple(cat.name(f) for f in cat.hom_ids(y, xi))
        for y in range(len(cat.objects))
    }
    actions = {}
    for f in range(len(cat.morphisms)):
        m = cat.morphisms[f]
        actions[f] = {
            cat.name(g): cat.name(cat.comp[(g, f)]) for g in cat.hom_ids(m.cod, xi)
        }
    return Presheaf(cat, sets, actions)


def sieve_subpresheaf(cat: FinCategory, sieve: Sieve) -> Presheaf:
    """The subpresheaf of the representable at the target spanned by a sieve."""
    sets = {
        y: tuple(
            cat.name(f)
            for f in cat.hom_ids(y, sieve.target)
            if f in sieve.members
        )
        for y in range(len(cat.objects))
    }
    actions = {}
    for f in range(len(cat.morphisms)):
        m = cat.morphisms[f]
        actions[f] = {
            cat.name(g): cat.name(cat.comp[(g, f)])
            for g in cat.hom_ids(m.cod, sieve.target)
            if g in sieve.members
        }
    return Presheaf(cat, sets, actions)


def terminal_presheaf(cat: FinCategory) -> Presheaf:
    sets = {x: ("*",) for x in range(len(cat.objects))}
    actions = {f: {"*": "*"} for f in range(len(cat.morphisms))}
    return Presheaf(cat, sets, actions)


def empty_presheaf(cat: FinCategory) -> Presheaf:
    sets = {x: () for x in range(len(cat.objects))}
    actions = {f: {} for f in range(len(cat.morphisms))}
    return Presheaf(cat, sets, actions)


def nat_transformations(f_: Presheaf, g_: Presheaf) -> list[PresheafMap]:
    """All natural transformations, in deterministic lexicographic order.

    Backtracks over (object, element) slots in declaration order,
    propagating the naturality constraints through every action after each
    assignment.
    """
    if f_.cat is not g_.cat and f_.cat != g_.cat:
        raise NotMatchingError("presheaves live on different categories")
    cat = f_.cat
    slots = [
        (x, e) for x in range(len(cat.objects)) for e in f_.sets[x]
    ]
    assignment: dict[tuple[int, str], str] = {}
    results: list[PresheafMap] = []

    def propagate(queue) -> bool:
        # Force values along every morphism out of newly assigned slots.
        while queue:
            (x, e) = queue.pop()
            v = assignment[(x, e)]
            for f in range(len(cat.morphisms)):
                m = cat.morphisms[f]
                if m.cod != x:
                    continue
                fe = f_.act(f, e)
                fv = g_.act(f, v)
                key = (m.dom, fe)
                if key in assignment:
                    if assignment[key] != fv:
                        return False
                else:
                    assignment[key] = fv
                    queue.append(key)
        return True

    def rec(i: int):
        if i == len(slots):
            results.append(
                PresheafMap(
                    f_,
                    g_,
                    {
                        x: {e: assignment[(x, e)] for e in f_.sets[x]}
                        for x in range(len(cat.objects))
                    },
                )
            )
            return
        key = slots[i]
        if key in assignment:
            rec(i + 1)
            return
        for candidate in g_.sets[key[0]]:
            before = dict(assignment)
            assignment[key] = candidate
            if propagate([key]):
                rec(i + 1)
            assignment.clear()
            assignment.update(before)

    rec(0)
    return results


def find_isomorphism(f_: Presheaf, g_: Presheaf) -> PresheafMap | None:
    for t in nat_transformations(f_, g_):
        if t.is_bijective():
            return t
    return None


@dataclass(frozen=True)
class MatchingFamily:
    """Elements indexed by a sieve, compatible under every restriction."""

    sieve: Sieve
    assignment: tuple[tuple[int, str], ...]

    def value(self, f: int) -> str:
        return dict(self.assignment)[f]

    def as_dict(self) -> dict[int, str]:
        return dict(self.assignment)


def make_matching_family(f_: Presheaf, sieve: Sieve, assignment: dict[int, str]) -> MatchingFamily:
    if set(assignment) != set(sieve.members):
        raise NotMatchingError("assignment does not cover the sieve")
    cat = f_.cat
    for f in sieve.members:
        if assignment[f] not in f_.sets[cat.dom(f)]:
            raise NotMatchingError(
                f"value at {cat.name(f)!r} is not an element of the right set"
            )
        for g in cat.cone(cat.dom(f)):
            if f_.act(g, assignment[f]) != assignment[cat.comp[(f, g)]]:
                raise NotMatchingError(
                    f"family not matching at {cat.name(f)!r} along {cat.name(g)!r}"
                )
    items = tuple((f, assignment[f]) for f in sieve.sorted_members())
    return MatchingFamily(sieve, items)


def matching_families(
    f_: Presheaf, sieve: Sieve, max_families: int = DEFAULT_MAX_FAMILIES
) -> list[MatchingFamily]:
    """All matching families for the sieve, lexicographically ordered."""
    cat = f_.cat
    members = sieve.sorted_members()
    out: list[MatchingFamily] = []
    chosen: dict[int, str] = {}
    visited = 0

    def consistent(f: int, v: str) -> bool:
        for a, va in chosen.items():
            for g in cat.cone(cat.dom(a)):
                if cat.comp[(a, g)] == f and f_.act(g, va) != v:
                    return False
            for g in cat.cone(cat.dom(f)):
                if cat.comp[(f, g)] == a and f_.act(g, v) != va:
                    return False
        for g in cat.cone(cat.dom(f)):
            if cat.comp[(f, g)] == f and f_.act(g, v) != v:
                return False
        return True

    def rec(i: int):
        nonlocal visited
        if i == len(members):
            out.append(
                MatchingFamily(sieve, tuple((f, chosen[f]) for f in members))
            )
            if len(out) > max_families:
                raise SizeLimitError(
                    f"more than {max_families} matching families at "
                    f"{cat.objects[sieve.target]!r}"
                )
            return
        f = members[i]
        for v in f_.sets[cat.dom(f)]:
            visited += 1
            if visited > 20 * max_families:
                raise SizeLimitError("matching family search guard exceeded")
            if consistent(f, v):
                chosen[f] = v
                rec(i + 1)
                del chosen[f]

    rec(0)
    return out


def amalgamations(f_: Presheaf, family: MatchingFamily) -> list[str]:
    """Elements of F(target) restricting to the family on every member."""
    cat = f_.cat
    values = family.as_dict()
    return [
        y
        for y in f_.sets[family.sieve.target]
        if all(f_.act(f, y) == values[f] for f in family.sieve.members)
    ]


class SheafStatus(Enum):
    SHEAF = "Sheaf"
    SEPARATED_ONLY = "SeparatedOnly"
    NOT_SEPARATED = "NotSeparated"


@dataclass
class SheafReport:
    status: SheafStatus
    missing: list[tuple[int, Sieve, MatchingFamily]]
    ambiguous: list[tuple[int, Sieve, MatchingFamily, list[str]]]


def sheaf_check(
    f_: Presheaf, topology: Topology, max_families: int = DEFAULT_MAX_FAMILIES
) -> SheafReport:
    """Count amalgamations of every matching family for every cover."""
    missing = []
    ambiguous = []
    for x in range(len(f_.cat.objects)):
        for cover in topology.covers_of(x):
            for family in matching_families(f_, cover, max_families):
                ams = amalgamations(f_, family)
                if len(ams) == 0:
                    missing.append((x, cover, family))
                elif len(ams) > 1:
                    ambiguous.append((x, cover, family, ams))
    if ambiguous:
        status = SheafStatus.NOT_SEPARATED
    elif missing:
        status = SheafStatus.SEPARATED_ONLY
    else:
        status = SheafStatus.SHEAF
    return SheafReport(status, missing, ambiguous)


def sheaf_status(
    f_: Presheaf, topology: Topology, max_families: int = DEFAULT_MAX_FAMILIES
) -> SheafStatus:
    return sheaf_check(f_, topology, max_families).status


def is_sheaf(f_: Presheaf, topology: Topology, max_families: int = DEFAULT_MAX_FAMILIES) -> bool:
    return sheaf_status(f_, topology, max_families) is SheafStatus.SHEAF


def coproduct_many(parts: list[Presheaf]) -> tuple[Presheaf, list[PresheafMap]]:
    """Pointwise disjoint union via part tagging, with the injections."""
    if not parts:
        raise NotMatchingError("coproduct of no presheaves is not supported")
    cat = parts[0].cat
    for p in parts[1:]:
        if p.cat is not cat and p.cat != cat:
            raise NotMatchingError("presheaves live on different categories")

    def tag(i: int, e: str) -> str:
        return f"{i}:{e}"

    sets = {
        x: tuple(tag(i, e) for i, p in enumerate(parts) for e in p.sets[x])
        for x in range(len(cat.objects))
    }
    actions = {}
    for f in range(len(cat.morphisms)):
        table = {}
        for i, p in enumerate(parts):
            for e, v in p.actions[f].items():
                table[tag(i, e)] = tag(i, v)
        actions[f] = table
    total = Presheaf(cat, sets, actions)
    injections = [
        PresheafMap(
            p,
            total,
            {x: {e: tag(i, e) for e in p.sets[x]} for x in range(len(cat.objects))},
        )
        for i, p in enumerate(parts)
    ]
    return total, injections


def coproduct(f_: Presheaf, g_: Presheaf) -> tuple[Presheaf, PresheafMap, PresheafMap]:
    total, (inl, inr) = coproduct_many([f_, g_])
    return total, inl, inr


@dataclass
class PlusConstruction:
    """One application of the plus-construction, keeping its provenance.

    For each object the enumerated (cover, family) pairs, the union-find
    class of each pair, and the least representative backing each element
    id are retained so classes can be unwound later (normal forms,
    extensions of maps into sheaves).
    """

    base: Presheaf
    topology: Topology
    presheaf: Presheaf
    unit: PresheafMap
    pairs: dict[int, list[tuple[Sieve, MatchingFamily]]]
    class_of_pair: dict[int, list[str]]
    rep_of_class: dict[int, dict[str, int]]

    def members_of_class(self, x: int, elem: str) -> list[int]:
        return [
            i for i, c in enumerate(self.class_of_pair[x]) if c == elem
        ]

    def extend(self, v: PresheafMap) -> PresheafMap:
        """The unique map F+ -> G through the unit, for G a sheaf.

        ``v`` must be a map from the base into a sheaf; each class is sent
        to the amalgamation of the image of its representative family.
        """
        g_ = v.target
        cat = self.base.cat
        components: dict[int, dict[str, str]] = {}
        for x in range(len(cat.objects)):
            comp = {}
            for elem, rep in self.rep_of_class[x].items():
                cover, family = self.pairs[x][rep]
                image = {
                    f: v.apply(cat.dom(f), val) for f, val in family.assignment
                }
                candidates = [
                    y
                    for y in g_.sets[x]
                    if all(g_.act(f, y) == image[f] for f in cover.members)
                ]
                if len(candidates) != 1:
                    raise NoAmalgamationError(
                        f"expected exactly one amalgamation in the target at "
                        f"{cat.objects[x]!r}, found {len(candidates)}"
                    )
                comp[elem] = candidates[0]
            components[x] = comp
        return PresheafMap(self.presheaf, g_, components)


def build_plus(
    f_: Presheaf, topology: Topology, max_families: int = DEFAULT_MAX_FAMILIES
) -> PlusConstruction:
    """The plus-construction with full provenance.

    Elements at X are equivalence classes of (cover, matching family)
    pairs, identified when the families agree on a common refinement
    cover; classes are computed by union-find over all pairs rather than
    by trusting transitivity of refinement.
    """
    cat = f_.cat
    pairs: dict[int, list[tuple[Sieve, MatchingFamily]]] = {}
    for x in range(len(cat.objects)):
        enumerated = []
        for cover in topology.covers_of(x):
            for family in matching_families(f_, cover, max_families):
                enumerated.append((cover, family))
        if len(enumerated) > max_families:
            raise SizeLimitError(
                f"more than {max_families} (cover, family) pairs at {cat.objects[x]!r}"
            )
        pairs[x] = enumerated

    def related(p, q) -> bool:
        (r, xfam), (s, yfam) = p, q
        xd, yd = xfam.as_dict(), yfam.as_dict()
        common = r.members & s.members
        agree = frozenset(h for h in common if xd[h] == yd[h])
        return any(
            t.members <= agree for t in topology.covers_of(r.target)
        )

    parent: dict[tuple[int, int], tuple[int, int]] = {}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for x, enumerated in pairs.items():
        for i in range(len(enumerated)):
            parent[(x, i)] = (x, i)
        for i, j in combinations(range(len(enumerated)), 2):
            if related(enumerated[i], enumerated[j]):
                union((x, i), (x, j))

    class_of_pair: dict[int, list[str]] = {}
    rep_of_class: dict[int, dict[str, int]] = {}
    sets: dict[int, tuple[str, ...]] = {}
    for x, enumerated in pairs.items():
        reps = sorted({find((x, i))[1] for i in range(len(enumerated))})
        names = {rep: f"p{rep}" for rep in reps}
        class_of_pair[x] = [names[find((x, i))[1]] for i in range(len(enumerated))]
        rep_of_class[x] = {names[rep]: rep for rep in reps}
        sets[x] = tuple(names[rep] for rep in reps)

    pair_index: dict[int, dict[tuple, int]] = {
        x: {
            (cover.key(), family.assignment): i
            for i, (cover, family) in enumerate(enumerated)
        }
        for x, enumerated in pairs.items()
    }

    def restrict(x: int, i: int, h: int):
        cover, family = pairs[x][i]
        values = family.as_dict()
        y = cat.dom(h)
        pulled = pullback_sieve(cat, cover, h)
        assignment = tuple(
            (g, values[cat.comp[(h, g)]]) for g in pulled.sorted_members()
        )
        j = pair_index[y][(pulled.key(), assignment)]
        return class_of_pair[y][j]

    actions: dict[int, dict[str, str]] = {}
    for h in range(len(cat.morphisms)):
        m = cat.morphisms[h]
        actions[h] = {
            elem: restrict(m.cod, rep, h)
            for elem, rep in rep_of_class[m.cod].items()
        }
    plus = Presheaf(cat, sets, actions)

    unit_components: dict[int, dict[str, str]] = {}
    for x in range(len(cat.objects)):
        top = maximal_sieve(cat, x)
        comp = {}
        for d in f_.sets[x]:
            assignment = tuple(
                (f, f_.act(f, d)) for f in top.sorted_members()
            )
            i = pair_index[x][(top.key(), assignment)]
            comp[d] = class_of_pair[x][i]
        unit_components[x] = comp
    unit = PresheafMap(f_, plus, unit_components)
    return PlusConstruction(f_, topology, plus, unit, pairs, class_of_pair, rep_of_class)


def plus_construction(
    f_: Presheaf, topology: Topology, max_families: int = DEFAULT_MAX_FAMILIES
) -> tuple[Presheaf, PresheafMap]:
    plus = build_plus(f_, topology, max_families)
    return plus.presheaf, plus.unit


@dataclass
class Sheafification:
    """Both plus-construction layers of the associated sheaf."""

    presheaf: Presheaf
    plus1: PlusConstruction
    plus2: PlusConstruction
    sheaf: Presheaf
    unit: PresheafMap

    def extend(self, v: PresheafMap) -> PresheafMap:
        """The unique sheaf map out of the sheafification extending ``v``."""
        return self.plus2.extend(self.plus1.extend(v))


def sheafification(
    f_: Presheaf, topology: Topology, max_families: int = DEFAULT_MAX_FAMILIES
) -> Sheafification:
    plus1 = build_plus(f_, topology, max_families)
    plus2 = build_plus(plus1.presheaf, topology, max_families)
    unit = plus1.unit.then(plus2.unit)
    return Sheafification(f_, plus1, plus2, plus2.presheaf, unit)


def sheafify(
    f_: Presheaf, topology: Topology, max_families: int = DEFAULT_MAX_FAMILIES
) -> tuple[Presheaf, PresheafMap]:
    bundle = sheafification(f_, topology, max_families)
    return bundle.sheaf, bundle.unit


def is_subcanonical(
    cat: FinCategory, topology: Topology, max_families: int = DEFAULT_MAX_FAMILIES
):
    """Whether every representable is a sheaf; returns (bool, witness)."""
    for x in range(len(cat.objects)):
        report = sheaf_check(representable(cat, x), topology, max_families)
        if report.status is not SheafStatus.SHEAF:
            bad = (report.missing + [w[:3] for w in report.ambiguous])[0]
            return False, (cat.objects[x], bad[1], bad[2])
    return True, None


def quotient_presheaf(f_: Presheaf, relations) -> tuple[Presheaf, PresheafMap]:
    """Quotient by the smallest presheaf congruence containing the relations.

    ``relations`` is an iterable of (object id, element, element) triples;
    identifications are propagated along every action to a fixpoint by
    union-find.  Class ids are the least member in the declaration order.
    """
    cat = f_.cat
    parent: dict[tuple[int, str], tuple[int, str]] = {
        (x, e): (x, e) for x in range(len(cat.objects)) for e in f_.sets[x]
    }
    order = {
        (x, e): i
        for x in range(len(cat.objects))
        for i, e in enumerate(f_.sets[x])
    }

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    def union(a, b) -> bool:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        if order[rb] < order[ra]:
            ra, rb = rb, ra
        parent[rb] = ra
        return True

    work = []
    for x, a, b in relations:
        if a not in f_.sets[x] or b not in f_.sets[x]:
            raise NotMatchingError(f"relation references unknown element at {cat.objects[x]!r}")
        if union((x, a), (x, b)):
            work.append((x, a, b))
    while work:
        x, a, b = work.pop()
        for f in range(len(cat.morphisms)):
            if cat.cod(f) != x:
                continue
            y = cat.dom(f)
            fa, fb = f_.act(f, a), f_.act(f, b)
            if union((y, fa), (y, fb)):
                work.append((y, fa, fb))

    rep_name: dict[tuple[int, str], str] = {}
    sets: dict[int, tuple[str, ...]] = {}
    for x in range(len(cat.objects)):
        classes = []
        for e in f_.sets[x]:
            r = find((x, e))
            if r == (x, e):
                classes.append(e)
            rep_name[(x, e)] = find((x, e))[1]
        sets[x] = tuple(classes)
    actions = {}
    for f in range(len(cat.morphisms)):
        m = cat.morphisms[f]
        actions[f] = {
            e: rep_name[(m.dom, f_.act(f, e))] for e in sets[m.cod]
        }
    quotient = Presheaf(cat, sets, actions)
    projection = PresheafMap(
        f_,
        quotient,
        {
            x: {e: rep_name[(x, e)] for e in f_.sets[x]}
            for x in range(len(cat.objects))
        },
    )
    return quotient, projection


@dataclass
class AycCategory:
    """The category of sheafified representables, with its dictionaries.

    ``category`` has one object per site object; hom-sets enumerate the
    natural transformations between the corresponding sheafified
    representables, and ``maps`` recovers each morphism as a presheaf map.
    """

    category: FinCategory
    sheaves: dict[int, Presheaf]
    maps: dict[int, PresheafMap]
    sheafifications: dict[int, Sheafification]
    morphism_of_map: dict[int, dict[tuple, int]]

    def morphism_for(self, x: int, y: int, m: PresheafMap) -> int:
        key = tuple(
            (o, tuple(sorted(c.items()))) for o, c in sorted(m.components.items())
        )
        return self.morphism_of_map[x * len(self.category.objects) + y][key]


def ayc_category(
    cat: FinCategory, topology: Topology, max_families: int = DEFAULT_MAX_FAMILIES
) -> AycCategory:
    """Build the full subcategory spanned by sheafified representables."""
    bundles = {
        x: sheafification(representable(cat, x), topology, max_families)
        for x in range(len(cat.objects))
    }
    sheaves = {x: bundles[x].sheaf for x in bundles}
    n = len(cat.objects)
    homs: dict[tuple[int, int], list[PresheafMap]] = {}
    for x in range(n):
        for y in range(n):
            homs[(x, y)] = nat_transformations(sheaves[x], sheaves[y])

    def map_key(m: PresheafMap):
        return tuple(
            (o, tuple(sorted(c.items()))) for o, c in sorted(m.components.items())
        )

    names: list[tuple[str, str, str]] = []
    maps: dict[int, PresheafMap] = {}
    index_by_key: dict[tuple[int, int], dict[tuple, int]] = {}
    counter = 0
    for x in range(n):
        for y in range(n):
            index_by_key[(x, y)] = {}
            for k, m in enumerate(homs[(x, y)]):
                name = f"{cat.objects[x]}>{cat.objects[y]}#{k}"
                names.append((name, cat.objects[x], cat.objects[y]))
                maps[counter] = m
                index_by_key[(x, y)][map_key(m)] = counter
                counter += 1

    identities = {}
    for x in range(n):
        ident = identity_map(sheaves[x])
        identities[cat.objects[x]] = names[index_by_key[(x, x)][map_key(ident)]][0]

    composition = []
    for (x, y), fs in homs.items():
        for z in range(n):
            for gk, g in enumerate(homs[(y, z)]):
                for fk, f in enumerate(fs):
                    gf = f.then(g)
                    gi = index_by_key[(y, z)][map_key(g)]
                    fi = index_by_key[(x, y)][map_key(f)]
                    gfi = index_by_key[(x, z)][map_key(gf)]
                    composition.append((names[gi][0], names[fi][0], names[gfi][0]))
    category = validate_category(list(cat.objects), names, identities, composition)
    morphism_of_map = {
        x * n + y: index_by_key[(x, y)] for x in range(n) for y in range(n)
    }
    return AycCategory(category, sheaves, maps, bundles, morphism_of_map)
