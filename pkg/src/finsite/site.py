"""Sieves and Grothendieck topologies on a finite category.

Sieves are canonical frozensets of morphism ids so equality is structural;
topologies store their covering sieves per object in a sorted, deduplicated
order.  Topology input is normally a basis that gets saturated here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    CodomainMismatchError,
    InvalidSieveError,
    SizeLimitError,
    UnknownObjectError,
)
from .fincat import FinCategory

DEFAULT_MAX_CONE = 20


@dataclass(frozen=True)
class Sieve:
    """A set of morphisms with common codomain, closed under precomposition."""

    target: int
    members: frozenset[int]

    def key(self) -> tuple:
        return (self.target, tuple(sorted(self.members)))

    def sorted_members(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))

    def display(self, cat: FinCategory) -> list[str]:
        return [cat.name(f) for f in self.sorted_members()]


def maximal_sieve(cat: FinCategory, x: int) -> Sieve:
    return Sieve(x, frozenset(cat.cone(x)))


def empty_sieve(x: int) -> Sieve:
    return Sieve(x, frozenset())


def is_sieve(cat: FinCategory, s: Sieve) -> bool:
    for f in s.members:
        if cat.cod(f) != s.target:
            return False
        for g in cat.cone(cat.dom(f)):
            if cat.comp[(f, g)] not in s.members:
                return False
    return True


def generated_sieve(cat: FinCategory, target: int, generators) -> Sieve:
    """Smallest sieve on target containing the generators."""
    members = set()
    stack = []
    for f in generators:
        if cat.cod(f) != target:
            raise CodomainMismatchError(
                f"generator {cat.name(f)!r} does not end at {cat.objects[target]!r}"
            )
        if f not in members:
            members.add(f)
            stack.append(f)
    while stack:
        f = stack.pop()
        for g in cat.cone(cat.dom(f)):
            fg = cat.comp[(f, g)]
            if fg not in members:
                members.add(fg)
                stack.append(fg)
    return Sieve(target, frozenset(members))


def pullback_sieve(cat: FinCategory, s: Sieve, h: int) -> Sieve:
    """h*S: the morphisms g into dom(h) with h∘g in S."""
    if cat.cod(h) != s.target:
        raise CodomainMismatchError(
            f"cannot pull back a sieve on {cat.objects[s.target]!r} along {cat.name(h)!r}"
        )
    y = cat.dom(h)
    return Sieve(y, frozenset(g for g in cat.cone(y) if cat.comp[(h, g)] in s.members))


def all_sieves(cat: FinCategory, x: int, max_cone: int = DEFAULT_MAX_CONE) -> list[Sieve]:
    """Every sieve on x, in canonical order.

    Enumerated as precomposition-closed subsets of the cone by a
    branch-and-prune walk, so the cost tracks the number of sieves rather
    than 2^cone.  Guarded by ``max_cone``.
    """
    cone = cat.cone(x)
    if len(cone) > max_cone:
        raise SizeLimitError(
            f"object {cat.objects[x]!r} has {len(cone)} incoming morphisms; "
            f"the sieve lattice guard is {max_cone}"
        )
    down = {
        f: frozenset({f} | {cat.comp[(f, g)] for g in cat.cone(cat.dom(f))})
        for f in cone
    }
    found: list[frozenset[int]] = []

    def rec(i: int, current: frozenset[int], forbidden: frozenset[int]):
        if i == len(cone):
            found.append(current)
            return
        f = cone[i]
        if f in current or f in forbidden:
            rec(i + 1, current, forbidden)
            return
        rec(i + 1, current, forbidden | frozenset(g for g in cone if f in down[g]))
        if not (down[f] & forbidden):
            rec(i + 1, current | down[f], forbidden)

    rec(0, frozenset(), frozenset())
    sieves = [Sieve(x, m) for m in found]
    sieves.sort(key=Sieve.key)
    return sieves


@dataclass
class Topology:
    """Covering sieves per object; see :func:`validate_topology` for the axioms."""

    covers: dict[int, tuple[Sieve, ...]]

    def __post_init__(self):
        self.covers = {
            x: tuple(sorted(set(sieves), key=Sieve.key))
            for x, sieves in self.covers.items()
        }
        self._sets = {x: frozenset(sieves) for x, sieves in self.covers.items()}

    def covers_of(self, x: int) -> tuple[Sieve, ...]:
        return self.covers.get(x, ())

    def is_cover(self, s: Sieve) -> bool:
        return s in self._sets.get(s.target, frozenset())

    def __eq__(self, other):
        return isinstance(other, Topology) and self.covers == other.covers


@dataclass(frozen=True)
class TopologyViolation:
    axiom: str
    object: str
    sieve: tuple[str, ...]
    morphism: str = ""

    @property
    def message(self) -> str:
        where = f" along {self.morphism!r}" if self.morphism else ""
        return f"{self.axiom} fails at {self.object!r} for sieve {list(self.sieve)}{where}"


@dataclass(frozen=True)
class Site:
    """A finite category together with a (saturated) Grothendieck topology."""

    category: FinCategory
    topology: Topology


def saturate_topology(cat: FinCategory, basis, max_cone: int = DEFAULT_MAX_CONE) -> Topology:
    """Smallest topology containing the basis sieves.

    Worklist fixpoint over the finite sieve lattice: seed with the basis and
    the maximal sieves, then close under pullback stability and transitivity
    until stable.
    """
    covers: dict[int, set[Sieve]] = {x: set() for x in range(len(cat.objects))}
    for x, sieves in basis.items():
        for s in sieves:
            if s.target != x or not is_sieve(cat, s):
                raise InvalidSieveError(
                    f"basis entry at {cat.objects[x]!r} is not a sieve on it"
                )
            covers[x].add(s)
    for x in range(len(cat.objects)):
        covers[x].add(maximal_sieve(cat, x))
    lattice = {x: all_sieves(cat, x, max_cone) for x in range(len(cat.objects))}

    changed = True
    while changed:
        changed = False
        for x in range(len(cat.objects)):
            for s in list(covers[x]):
                for h in cat.cone(x):
                    p = pullback_sieve(cat, s, h)
                    if p not in covers[cat.dom(h)]:
                        covers[cat.dom(h)].add(p)
                        changed = True
        for x in range(len(cat.objects)):
            for s in lattice[x]:
                if s in covers[x]:
                    continue
                for r in list(covers[x]):
                    if all(
                        pullback_sieve(cat, s, h) in covers[cat.dom(h)]
                        for h in r.members
                    ):
                        covers[x].add(s)
                        changed = True
                        break
    return Topology({x: tuple(v) for x, v in covers.items()})


def validate_topology(cat: FinCategory, topology: Topology, max_cone: int = DEFAULT_MAX_CONE) -> list[TopologyViolation]:
    """Empty list iff maximality, stability and transitivity all hold."""
    out: list[TopologyViolation] = []
    for x in range(len(cat.objects)):
        if not topology.is_cover(maximal_sieve(cat, x)):
            out.append(
                TopologyViolation(
                    "maximality", cat.objects[x], tuple(maximal_sieve(cat, x).display(cat))
                )
            )
    for x in range(len(cat.objects)):
        for s in topology.covers_of(x):
            if not is_sieve(cat, s) or s.target != x:
                out.append(
                    TopologyViolation("sieve-closure", cat.objects[x], tuple(s.display(cat)))
                )
                continue
            for h in cat.cone(x):
                if not topology.is_cover(pullback_sieve(cat, s, h)):
                    out.append(
                        TopologyViolation(
                            "stability", cat.objects[x], tuple(s.display(cat)), cat.name(h)
                        )
                    )
    for x in range(len(cat.objects)):
        for s in all_sieves(cat, x, max_cone):
            if topology.is_cover(s):
                continue
            for r in topology.covers_of(x):
                if all(
                    topology.is_cover(pullback_sieve(cat, s, h)) for h in r.members
                ):
                    out.append(
                        TopologyViolation("transitivity", cat.objects[x], tuple(s.display(cat)))
                    )
                    break
    return out


def empty_cover_objects(cat: FinCategory, topology: Topology) -> list[str]:
    """Objects whose empty sieve is covering."""
    return [
        cat.objects[x]
        for x in range(len(cat.objects))
        if topology.is_cover(empty_sieve(x))
    ]


def induced_topology(cat: FinCategory, topology: Topology, sub: FinCategory, max_cone: int = DEFAULT_MAX_CONE) -> Topology:
    """The topology a full subcategory inherits from its ambient site.

    A sieve in the subcategory covers iff the sieve it generates in the
    ambient category covers there.  ``sub`` must be a full subcategory of
    ``cat`` with preserved names.
    """
    for name in sub.objects:
        if name not in cat.objects:
            raise UnknownObjectError(f"object {name!r} is not in the ambient category")
    covers: dict[int, tuple[Sieve, ...]] = {}
    for x in range(len(sub.objects)):
        ambient_x = cat.object_id(sub.objects[x])
        good = []
        for s in all_sieves(sub, x, max_cone):
            ambient_members = [cat.morphism_id(sub.name(f)) for f in s.members]
            if topology.is_cover(generated_sieve(cat, ambient_x, ambient_members)):
                good.append(s)
        covers[x] = tuple(good)
    return Topology(covers)
