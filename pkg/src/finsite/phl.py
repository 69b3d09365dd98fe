"""Finitary partial Horn logic and the sheaf theory of a finite site.

Signatures, terms and Horn sequents are interpreted in partial structures
with finite carriers; satisfaction is decided by exhaustive search over
environments with premise pruning.  The sheaf signature has one unary
symbol per morphism and one amalgamation symbol per covering sieve, and
models of the resulting theory are exactly the sheaves on the site.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    NotACongruenceError,
    NotAModelError,
    NotASheafError,
    SizeLimitError,
    SortMismatchError,
)
from .fincat import FinCategory
from .presheaf import (
    Presheaf,
    SheafStatus,
    matching_families,
    amalgamations,
    sheaf_status,
)
from .site import Sieve, Topology

DEFAULT_MAX_ENVS = 1_000_000


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    argument_sorts: tuple[str, ...]
    result_sort: str


@dataclass(frozen=True)
class Signature:
    sorts: tuple[str, ...]
    functions: tuple[FunctionSymbol, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "_by_name", {f.name: f for f in self.functions}
        )
        for f in self.functions:
            for s in (*f.argument_sorts, f.result_sort):
                if s not in self.sorts:
                    raise SortMismatchError(
                        f"function {f.name!r} references undeclared sort {s!r}"
                    )

    def function(self, name: str) -> FunctionSymbol:
        return self._by_name[name]


@dataclass(frozen=True)
class Var:
    name: str
    sort: str


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple


Term = Var | App


def term_sort(sig: Signature, t: Term) -> str:
    if isinstance(t, Var):
        return t.sort
    f = sig.function(t.symbol)
    if len(t.args) != len(f.argument_sorts):
        raise SortMismatchError(f"{t.symbol!r} applied to {len(t.args)} arguments")
    for arg, want in zip(t.args, f.argument_sorts):
        if term_sort(sig, arg) != want:
            raise SortMismatchError(f"argument of {t.symbol!r} has wrong sort")
    return f.result_sort


@dataclass(frozen=True)
class Equation:
    left: Term
    right: Term


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Conjunction:
    parts: tuple


HornFormula = Equation | Top | Conjunction


def definedness(t: Term) -> Equation:
    """t = t, read as "t is defined"."""
    return Equation(t, t)


def conjuncts(phi: HornFormula) -> list[Equation]:
    if isinstance(phi, Top):
        return []
    if isinstance(phi, Equation):
        return [phi]
    out = []
    for p in phi.parts:
        out.extend(conjuncts(p))
    return out


def formula_vars(phi: HornFormula) -> set[str]:
    out: set[str] = set()

    def walk_term(t: Term):
        if isinstance(t, Var):
            out.add(t.name)
        else:
            for a in t.args:
                walk_term(a)

    for eq in conjuncts(phi):
        walk_term(eq.left)
        walk_term(eq.right)
    return out


@dataclass(frozen=True)
class Sequent:
    context: tuple[Var, ...]
    premise: HornFormula
    conclusion: HornFormula
    label: str = ""

    def __post_init__(self):
        names = {v.name for v in self.context}
        free = formula_vars(self.premise) | formula_vars(self.conclusion)
        if not free <= names:
            raise SortMismatchError(
                f"sequent {self.label!r} uses variables outside its context"
            )


@dataclass
class PartialStructure:
    """Finite carriers plus a partial table per function symbol."""

    signature: Signature
    carriers: dict[str, tuple[str, ...]]
    operations: dict[str, dict[tuple[str, ...], str]]

    def defined(self, symbol: str, args: tuple[str, ...]) -> bool:
        return args in self.operations[symbol]

    def value(self, symbol: str, args: tuple[str, ...]) -> str:
        return self.operations[symbol][args]


def interpret_term(m: PartialStructure, t: Term, env: dict[str, str]):
    """Kleene-strict evaluation; returns the element or None when undefined."""
    if isinstance(t, Var):
        if t.name not in env:
            raise SortMismatchError(f"environment does not cover variable {t.name!r}")
        value = env[t.name]
        if value not in m.carriers[t.sort]:
            raise SortMismatchError(
                f"environment value for {t.name!r} is not of sort {t.sort!r}"
            )
        return value
    args = []
    for a in t.args:
        v = interpret_term(m, a, env)
        if v is None:
            return None
        args.append(v)
    args = tuple(args)
    if not m.defined(t.symbol, args):
        return None
    return m.value(t.symbol, args)


def holds(m: PartialStructure, phi: HornFormula, env: dict[str, str]) -> bool:
    for eq in conjuncts(phi):
        left = interpret_term(m, eq.left, env)
        right = interpret_term(m, eq.right, env)
        if left is None or right is None or left != right:
            return False
    return True


def satisfies(
    m: PartialStructure, seq: Sequent, max_envs: int = DEFAULT_MAX_ENVS
) -> tuple[bool, dict[str, str] | None]:
    """Whether every premise environment also satisfies the conclusion.

    Environments are enumerated by backtracking in context order; premise
    conjuncts are evaluated as soon as their variables are assigned, which
    prunes the search to the premise's satisfying set.  Returns the
    lexicographically least counterexample on failure.
    """
    context = seq.context
    premise = conjuncts(seq.premise)

    def term_var_names(t: Term) -> set[str]:
        if isinstance(t, Var):
            return {t.name}
        out: set[str] = set()
        for a in t.args:
            out |= term_var_names(a)
        return out

    position = {v.name: i for i, v in enumerate(context)}
    # Each conjunct becomes checkable once its last context variable is set.
    trigger: dict[int, list[Equation]] = {i: [] for i in range(-1, len(context))}
    for eq in premise:
        names = term_var_names(eq.left) | term_var_names(eq.right)
        level = max((position[n] for n in names), default=-1)
        trigger[level].append(eq)

    env: dict[str, str] = {}
    visited = 0

    def rec(i: int):
        nonlocal visited
        if i == len(context):
            if not holds(m, seq.conclusion, env):
                return dict(env)
            return None
        var = context[i]
        for value in m.carriers[var.sort]:
            visited += 1
            if visited > max_envs:
                raise SizeLimitError(
                    f"satisfaction search for {seq.label!r} exceeded {max_envs} nodes"
                )
            env[var.name] = value
            if all(holds(m, eq, env) for eq in trigger[i]):
                result = rec(i + 1)
                if result is not None:
                    del env[var.name]
                    return result
            del env[var.name]
        return None

    if not all(holds(m, eq, {}) for eq in trigger[-1]):
        return True, None
    counterexample = rec(0)
    return (counterexample is None), counterexample


def _congruence_find(parent, k):
    while parent[k] != k:
        parent[k] = parent[parent[k]]
        k = parent[k]
    return k


def quotient_structure(m: PartialStructure, partition) -> PartialStructure:
    """Quotient by a partial congruence given as per-sort partition blocks.

    Elements not mentioned in any block are singletons.  Raises
    :class:`NotACongruenceError` with a witness tuple if the equivalence
    fails to respect an operation's domain or values.
    """
    cls: dict[str, dict[str, str]] = {}
    for sort, carrier in m.carriers.items():
        rep = {e: e for e in carrier}
        for block in partition.get(sort, ()):
            block = list(block)
            for e in block:
                if e not in rep:
                    raise NotACongruenceError(
                        f"partition mentions unknown element {e!r} of sort {sort!r}"
                    )
            least = min(block, key=carrier.index)
            for e in block:
                rep[e] = least
        cls[sort] = rep

    def classes_equal(sort, a, b):
        return cls[sort][a] == cls[sort][b]

    for f in m.signature.functions:
        table = m.operations[f.name]
        seen: dict[tuple[str, ...], tuple[str, ...]] = {}
        carriers = [m.carriers[s] for s in f.argument_sorts]

        def tuples(i, acc):
            if i == len(carriers):
                yield tuple(acc)
                return
            for e in carriers[i]:
                acc.append(e)
                yield from tuples(i + 1, acc)
                acc.pop()

        for args in tuples(0, []):
            key = tuple(cls[s][a] for s, a in zip(f.argument_sorts, args))
            if key in seen:
                other = seen[key]
                if (args in table) != (other in table):
                    raise NotACongruenceError(
                        f"congruence does not respect the domain of {f.name!r}",
                        witness=(args, other),
                    )
                if args in table and not classes_equal(
                    f.result_sort, table[args], table[other]
                ):
                    raise NotACongruenceError(
                        f"congruence does not respect the values of {f.name!r}",
                        witness=(args, other),
                    )
            else:
                seen[key] = args

    carriers = {
        sort: tuple(e for e in carrier if cls[sort][e] == e)
        for sort, carrier in m.carriers.items()
    }
    operations: dict[str, dict[tuple[str, ...], str]] = {}
    for f in m.signature.functions:
        table = {}
        for args, value in m.operations[f.name].items():
            key = tuple(cls[s][a] for s, a in zip(f.argument_sorts, args))
            table[key] = cls[f.result_sort][value]
        operations[f.name] = table
    return PartialStructure(m.signature, carriers, operations)


# -- the theory of sheaves on a site ----------------------------------------


def alpha_symbol(cat: FinCategory, f: int) -> str:
    return f"alpha:{cat.name(f)}"


def sigma_symbol(cat: FinCategory, cover: Sieve) -> str:
    members = ",".join(cat.name(f) for f in cover.sorted_members())
    return f"sigma:{cat.objects[cover.target]}:[{members}]"


def sheaf_signature(cat: FinCategory, topology: Topology) -> Signature:
    """Sorts are the objects; one restriction symbol per morphism and one
    amalgamation symbol per covering sieve, with argument positions indexed
    by the cover's morphisms in canonical order."""
    functions = []
    for f in range(len(cat.morphisms)):
        m = cat.morphisms[f]
        functions.append(
            FunctionSymbol(
                alpha_symbol(cat, f),
                (cat.objects[m.cod],),
                cat.objects[m.dom],
            )
        )
    for x in range(len(cat.objects)):
        for cover in topology.covers_of(x):
            functions.append(
                FunctionSymbol(
                    sigma_symbol(cat, cover),
                    tuple(
                        cat.objects[cat.dom(f)] for f in cover.sorted_members()
                    ),
                    cat.objects[x],
                )
            )
    return Signature(tuple(cat.objects), tuple(functions))


def _matching_premise(cat: FinCategory, cover: Sieve, var_of: dict[int, Var]) -> HornFormula:
    eqs = []
    for f in cover.sorted_members():
        for g in cat.cone(cat.dom(f)):
            eqs.append(
                Equation(
                    App(alpha_symbol(cat, g), (var_of[f],)),
                    var_of[cat.comp[(f, g)]],
                )
            )
    return Conjunction(tuple(eqs)) if eqs else Top()


def sheaf_theory(cat: FinCategory, topology: Topology) -> list[Sequent]:
    """The axioms whose models over the sheaf signature are the sheaves.

    Five groups: totality of every restriction, identity actions,
    composite actions, amalgamation existence per cover, and amalgamation
    uniqueness per cover.
    """
    axioms: list[Sequent] = []
    for f in range(len(cat.morphisms)):
        m = cat.morphisms[f]
        x = Var("x", cat.objects[m.cod])
        axioms.append(
            Sequent(
                (x,),
                Top(),
                definedness(App(alpha_symbol(cat, f), (x,))),
                label=f"total:{cat.name(f)}",
            )
        )
    for o in range(len(cat.objects)):
        x = Var("x", cat.objects[o])
        axioms.append(
            Sequent(
                (x,),
                Top(),
                Equation(App(alpha_symbol(cat, cat.identity[o]), (x,)), x),
                label=f"identity:{cat.objects[o]}",
            )
        )
    for (g, f), gf in sorted(cat.comp.items()):
        x = Var("x", cat.objects[cat.cod(g)])
        axioms.append(
            Sequent(
                (x,),
                Top(),
                Equation(
                    App(alpha_symbol(cat, gf), (x,)),
                    App(alpha_symbol(cat, f), (App(alpha_symbol(cat, g), (x,)),)),
                ),
                label=f"composite:{cat.name(g)}*{cat.name(f)}",
            )
        )
    for o in range(len(cat.objects)):
        for cover in topology.covers_of(o):
            members = cover.sorted_members()
            var_of = {
                f: Var(f"x_{cat.name(f)}", cat.objects[cat.dom(f)]) for f in members
            }
            context = tuple(var_of[f] for f in members)
            premise = _matching_premise(cat, cover, var_of)
            sigma = App(sigma_symbol(cat, cover), tuple(var_of[f] for f in members))
            conclusion = Conjunction(
                (
                    definedness(sigma),
                    *(
                        Equation(App(alpha_symbol(cat, f), (sigma,)), var_of[f])
                        for f in members
                    ),
                )
            )
            axioms.append(
                Sequent(
                    context,
                    premise,
                    conclusion,
                    label=f"amalgamation:{sigma_symbol(cat, cover)}",
                )
            )
            y = Var("y", cat.objects[o])
            premise2 = Conjunction(
                (
                    premise,
                    *(
                        Equation(App(alpha_symbol(cat, f), (y,)), var_of[f])
                        for f in members
                    ),
                )
            )
            axioms.append(
                Sequent(
                    context + (y,),
                    premise2,
                    Equation(sigma, y),
                    label=f"uniqueness:{sigma_symbol(cat, cover)}",
                )
            )
    return axioms


def structure_from_presheaf(
    f_: Presheaf, topology: Topology, max_families: int = 1_000_000
) -> PartialStructure:
    """Read a presheaf as a partial structure over the sheaf signature.

    Restrictions are total; each amalgamation symbol is defined exactly on
    the matching tuples admitting a unique amalgamation, with that value.
    Works for arbitrary presheaves, so axiom failures of non-sheaves are
    observable through :func:`satisfies`.
    """
    cat = f_.cat
    operations: dict[str, dict[tuple[str, ...], str]] = {}
    for f in range(len(cat.morphisms)):
        operations[alpha_symbol(cat, f)] = {
            (e,): v for e, v in f_.actions[f].items()
        }
    for x in range(len(cat.objects)):
        for cover in topology.covers_of(x):
            members = cover.sorted_members()
            table: dict[tuple[str, ...], str] = {}
            for family in matching_families(f_, cover, max_families):
                ams = amalgamations(f_, family)
                if len(ams) == 1:
                    values = family.as_dict()
                    table[tuple(values[f] for f in members)] = ams[0]
            operations[sigma_symbol(cat, cover)] = table
    carriers = {cat.objects[x]: f_.sets[x] for x in range(len(cat.objects))}
    return PartialStructure(sheaf_signature(cat, topology), carriers, operations)


def sheaf_to_model(f_: Presheaf, topology: Topology) -> PartialStructure:
    """The partial structure of a sheaf; raises if it is not one."""
    status = sheaf_status(f_, topology)
    if status is not SheafStatus.SHEAF:
        raise NotASheafError(f"presheaf is {status.value}, not a sheaf")
    return structure_from_presheaf(f_, topology)


def model_to_sheaf(m: PartialStructure, cat: FinCategory, topology: Topology) -> Presheaf:
    """Rebuild the sheaf from a model of the sheaf theory.

    Checks that restrictions are total and functorial, and that every
    amalgamation symbol is defined exactly on matching tuples with the
    amalgamation as value; raises :class:`NotAModelError` with a witness
    otherwise.
    """
    sets = {x: tuple(m.carriers[cat.objects[x]]) for x in range(len(cat.objects))}
    actions: dict[int, dict[str, str]] = {}
    for f in range(len(cat.morphisms)):
        table = m.operations[alpha_symbol(cat, f)]
        mor = cat.morphisms[f]
        if set(table) != {(e,) for e in sets[mor.cod]}:
            raise NotAModelError(
                f"restriction along {cat.name(f)!r} is not total", witness=cat.name(f)
            )
        actions[f] = {e: table[(e,)] for e in sets[mor.cod]}
    candidate = Presheaf(cat, sets, actions)
    for x in range(len(cat.objects)):
        ident = cat.identity[x]
        for e in sets[x]:
            if actions[ident][e] != e:
                raise NotAModelError("identity axiom fails", witness=(cat.objects[x], e))
    for (g, f), gf in cat.comp.items():
        for e in sets[cat.cod(g)]:
            if actions[f][actions[g][e]] != actions[gf][e]:
                raise NotAModelError(
                    "composite axiom fails", witness=(cat.name(g), cat.name(f), e)
                )
    for x in range(len(cat.objects)):
        for cover in topology.covers_of(x):
            members = cover.sorted_members()
            expected: dict[tuple[str, ...], str] = {}
            for family in matching_families(candidate, cover):
                ams = amalgamations(candidate, family)
                if len(ams) != 1:
                    raise NotAModelError(
                        "a matching family lacks a unique amalgamation",
                        witness=(cat.objects[x], family),
                    )
                values = family.as_dict()
                expected[tuple(values[f] for f in members)] = ams[0]
            actual = m.operations[sigma_symbol(cat, cover)]
            if set(actual) != set(expected):
                extra = sorted(set(actual) ^ set(expected))
                raise NotAModelError(
                    "amalgamation symbol defined on the wrong tuples",
                    witness=(sigma_symbol(cat, cover), extra[0]),
                )
            for key, value in expected.items():
                if actual[key] != value:
                    raise NotAModelError(
                        "amalgamation symbol has a wrong value",
                        witness=(sigma_symbol(cat, cover), key),
                    )
    return candidate
