"""Core types for Bio-PEPA models with levels.

A model is a finite set of species definitions arranged in a cooperation
tree.  Each species is a choice between reaction capabilities (prefixes);
quantities are discretised into levels 0..N where N = ceil(M/H) for a
maximum count M and a global step size H.  Rate expressions and parameters
are carried as opaque strings: the analyses in this package work on the
capability relation only and never evaluate rates.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator


class ModelError(Exception):
    """A model construction violates well-definedness."""


class InvalidModelError(ModelError):
    """Validation produced a non-empty problem report."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = list(problems)


class OverlappingActionsError(ModelError):
    """Species extension requires disjoint reaction names."""

    def __init__(self, actions: frozenset[str]):
        super().__init__("overlapping-actions({})".format(", ".join(sorted(actions))))
        self.actions = frozenset(actions)


class Role(enum.Enum):
    """Role a species plays in one reaction.

    Only reactants and products change level; activators, inhibitors and
    generic modifiers take part in a reaction without being consumed or
    produced.  The enum values are the concrete operator spellings used
    by the model language.
    """

    REACTANT = "<<"
    PRODUCT = ">>"
    ACTIVATOR = "(+)"
    INHIBITOR = "(-)"
    GENERIC = "(.)"

    @property
    def changes_level(self) -> bool:
        return self in (Role.REACTANT, Role.PRODUCT)

    def level_delta(self, stoich: int) -> int:
        if self is Role.REACTANT:
            return -stoich
        if self is Role.PRODUCT:
            return stoich
        return 0


@dataclass(frozen=True)
class Prefix:
    """One reaction capability: action name, stoichiometry and role."""

    action: str
    stoich: int
    role: Role


@dataclass(frozen=True)
class SpeciesDef:
    """A sequential species component: a choice between prefixes.

    ``max_count`` is the maximum molecular count (or concentration
    ceiling) M used to derive the maximum level.
    """

    name: str
    prefixes: tuple[Prefix, ...]
    max_count: int

    def actions(self) -> frozenset[str]:
        return frozenset(p.action for p in self.prefixes)

    def prefix_for(self, action: str) -> Prefix | None:
        for p in self.prefixes:
            if p.action == action:
                return p
        return None


@dataclass(frozen=True)
class Leaf:
    """A species placed in the model with its initial level."""

    species: str
    level: int


@dataclass(frozen=True)
class Node:
    """Cooperation of two subtrees.

    ``coop`` is the explicit synchronisation set, or ``None`` for the
    shared-all combinator (synchronise on every action that occurs
    syntactically on both sides).
    """

    left: "Leaf | Node"
    coop: frozenset[str] | None
    right: "Leaf | Node"


CompositionTree = Leaf | Node


def tree_leaves(tree: CompositionTree) -> Iterator[Leaf]:
    if isinstance(tree, Leaf):
        yield tree
    else:
        yield from tree_leaves(tree.left)
        yield from tree_leaves(tree.right)


@dataclass(frozen=True)
class SystemDef:
    """A complete model: species definitions, composition tree, context.

    Species are kept in declaration order; that order fixes the state
    vector layout and the stoichiometry matrix rows everywhere else.
    ``params`` and ``rates`` are opaque context strings (never evaluated).
    """

    species: tuple[SpeciesDef, ...]
    tree: CompositionTree
    step_size: int = 1
    params: dict[str, str] = field(default_factory=dict)
    rates: dict[str, str] = field(default_factory=dict)

    @property
    def species_order(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.species)

    def species_map(self) -> dict[str, SpeciesDef]:
        return {s.name: s for s in self.species}

    def species_def(self, name: str) -> SpeciesDef:
        for s in self.species:
            if s.name == name:
                return s
        raise KeyError(name)

    def actions(self) -> frozenset[str]:
        out: set[str] = set()
        for s in self.species:
            out |= s.actions()
        return frozenset(out)

    def max_level_of(self, name: str) -> int:
        return max_level(self.species_def(name), self.step_size)

    def initial_levels(self) -> dict[str, int]:
        return {leaf.species: leaf.level for leaf in tree_leaves(self.tree)}


def max_level(sdef: SpeciesDef, step_size: int) -> int:
    """Maximum level N = ceil(M/H); the species then ranges over 0..N."""
    if step_size < 1:
        raise ValueError("step size must be at least 1")
    return -(-sdef.max_count // step_size)


def validate_species(sdef: SpeciesDef) -> list[str]:
    """Well-definedness report for a single species; empty means valid.

    A species must be a non-empty choice of prefixes with pairwise
    distinct action names and positive stoichiometries.
    """
    problems = []
    if not sdef.prefixes:
        problems.append(f"empty-definition({sdef.name})")
    seen: set[str] = set()
    for p in sdef.prefixes:
        if p.action in seen:
            problems.append(f"duplicate-action({p.action}) in species {sdef.name}")
        seen.add(p.action)
        if p.stoich < 1:
            problems.append(
                f"invalid-stoichiometry({p.action}) in species {sdef.name}: "
                f"{p.stoich} < 1"
            )
    if sdef.max_count < 1:
        problems.append(f"invalid-max-count({sdef.name}): {sdef.max_count} < 1")
    return problems


def _tree_actions(tree: CompositionTree, defs: dict[str, SpeciesDef]) -> frozenset[str]:
    if isinstance(tree, Leaf):
        d = defs.get(tree.species)
        return d.actions() if d is not None else frozenset()
    return _tree_actions(tree.left, defs) | _tree_actions(tree.right, defs)


def validate_system(sys: SystemDef) -> list[str]:
    """Well-definedness report for a whole model; empty means valid.

    Checks every species definition, uniqueness of species both among
    definitions and among tree leaves, that every leaf refers to a
    defined species and every defined species is placed, that initial
    levels fit in 0..N, and that explicit cooperation sets only name
    actions occurring on both sides of their node.
    """
    problems = []
    if sys.step_size < 1:
        problems.append(f"invalid-step-size: {sys.step_size} < 1")
    defs: dict[str, SpeciesDef] = {}
    for s in sys.species:
        if s.name in defs:
            problems.append(f"repeated-species({s.name})")
        defs[s.name] = s
        problems.extend(validate_species(s))

    placed: set[str] = set()
    for leaf in tree_leaves(sys.tree):
        if leaf.species not in defs:
            problems.append(f"unknown-species({leaf.species})")
            continue
        if leaf.species in placed:
            problems.append(f"repeated-species({leaf.species})")
        placed.add(leaf.species)
        if sys.step_size >= 1 and not validate_species(defs[leaf.species]):
            n = max_level(defs[leaf.species], sys.step_size)
            if not 0 <= leaf.level <= n:
                problems.append(
                    f"level-out-of-range({leaf.species}): "
                    f"initial {leaf.level} not in 0..{n}"
                )
    for name in defs:
        if name not in placed:
            problems.append(f"unused-species({name})")

    def walk(tree: CompositionTree) -> None:
        if isinstance(tree, Leaf):
            return
        if tree.coop is not None:
            left_actions = _tree_actions(tree.left, defs)
            right_actions = _tree_actions(tree.right, defs)
            for a in sorted(tree.coop):
                if a not in left_actions or a not in right_actions:
                    problems.append(f"dangling-coop-action({a})")
        walk(tree.left)
        walk(tree.right)

    walk(sys.tree)
    return problems


def extend_species(a: SpeciesDef, b: SpeciesDef) -> SpeciesDef:
    """Extend species ``a`` with the reaction capabilities of ``b``.

    Requires disjoint action names; the result keeps ``a``'s prefixes
    followed by ``b``'s and is named ``a{b}``.  The maximum count is
    taken from ``a``: the extension augments behaviour, not quantity.
    """
    overlap = a.actions() & b.actions()
    if overlap:
        raise OverlappingActionsError(frozenset(overlap))
    return SpeciesDef(
        name=f"{a.name}{{{b.name}}}",
        prefixes=a.prefixes + b.prefixes,
        max_count=a.max_count,
    )


def compose(p: SystemDef, q: SystemDef) -> SystemDef:
    """Shared-all cooperation of two models with disjoint species.

    The composed tree synchronises on every action the two sides share.
    Contexts are merged; conflicting values for the same parameter or
    rate name are rejected.
    """
    problems = []
    if p.step_size != q.step_size:
        problems.append(
            f"step-size-mismatch: {p.step_size} != {q.step_size}"
        )
    params = dict(p.params)
    for k, v in q.params.items():
        if k in params and params[k] != v:
            problems.append(f"conflicting-param({k})")
        params[k] = v
    rates = dict(p.rates)
    for k, v in q.rates.items():
        if k in rates and rates[k] != v:
            problems.append(f"conflicting-rate({k})")
        rates[k] = v
    composed = SystemDef(
        species=p.species + q.species,
        tree=Node(p.tree, None, q.tree),
        step_size=p.step_size,
        params=params,
        rates=rates,
    )
    problems.extend(validate_system(composed))
    if problems:
        raise InvalidModelError(problems)
    return composed


@dataclass(frozen=True)
class EquivConfig:
    """Configuration of an equivalence check.

    ``fast``/``slow`` partition the reaction names.  ``delta`` is the set
    of comparison species kept by label filtering, given in canonical
    (first model) names.  ``aliases`` maps second-model species names onto
    their canonical counterparts.
    """

    fast: frozenset[str]
    slow: frozenset[str]
    delta: frozenset[str] = frozenset()
    aliases: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        both = self.fast & self.slow
        if both:
            raise ValueError(
                "action-in-both-classes({})".format(", ".join(sorted(both)))
            )

    def canon(self, species: str) -> str:
        return self.aliases.get(species, species)

    def swapped(self) -> "EquivConfig":
        """The same configuration seen from the other side.

        Aliases are inverted (they must be injective) and the comparison
        species renamed through the inverted map.
        """
        inv: dict[str, str] = {}
        for src, dst in self.aliases.items():
            if dst in inv:
                raise ValueError(f"alias map not invertible at {dst}")
            inv[dst] = src
        delta = frozenset(inv.get(d, d) for d in self.delta)
        return EquivConfig(self.fast, self.slow, delta, inv)
