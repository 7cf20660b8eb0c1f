"""Capability semantics: single steps, transition systems, fast/slow views.

States of a well-defined model differ only in species levels, so a state
is a level vector over the declared species order.  A transition carries a
capability label: the action name plus one entry per participating
species recording its role, its level at the source state and its
stoichiometry.  Reactants drop by their stoichiometry, products rise,
modifiers stay put; a reaction shared under cooperation needs all sides
to contribute and their entries are merged.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .model import (
    CompositionTree,
    EquivConfig,
    InvalidModelError,
    Leaf,
    Role,
    SystemDef,
    max_level,
    validate_system,
)

DEFAULT_STATE_CAP = 1_000_000

State = tuple[int, ...]


class StateSpaceLimitError(Exception):
    """Raised instead of silently truncating an exploding state space."""

    def __init__(self, limit: int):
        super().__init__(f"state-space-limit-exceeded({limit})")
        self.limit = limit


class UnpartitionedActionError(Exception):
    def __init__(self, action: str):
        super().__init__(f"unpartitioned-action({action})")
        self.action = action


@dataclass(frozen=True)
class LabelEntry:
    """Participation record of one species in one reaction instance."""

    species: str
    role: Role
    level: int
    stoich: int

    def __str__(self) -> str:
        return f"{self.species}:{self.role.value}({self.level},{self.stoich})"

    def sort_key(self) -> tuple:
        return (self.species, self.role.value, self.level, self.stoich)


@dataclass(frozen=True)
class CapabilityLabel:
    """Action name plus the set of participating-species entries."""

    action: str
    entries: frozenset[LabelEntry]

    def sorted_entries(self) -> tuple[LabelEntry, ...]:
        return tuple(sorted(self.entries, key=LabelEntry.sort_key))

    def sort_key(self) -> tuple:
        return (self.action, tuple(e.sort_key() for e in self.sorted_entries()))

    def __str__(self) -> str:
        inner = ", ".join(str(e) for e in self.sorted_entries())
        return f"({self.action}, {{{inner}}})"


class Transition(NamedTuple):
    src: int
    label: CapabilityLabel
    dst: int


@dataclass(frozen=True)
class Lts:
    """Explicit transition system over the derivative set of the initial state."""

    species_order: tuple[str, ...]
    states: tuple[State, ...]
    initial: int
    transitions: tuple[Transition, ...]

    def __post_init__(self) -> None:
        index = {s: i for i, s in enumerate(self.states)}
        if len(index) != len(self.states):
            raise ValueError("duplicate states in transition system")
        out: list[list[Transition]] = [[] for _ in self.states]
        for t in self.transitions:
            out[t.src].append(t)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_out", tuple(tuple(o) for o in out))

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_transitions(self) -> int:
        return len(self.transitions)

    def index_of(self, state: Iterable[int]) -> int:
        key = tuple(state)
        idx = self._index.get(key)  # type: ignore[attr-defined]
        if idx is None:
            raise KeyError(f"state {key} is not reachable in this system")
        return idx

    def outgoing(self, src: int) -> tuple[Transition, ...]:
        return self._out[src]  # type: ignore[attr-defined]

    def actions(self) -> frozenset[str]:
        return frozenset(t.label.action for t in self.transitions)


class _Move(NamedTuple):
    entries: frozenset[LabelEntry]
    updates: tuple[tuple[int, int], ...]  # (species index, new level)


class _Compiled:
    """Per-system stepping context: indices, level bounds, node action sets."""

    def __init__(self, sys: SystemDef):
        problems = validate_system(sys)
        if problems:
            raise InvalidModelError(problems)
        self.sys = sys
        self.order = sys.species_order
        self.index = {name: i for i, name in enumerate(self.order)}
        self.defs = sys.species_map()
        self.limit = {
            name: max_level(sdef, sys.step_size) for name, sdef in self.defs.items()
        }
        self._node_actions: dict[CompositionTree, frozenset[str]] = {}

    def actions_of(self, tree: CompositionTree) -> frozenset[str]:
        cached = self._node_actions.get(tree)
        if cached is None:
            if isinstance(tree, Leaf):
                cached = self.defs[tree.species].actions()
            else:
                cached = self.actions_of(tree.left) | self.actions_of(tree.right)
            self._node_actions[tree] = cached
        return cached

    def initial_state(self) -> State:
        levels = self.sys.initial_levels()
        return tuple(levels[name] for name in self.order)

    def _leaf_moves(self, leaf: Leaf, state: State) -> dict[str, list[_Move]]:
        idx = self.index[leaf.species]
        level = state[idx]
        limit = self.limit[leaf.species]
        moves: dict[str, list[_Move]] = {}
        for p in self.defs[leaf.species].prefixes:
            if p.role is Role.REACTANT or p.role is Role.ACTIVATOR:
                enabled = p.stoich <= level <= limit
            elif p.role is Role.PRODUCT:
                enabled = 0 <= level <= limit - p.stoich
            else:  # inhibitor or generic modifier
                enabled = 0 <= level <= limit
            if not enabled:
                continue
            entry = LabelEntry(leaf.species, p.role, level, p.stoich)
            delta = p.role.level_delta(p.stoich)
            updates = ((idx, level + delta),) if delta else ()
            moves.setdefault(p.action, []).append(_Move(frozenset((entry,)), updates))
        return moves

    def _moves(self, tree: CompositionTree, state: State) -> dict[str, list[_Move]]:
        if isinstance(tree, Leaf):
            return self._leaf_moves(tree, state)
        left = self._moves(tree.left, state)
        right = self._moves(tree.right, state)
        coop = tree.coop
        if coop is None:
            coop = self.actions_of(tree.left) & self.actions_of(tree.right)
        out: dict[str, list[_Move]] = {}
        for action, moves in left.items():
            if action not in coop:
                out.setdefault(action, []).extend(moves)
        for action, moves in right.items():
            if action not in coop:
                out.setdefault(action, []).extend(moves)
        for action in coop:
            if action in left and action in right:
                combined = [
                    _Move(m1.entries | m2.entries, m1.updates + m2.updates)
                    for m1 in left[action]
                    for m2 in right[action]
                ]
                out.setdefault(action, []).extend(combined)
        return out

    def step(self, state: State) -> list[tuple[CapabilityLabel, State]]:
        result = []
        for action, moves in self._moves(self.sys.tree, state).items():
            for move in moves:
                levels = list(state)
                for idx, new in move.updates:
                    levels[idx] = new
                result.append((CapabilityLabel(action, move.entries), tuple(levels)))
        result.sort(key=lambda pair: (pair[1], pair[0].sort_key()))
        return result


def initial_state(sys: SystemDef) -> State:
    return _Compiled(sys).initial_state()


def step(sys: SystemDef, state: State) -> list[tuple[CapabilityLabel, State]]:
    """All capability transitions from one state, deterministically ordered."""
    return _Compiled(sys).step(state)


def build_lts(sys: SystemDef, max_states: int = DEFAULT_STATE_CAP) -> Lts:
    """Breadth-first closure of the step relation from the initial state.

    State indexing is deterministic: discovery order, with each state's
    successors visited in lexicographic order.  Exceeding ``max_states``
    raises instead of truncating.
    """
    compiled = _Compiled(sys)
    init = compiled.initial_state()
    states: list[State] = [init]
    index: dict[State, int] = {init: 0}
    transitions: list[Transition] = []
    queue: deque[int] = deque((0,))
    while queue:
        src = queue.popleft()
        for label, target in compiled.step(states[src]):
            dst = index.get(target)
            if dst is None:
                if len(states) >= max_states:
                    raise StateSpaceLimitError(max_states)
                dst = len(states)
                states.append(target)
                index[target] = dst
                queue.append(dst)
            transitions.append(Transition(src, label, dst))
    transitions.sort(key=lambda t: (t.src, t.label.sort_key(), t.dst))
    return Lts(
        species_order=compiled.order,
        states=tuple(states),
        initial=0,
        transitions=tuple(transitions),
    )


def filter_label(label: CapabilityLabel, cfg: EquivConfig) -> CapabilityLabel:
    """Restrict a label to the comparison species.

    Entries are renamed through the alias map first; only entries whose
    canonical species is in delta survive.  The action name is untouched.
    """
    kept = []
    for e in label.entries:
        name = cfg.canon(e.species)
        if name in cfg.delta:
            kept.append(e if name == e.species else LabelEntry(name, e.role, e.level, e.stoich))
    return CapabilityLabel(label.action, frozenset(kept))


class WeakViews:
    """Fast and slow projections of an Lts under an action partition.

    The fast step relation drops labels entirely (one edge per state
    pair, underlying action names kept for diagnostics only).  The slow
    strong view keeps the action and the filtered label.  The weak slow
    view chains fast closure around one slow step; closures and weak
    target sets are memoised per state.
    """

    def __init__(self, lts: Lts, cfg: EquivConfig):
        for action in sorted(lts.actions()):
            if action not in cfg.fast and action not in cfg.slow:
                raise UnpartitionedActionError(action)
        self.lts = lts
        self.cfg = cfg
        fast_succ: list[set[int]] = [set() for _ in lts.states]
        fast_actions: dict[tuple[int, int], set[str]] = {}
        slow: list[list[tuple[str, CapabilityLabel, int]]] = [[] for _ in lts.states]
        for t in lts.transitions:
            if t.label.action in cfg.fast:
                fast_succ[t.src].add(t.dst)
                fast_actions.setdefault((t.src, t.dst), set()).add(t.label.action)
            else:
                move = (t.label.action, filter_label(t.label, cfg), t.dst)
                if move not in slow[t.src]:
                    slow[t.src].append(move)
        self._fast_succ = tuple(tuple(sorted(s)) for s in fast_succ)
        self._fast_actions = {k: tuple(sorted(v)) for k, v in fast_actions.items()}
        self._slow = tuple(tuple(moves) for moves in slow)
        self._closure: dict[int, frozenset[int]] = {}
        self._weak: dict[int, dict[tuple[str, CapabilityLabel], frozenset[int]]] = {}

    def fast_steps(self, state: int) -> tuple[int, ...]:
        return self._fast_succ[state]

    def fast_step_actions(self, src: int, dst: int) -> tuple[str, ...]:
        return self._fast_actions.get((src, dst), ())

    def fast_closure(self, state: int) -> frozenset[int]:
        cached = self._closure.get(state)
        if cached is None:
            seen = {state}
            queue = deque((state,))
            while queue:
                s = queue.popleft()
                for nxt in self._fast_succ[s]:
                    if nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
            cached = frozenset(seen)
            self._closure[state] = cached
        return cached

    def slow_strong(self, state: int) -> tuple[tuple[str, CapabilityLabel, int], ...]:
        return self._slow[state]

    def weak_slow_moves(
        self, state: int
    ) -> dict[tuple[str, CapabilityLabel], frozenset[int]]:
        cached = self._weak.get(state)
        if cached is None:
            targets: dict[tuple[str, CapabilityLabel], set[int]] = {}
            for mid in self.fast_closure(state):
                for action, label, dst in self._slow[mid]:
                    targets.setdefault((action, label), set()).update(
                        self.fast_closure(dst)
                    )
            cached = {k: frozenset(v) for k, v in targets.items()}
            self._weak[state] = cached
        return cached

    def weak_slow_targets(
        self, state: int, action: str, label: CapabilityLabel
    ) -> frozenset[int]:
        return self.weak_slow_moves(state).get((action, label), frozenset())


def weak_views(lts: Lts, cfg: EquivConfig) -> WeakViews:
    return WeakViews(lts, cfg)


def _state_label(state: State) -> str:
    return "({})".format(",".join(str(x) for x in state))


def lts_to_dict(lts: Lts) -> dict:
    """JSON document with stable key order, suitable for golden files."""
    return {
        "species": list(lts.species_order),
        "states": [list(s) for s in lts.states],
        "initial": lts.initial,
        "transitions": [
            {
                "src": t.src,
                "action": t.label.action,
                "entries": [
                    {
                        "species": e.species,
                        "role": e.role.value,
                        "level": e.level,
                        "stoich": e.stoich,
                    }
                    for e in t.label.sorted_entries()
                ],
                "dst": t.dst,
            }
            for t in lts.transitions
        ],
    }


def lts_to_dot(lts: Lts, cfg: EquivConfig | None = None) -> str:
    """Graphviz rendering: level-vector nodes, action-labelled edges.

    With a configuration, edges also show the filtered label entries.
    """
    lines = ["digraph lts {", "  rankdir=LR;", "  node [shape=box];"]
    for i, state in enumerate(lts.states):
        shape = ' peripheries=2' if i == lts.initial else ""
        lines.append(f'  {i} [label="{_state_label(state)}"{shape}];')
    for t in lts.transitions:
        if cfg is None:
            label = t.label.action
        else:
            entries = filter_label(t.label, cfg).sorted_entries()
            inner = " ".join(str(e) for e in entries)
            label = f"{t.label.action}; {{{inner}}}"
        lines.append(f'  {t.src} -> {t.dst} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
