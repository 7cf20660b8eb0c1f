"""Fast-slow and slow bisimulation checking between two transition systems.

Both checks play the same matching game over pairs of states.  A strong
slow step of either state must be answered by a weak slow step of the
other with the same action name and the same filtered label (after alias
renaming), landing back in the relation.  The fast-slow game additionally
requires every fast step to be answered by a (possibly empty) fast
sequence.  Verifying a user-supplied relation checks each stored pair in
both directions; the largest bisimulation is the greatest fixpoint of
deleting violating pairs from the full cross product.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Literal

from .model import EquivConfig, SystemDef, compose
from .semantics import CapabilityLabel, Lts, State, WeakViews, build_lts, weak_views


class EquivalenceError(Exception):
    pass


class RelationFormatError(EquivalenceError):
    pass


class RelationResolutionError(EquivalenceError):
    def __init__(self, vector, side: str):
        super().__init__(f"no reachable {side} state has level vector {list(vector)}")
        self.vector = tuple(vector)
        self.side = side


@dataclass(frozen=True)
class PairRelation:
    """A set of cross-system state index pairs.

    A stored pair (p, q) stands for both (p, q) and (q, p); the checking
    game explicitly plays both directions, so no mirrored copies are kept.
    """

    pairs: frozenset[tuple[int, int]]

    def __contains__(self, pair: tuple[int, int]) -> bool:
        return pair in self.pairs

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class Witness:
    """A challenger move the defender could not answer inside the relation."""

    pair: tuple[State, State]
    side: Literal["left", "right"]
    kind: Literal["slow", "fast"]
    action: str | None
    label: CapabilityLabel | None
    target: State

    def describe(self) -> str:
        src = self.pair[0] if self.side == "left" else self.pair[1]
        other = "right" if self.side == "left" else "left"
        if self.kind == "slow":
            assert self.label is not None
            entries = " ".join(str(e) for e in self.label.sorted_entries())
            move = f"slow step ({self.action}, {{{entries}}})"
        else:
            move = "fast step"
        return (
            f"at pair ({_fmt(self.pair[0])}, {_fmt(self.pair[1])}): "
            f"{self.side} state {_fmt(src)} offers {move} to {_fmt(self.target)} "
            f"with no matching weak move from the {other} state landing in the relation"
        )


def _fmt(state: State) -> str:
    return "({})".format(",".join(str(x) for x in state))


@dataclass(frozen=True)
class CheckOutcome:
    verdict: Literal["equivalent", "not-equivalent", "relation-not-a-bisimulation"]
    witness: Witness | None = None

    @property
    def equivalent(self) -> bool:
        return self.verdict == "equivalent"

    def describe(self) -> str:
        if self.witness is None:
            return self.verdict
        return f"{self.verdict}: {self.witness.describe()}"


class _Game:
    """Matching game over one ordered pair of transition systems."""

    def __init__(self, a: Lts, b: Lts, cfg: EquivConfig, include_fast: bool):
        self.a = a
        self.b = b
        self.va: WeakViews = weak_views(a, cfg)
        self.vb: WeakViews = weak_views(b, cfg)
        self.include_fast = include_fast

    def witness_for(self, rel, p: int, q: int) -> Witness | None:
        """First unanswered challenger move at (p, q), or None.

        Slow challenges are tried before fast ones in both directions so
        witnesses name the more informative labelled move when several
        clauses fail at once.
        """
        states = (self.a.states[p], self.b.states[q])
        for action, label, p2 in self.va.slow_strong(p):
            targets = self.vb.weak_slow_targets(q, action, label)
            if not any((p2, q2) in rel for q2 in targets):
                return Witness(states, "left", "slow", action, label, self.a.states[p2])
        for action, label, q2 in self.vb.slow_strong(q):
            targets = self.va.weak_slow_targets(p, action, label)
            if not any((p2, q2) in rel for p2 in targets):
                return Witness(states, "right", "slow", action, label, self.b.states[q2])
        if self.include_fast:
            for p2 in self.va.fast_steps(p):
                closure = self.vb.fast_closure(q)
                if not any((p2, q2) in rel for q2 in closure):
                    return Witness(states, "left", "fast", None, None, self.a.states[p2])
            for q2 in self.vb.fast_steps(q):
                closure = self.va.fast_closure(p)
                if not any((p2, q2) in rel for p2 in closure):
                    return Witness(states, "right", "fast", None, None, self.b.states[q2])
        return None


def _validated_pairs(r: PairRelation, a: Lts, b: Lts) -> frozenset[tuple[int, int]]:
    if not r.pairs:
        raise EquivalenceError("empty-relation")
    for p, q in r.pairs:
        if not (0 <= p < a.n_states and 0 <= q < b.n_states):
            raise EquivalenceError(f"index-out-of-range(({p},{q}))")
    return r.pairs


def _check_relation(
    r: PairRelation, a: Lts, b: Lts, cfg: EquivConfig, include_fast: bool
) -> CheckOutcome:
    pairs = _validated_pairs(r, a, b)
    game = _Game(a, b, cfg, include_fast)
    for p, q in sorted(pairs):
        witness = game.witness_for(pairs, p, q)
        if witness is not None:
            return CheckOutcome("relation-not-a-bisimulation", witness)
    return CheckOutcome("equivalent")


def check_fast_slow_relation(
    r: PairRelation, a: Lts, b: Lts, cfg: EquivConfig
) -> CheckOutcome:
    """Verify a user-supplied fast-slow bisimulation candidate."""
    return _check_relation(r, a, b, cfg, include_fast=True)


def check_slow_relation(
    r: PairRelation, a: Lts, b: Lts, cfg: EquivConfig
) -> CheckOutcome:
    """Verify a user-supplied slow bisimulation candidate (fast clause dropped)."""
    return _check_relation(r, a, b, cfg, include_fast=False)


def _largest(
    a: Lts, b: Lts, cfg: EquivConfig, include_fast: bool
) -> tuple[PairRelation, CheckOutcome]:
    game = _Game(a, b, cfg, include_fast)
    rel = {(p, q) for p in range(a.n_states) for q in range(b.n_states)}
    reasons: dict[tuple[int, int], Witness] = {}
    while True:
        doomed = []
        for pair in sorted(rel):
            witness = game.witness_for(rel, *pair)
            if witness is not None:
                doomed.append((pair, witness))
        if not doomed:
            break
        for pair, witness in doomed:
            rel.discard(pair)
            reasons[pair] = witness
    initial = (a.initial, b.initial)
    if initial in rel:
        outcome = CheckOutcome("equivalent")
    else:
        outcome = CheckOutcome("not-equivalent", reasons.get(initial))
    return PairRelation(frozenset(rel)), outcome


def largest_fast_slow(
    a: Lts, b: Lts, cfg: EquivConfig
) -> tuple[PairRelation, CheckOutcome]:
    """Greatest fast-slow bisimulation over the cross product of states.

    Starts from all pairs and repeatedly deletes pairs violating either
    clause; deletions are applied between sweeps, so the fixpoint and the
    recorded witnesses are deterministic.  The outcome reports whether
    the two initial states remained related.
    """
    return _largest(a, b, cfg, include_fast=True)


def largest_slow(a: Lts, b: Lts, cfg: EquivConfig) -> tuple[PairRelation, CheckOutcome]:
    """Greatest slow bisimulation; as largest_fast_slow without the fast clause."""
    return _largest(a, b, cfg, include_fast=False)


def shared_fast_actions(
    p: SystemDef, q: SystemDef, cfg: EquivConfig
) -> frozenset[str]:
    """Fast actions occurring in both models.

    An empty result certifies the side condition under which fast-slow
    bisimilarity is preserved by shared-all cooperation with a context.
    """
    return cfg.fast & p.actions() & q.actions()


@dataclass(frozen=True)
class CongruenceReport:
    shared_with_p1: frozenset[str]
    shared_with_p2: frozenset[str]
    component: CheckOutcome
    composed: CheckOutcome

    @property
    def side_condition_ok(self) -> bool:
        return not self.shared_with_p1 and not self.shared_with_p2


def congruence_probe(
    p1: SystemDef, p2: SystemDef, q: SystemDef, cfg: EquivConfig
) -> CongruenceReport:
    """Compare two models before and after composing each with a context.

    Reports the shared fast actions with the context (the congruence side
    condition), the verdict for the components and the verdict for the
    compositions; used to confirm congruence instances and the failure
    mode when the side condition is violated.
    """
    shared1 = shared_fast_actions(p1, q, cfg)
    shared2 = shared_fast_actions(p2, q, cfg)
    _, component = largest_fast_slow(build_lts(p1), build_lts(p2), cfg)
    composed_a = build_lts(compose(p1, q))
    composed_b = build_lts(compose(p2, q))
    _, composed = largest_fast_slow(composed_a, composed_b, cfg)
    return CongruenceReport(shared1, shared2, component, composed)


def config_problems(cfg: EquivConfig, a: Lts, b: Lts) -> list[str]:
    """Pre-flight checks that need the transition systems at hand."""
    problems = []
    for action in sorted(a.actions() | b.actions()):
        if action not in cfg.fast and action not in cfg.slow:
            problems.append(f"unpartitioned-action({action})")
    known = set(a.species_order) | {cfg.canon(s) for s in b.species_order}
    for name in sorted(cfg.delta):
        if name not in known:
            problems.append(f"unknown-species-in-delta({name})")
    return problems


def resolve_relation(pairs: Iterable, a: Lts, b: Lts) -> PairRelation:
    """Turn pairs of level vectors into a PairRelation over state indices.

    Each element must be a two-element sequence (first-model vector,
    second-model vector); vectors that match no reachable state are
    errors, never silently dropped.
    """
    out = set()
    for item in pairs:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise RelationFormatError(
                "relation entries must be [first-vector, second-vector] pairs"
            )
        va, vb = item
        try:
            p = a.index_of(tuple(int(x) for x in va))
        except (KeyError, TypeError, ValueError):
            raise RelationResolutionError(va, "first-model") from None
        try:
            q = b.index_of(tuple(int(x) for x in vb))
        except (KeyError, TypeError, ValueError):
            raise RelationResolutionError(vb, "second-model") from None
        out.add((p, q))
    return PairRelation(frozenset(out))


def relation_to_obj(rel: PairRelation, a: Lts, b: Lts) -> list:
    """Render a relation as JSON-ready pairs of level vectors."""
    return [
        [list(a.states[p]), list(b.states[q])] for p, q in sorted(rel.pairs)
    ]
