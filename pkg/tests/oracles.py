"""Independent oracles: deliberately naive re-computations of the
relations the library builds, used to cross-check the real implementations.
They share no code with the package beyond the data types."""

from __future__ import annotations

from fastslow import CapabilityLabel, EquivConfig, Lts, filter_label


def warshall_closure(n: int, edges: set[tuple[int, int]]) -> list[set[int]]:
    """Reflexive-transitive closure by the triple loop."""
    reach = [{i} for i in range(n)]
    for a, b in edges:
        reach[a].add(b)
    for k in range(n):
        for i in range(n):
            if k in reach[i]:
                reach[i] |= reach[k]
    return reach


def fast_edges(lts: Lts, cfg: EquivConfig) -> set[tuple[int, int]]:
    return {
        (t.src, t.dst) for t in lts.transitions if t.label.action in cfg.fast
    }


def weak_slow_oracle(
    lts: Lts, cfg: EquivConfig
) -> dict[tuple[int, str, CapabilityLabel], set[int]]:
    """All weak slow moves: fast closure, one slow step, fast closure."""
    closure = warshall_closure(lts.n_states, fast_edges(lts, cfg))
    slow = [
        (t.src, t.label.action, filter_label(t.label, cfg), t.dst)
        for t in lts.transitions
        if t.label.action in cfg.slow
    ]
    out: dict[tuple[int, str, CapabilityLabel], set[int]] = {}
    for i in range(lts.n_states):
        for src, action, label, dst in slow:
            if src in closure[i]:
                out.setdefault((i, action, label), set()).update(closure[dst])
    return out


def strong_bisim_oracle(lts: Lts) -> set[tuple[int, int]]:
    """Largest strong bisimulation over full capability labels, by the
    straightforward delete-violating-pairs fixpoint."""
    n = lts.n_states
    moves = [[(t.label, t.dst) for t in lts.outgoing(i)] for i in range(n)]

    def matched(rel, src_moves, dst_moves, flip):
        for label, d1 in src_moves:
            found = False
            for other, d2 in dst_moves:
                if other == label:
                    pair = (d2, d1) if flip else (d1, d2)
                    if pair in rel:
                        found = True
                        break
            if not found:
                return False
        return True

    rel = {(i, j) for i in range(n) for j in range(n)}
    changed = True
    while changed:
        changed = False
        for i, j in sorted(rel):
            if not matched(rel, moves[i], moves[j], False) or not matched(
                rel, moves[j], moves[i], True
            ):
                rel.discard((i, j))
                changed = True
    return rel
