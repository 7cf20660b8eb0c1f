"""Stoichiometric variable classification and the slow-check shortcut.

The stoichiometry matrix has one row per species (declaration order) and
one column per reaction.  Conserved variables span its left null space;
slow variables are additionally unchanged by every fast reaction but are
not conserved; fast variables complete the basis.  Transforming states to
(slow, fast) coordinates drops the constant conserved components and is a
bijection on reachable states, which is what lets a slow-only bisimulation
check stand in for the full fast-slow check when the reduced model has no
fast variables and the slow variables are matching individual species.

All linear algebra is exact: invariants are equality assertions, so
floating point is banned here.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import rational
from .equivalence import (
    CheckOutcome,
    PairRelation,
    check_fast_slow_relation,
    check_slow_relation,
)
from .model import EquivConfig, SystemDef
from .semantics import Lts, build_lts

IntVector = tuple[int, ...]


class ClassificationError(Exception):
    pass


class StateCollisionError(ClassificationError):
    """Two reachable states mapped to one coordinate tuple.

    The transformed system must stay isomorphic to the original; a
    collision means the classification does not determine the dropped
    coordinates and is a bug signal, never something to mask.
    """

    def __init__(self, first: IntVector, second: IntVector):
        super().__init__(f"state-collision({first}, {second})")
        self.first = first
        self.second = second


class ShortcutPreconditionError(ClassificationError):
    def __init__(self, reasons: list[str]):
        super().__init__("; ".join(reasons))
        self.reasons = list(reasons)


class ShortcutLiftError(ClassificationError):
    def __init__(self, coords: IntVector, side: str):
        super().__init__(
            f"no reachable {side} state has transformed coordinates {coords}"
        )
        self.coords = coords
        self.side = side


@dataclass(frozen=True)
class StoichMatrix:
    """Species-by-reaction integer stoichiometry.

    Entries are -stoich for a reactant prefix, +stoich for a product and
    zero for modifiers and non-participants.  Column order is first
    appearance while scanning species declarations in order.
    """

    species: tuple[str, ...]
    reactions: tuple[str, ...]
    entries: tuple[IntVector, ...]

    @property
    def n_species(self) -> int:
        return len(self.species)

    @property
    def n_reactions(self) -> int:
        return len(self.reactions)

    def column(self, reaction: str) -> IntVector:
        j = self.reactions.index(reaction)
        return tuple(row[j] for row in self.entries)

    def columns_for(self, reactions: frozenset[str]) -> list[list[int]]:
        cols = [j for j, r in enumerate(self.reactions) if r in reactions]
        return [[row[j] for j in cols] for row in self.entries]


def stoich_matrix(sys: SystemDef) -> StoichMatrix:
    reactions: list[str] = []
    for sdef in sys.species:
        for p in sdef.prefixes:
            if p.action not in reactions:
                reactions.append(p.action)
    entries = []
    for sdef in sys.species:
        row = [0] * len(reactions)
        for p in sdef.prefixes:
            row[reactions.index(p.action)] = p.role.level_delta(p.stoich)
        entries.append(tuple(row))
    return StoichMatrix(sys.species_order, tuple(reactions), tuple(entries))


def conserved_basis(m: StoichMatrix) -> list[IntVector]:
    """Integer basis of the left null space {y | y^T S = 0}.

    Canonical form is the reduced row echelon basis of the span, scaled
    to coprime integers.  When that form has negative entries but the
    span admits a non-negative basis, a spanning independent subset of
    the minimal semi-positive invariants is preferred, since conserved
    quantities are normally non-negative combinations of species.
    """
    space = rational.left_nullspace(list(m.entries))
    if not space:
        return []
    canonical = rational.rref_int_basis(space)
    if all(x >= 0 for row in canonical for x in row):
        return canonical
    flows = rational.minimal_semiflows(list(m.entries))
    if flows is not None:
        chosen: list[IntVector] = []
        for flow in sorted(flows, key=lambda f: (sum(1 for x in f if x), f)):
            if not rational.in_span(flow, space):
                continue
            if rational.rank(chosen + [list(flow)]) > len(chosen):
                chosen.append(flow)
            if len(chosen) == len(canonical):
                return sorted(chosen, key=_leading_index)
    return canonical


def _leading_index(vector: IntVector) -> int:
    for i, x in enumerate(vector):
        if x:
            return i
    return len(vector)


def _unit(i: int, n: int) -> IntVector:
    return tuple(1 if j == i else 0 for j in range(n))


def slow_basis(
    m: StoichMatrix, cfg: EquivConfig, conserved: list[IntVector]
) -> list[IntVector]:
    """Vectors unchanged by every fast reaction, modulo the conserved span.

    Candidates are canonicalised preferring single-species unit vectors,
    comparison species (delta, via the alias map) first and declaration
    order otherwise; remaining slots are filled from the null space's
    canonical basis.
    """
    fast_part = m.columns_for(cfg.fast)
    space = rational.left_nullspace(fast_part)
    target = len(space) - len(conserved)
    if target <= 0:
        return []
    n = m.n_species
    chosen: list[IntVector] = []

    def independent(vec) -> bool:
        stack = [list(v) for v in conserved] + [list(v) for v in chosen]
        return rational.rank(stack + [list(vec)]) > rational.rank(stack)

    in_delta = [i for i, name in enumerate(m.species) if cfg.canon(name) in cfg.delta]
    rest = [i for i in range(n) if i not in in_delta]
    for i in in_delta + rest:
        if len(chosen) == target:
            break
        e = _unit(i, n)
        if rational.in_span(e, space) and independent(e):
            chosen.append(e)
    if len(chosen) < target:
        for vec in rational.rref_int_basis(space):
            if len(chosen) == target:
                break
            if independent(vec):
                chosen.append(vec)
    return chosen


def complete_fast(
    m: StoichMatrix, conserved: list[IntVector], slow: list[IntVector]
) -> list[IntVector]:
    """Unit vectors completing (conserved, slow) to a basis of all species.

    The completion takes the species whose coordinates are not pivots of
    the stacked conserved and slow rows; by basis exchange the result is
    always nonsingular, and it reproduces the usual choice of leaving the
    fast intermediates as explicit coordinates.
    """
    n = m.n_species
    stack = [list(v) for v in conserved] + [list(v) for v in slow]
    _, pivots = rational.rref(stack)
    fast = [_unit(i, n) for i in range(n) if i not in pivots]
    full = stack + [list(v) for v in fast]
    if rational.rank(full) != n:
        raise ClassificationError("completion failed to reach full rank")
    return fast


def vector_name(vector: IntVector, species: tuple[str, ...]) -> str:
    """Human name for an integer combination, e.g. ``S+SE+P`` or ``2*E-I``."""
    parts = []
    for coeff, name in zip(vector, species):
        if coeff == 0:
            continue
        sign = "-" if coeff < 0 else ("+" if parts else "")
        mag = abs(coeff)
        parts.append(f"{sign}{name}" if mag == 1 else f"{sign}{mag}*{name}")
    return "".join(parts) if parts else "0"


def unit_species(vector: IntVector, species: tuple[str, ...]) -> str | None:
    """The species name if the vector is a single-species unit vector."""
    hits = [i for i, x in enumerate(vector) if x]
    if len(hits) == 1 and vector[hits[0]] == 1:
        return species[hits[0]]
    return None


@dataclass(frozen=True)
class VariableClassification:
    """Conserved, slow and fast variable bases over the species."""

    species: tuple[str, ...]
    conserved: tuple[IntVector, ...]
    constants: tuple[int, ...]
    slow: tuple[IntVector, ...]
    fast: tuple[IntVector, ...]
    warnings: tuple[str, ...] = ()

    @property
    def n_c(self) -> int:
        return len(self.conserved)

    @property
    def n_s(self) -> int:
        return len(self.slow)

    @property
    def n_f(self) -> int:
        return len(self.fast)

    def slow_species(self) -> list[str | None]:
        return [unit_species(v, self.species) for v in self.slow]

    def coordinate_names(self) -> tuple[str, ...]:
        return tuple(vector_name(v, self.species) for v in self.slow + self.fast)


def classify(sys: SystemDef, cfg: EquivConfig) -> VariableClassification:
    """Full classification pipeline for one model."""
    m = stoich_matrix(sys)
    conserved = conserved_basis(m)
    slow = slow_basis(m, cfg, conserved)
    fast = complete_fast(m, conserved, slow)
    if len(conserved) + len(slow) + len(fast) != m.n_species:
        raise ClassificationError("variable counts do not add up to the species count")
    initial = sys.initial_levels()
    levels = [initial[name] for name in m.species]
    constants = tuple(int(rational.dot(v, levels)) for v in conserved)
    warnings = []
    for v in conserved:
        if any(x < 0 for x in v):
            warnings.append(
                f"conserved vector {vector_name(v, m.species)} has negative entries"
            )
    return VariableClassification(
        species=m.species,
        conserved=tuple(conserved),
        constants=constants,
        slow=tuple(slow),
        fast=tuple(fast),
        warnings=tuple(warnings),
    )


def block_shape_ok(m: StoichMatrix, cfg: EquivConfig, cls: VariableClassification) -> bool:
    """Check the transformed matrix has the expected zero blocks.

    Rows reordered (conserved, slow, fast) and columns (slow, fast): the
    conserved rows must vanish entirely and the slow rows must vanish on
    the fast columns.
    """
    slow_cols = [j for j, r in enumerate(m.reactions) if r in cfg.slow]
    fast_cols = [j for j, r in enumerate(m.reactions) if r in cfg.fast]
    for v in cls.conserved:
        for j in slow_cols + fast_cols:
            if rational.dot(v, [row[j] for row in m.entries]) != 0:
                return False
    for v in cls.slow:
        for j in fast_cols:
            if rational.dot(v, [row[j] for row in m.entries]) != 0:
                return False
    return True


def transform_lts(lts: Lts, cls: VariableClassification) -> Lts:
    """Rewrite states to (slow, fast) coordinates, keeping transitions.

    Conserved coordinates are constant on the reachable states and are
    dropped.  The map must be injective on the reachable states; a
    collision raises StateCollisionError.
    """
    vectors = cls.slow + cls.fast
    if rational.rank(
        [list(v) for v in cls.conserved] + [list(v) for v in vectors]
    ) != len(cls.species):
        raise ClassificationError("classification vectors are not a basis")
    new_states = []
    seen: dict[IntVector, IntVector] = {}
    for state in lts.states:
        coords = tuple(int(rational.dot(v, state)) for v in vectors)
        if coords in seen:
            raise StateCollisionError(seen[coords], state)
        seen[coords] = state
        new_states.append(coords)
    return Lts(
        species_order=cls.coordinate_names(),
        states=tuple(new_states),
        initial=lts.initial,
        transitions=lts.transitions,
    )


@dataclass(frozen=True)
class SufficiencyReport:
    """Whether the slow-only check may replace the fast-slow check."""

    applicable: bool
    reasons: tuple[str, ...] = ()


def slow_sufficiency(
    cls_a: VariableClassification,
    cls_b: VariableClassification,
    cfg: EquivConfig,
) -> SufficiencyReport:
    """Preconditions for the shortcut.

    The second model must have no fast variables, both slow bases must be
    individual species, and those species must coincide under the alias
    map.
    """
    reasons = []
    if cls_b.n_f != 0:
        reasons.append("second model has fast variables")
    species_a = cls_a.slow_species()
    species_b = cls_b.slow_species()
    for vec, name in zip(cls_a.slow, species_a):
        if name is None:
            reasons.append(
                "slow variable not an individual species: "
                + vector_name(vec, cls_a.species)
            )
    for vec, name in zip(cls_b.slow, species_b):
        if name is None:
            reasons.append(
                "slow variable not an individual species: "
                + vector_name(vec, cls_b.species)
            )
    if None not in species_a and None not in species_b:
        canon_a = {cfg.canon(n) for n in species_a if n is not None}
        canon_b = {cfg.canon(n) for n in species_b if n is not None}
        if canon_a != canon_b:
            reasons.append(
                "slow species differ between the models: "
                f"{sorted(canon_a)} vs {sorted(canon_b)}"
            )
    return SufficiencyReport(not reasons, tuple(reasons))


@dataclass(frozen=True)
class ShortcutOutcome:
    """Evidence trail of the shortcut pipeline."""

    sufficiency: SufficiencyReport
    classification_a: VariableClassification
    classification_b: VariableClassification
    slow_outcome: CheckOutcome
    fastslow_outcome: CheckOutcome

    @property
    def outcome(self) -> CheckOutcome:
        if not self.slow_outcome.equivalent:
            return self.slow_outcome
        return self.fastslow_outcome


def _align_slow(
    cls_a: VariableClassification,
    cls_b: VariableClassification,
    cfg: EquivConfig,
) -> VariableClassification:
    """Reorder the second model's slow basis to match the first's species."""
    by_canon = {
        cfg.canon(name): vec
        for vec, name in zip(cls_b.slow, cls_b.slow_species())
        if name is not None
    }
    ordered = []
    for name in cls_a.slow_species():
        assert name is not None
        ordered.append(by_canon[cfg.canon(name)])
    return replace(cls_b, slow=tuple(ordered))


def shortcut_check(
    sys_a: SystemDef,
    sys_b: SystemDef,
    cfg: EquivConfig,
    relation: list[tuple[IntVector, IntVector]],
) -> ShortcutOutcome:
    """Certify fast-slow bisimilarity via a slow-only check.

    The supplied relation is given in transformed coordinates: pairs of
    (slow..., fast...) for the first model against (slow...) for the
    second, with equal slow values inside every pair.  After the slow
    check succeeds on the transformed systems, the same relation is
    cross-validated with the direct fast-slow check on the original
    transition systems.
    """
    cls_a = classify(sys_a, cfg)
    cls_b = classify(sys_b, cfg)
    report = slow_sufficiency(cls_a, cls_b, cfg)
    if not report.applicable:
        raise ShortcutPreconditionError(list(report.reasons))
    cls_b = _align_slow(cls_a, cls_b, cfg)
    lts_a = build_lts(sys_a)
    lts_b = build_lts(sys_b)
    t_a = transform_lts(lts_a, cls_a)
    t_b = transform_lts(lts_b, cls_b)
    n_s = cls_a.n_s
    pairs = set()
    for coords_a, coords_b in relation:
        coords_a, coords_b = tuple(coords_a), tuple(coords_b)
        if len(coords_a) != cls_a.n_s + cls_a.n_f or len(coords_b) != n_s:
            raise ShortcutPreconditionError(
                [f"coordinate pair ({coords_a}, {coords_b}) has the wrong arities"]
            )
        if coords_a[:n_s] != coords_b[:n_s]:
            raise ShortcutPreconditionError(
                [
                    "slow coordinates must be equal within each pair: "
                    f"{coords_a[:n_s]} vs {coords_b[:n_s]}"
                ]
            )
        try:
            ia = t_a.index_of(coords_a)
        except KeyError:
            raise ShortcutLiftError(coords_a, "first-model") from None
        try:
            ib = t_b.index_of(coords_b)
        except KeyError:
            raise ShortcutLiftError(coords_b, "second-model") from None
        pairs.add((ia, ib))
    lifted = PairRelation(frozenset(pairs))
    slow_outcome = check_slow_relation(lifted, t_a, t_b, cfg)
    if not slow_outcome.equivalent:
        fs = slow_outcome
    else:
        fs = check_fast_slow_relation(lifted, lts_a, lts_b, cfg)
    return ShortcutOutcome(
        sufficiency=report,
        classification_a=cls_a,
        classification_b=cls_b,
        slow_outcome=slow_outcome,
        fastslow_outcome=fs,
    )


def classification_report(
    sys: SystemDef, cfg: EquivConfig, cls: VariableClassification | None = None
) -> dict:
    """JSON-friendly classification summary with stable key order."""
    if cls is None:
        cls = classify(sys, cfg)
    m = stoich_matrix(sys)

    def basis_entry(vector: IntVector, constant: int | None = None) -> dict:
        entry: dict = {"vector": list(vector), "name": vector_name(vector, cls.species)}
        species = unit_species(vector, cls.species)
        if species is not None:
            entry["species"] = species
        if constant is not None:
            entry["constant"] = constant
        return entry

    return {
        "species": list(cls.species),
        "reactions": list(m.reactions),
        "conserved": [
            basis_entry(v, c) for v, c in zip(cls.conserved, cls.constants)
        ],
        "slow": [basis_entry(v) for v in cls.slow],
        "fast": [basis_entry(v) for v in cls.fast],
        "blockShapeVerified": block_shape_ok(m, cfg, cls),
        "warnings": list(cls.warnings),
    }
