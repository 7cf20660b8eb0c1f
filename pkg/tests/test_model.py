from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from fastslow import (
    EquivConfig,
    InvalidModelError,
    Leaf,
    Node,
    OverlappingActionsError,
    Prefix,
    Role,
    SpeciesDef,
    SystemDef,
    compose,
    extend_species,
    max_level,
    validate_species,
    validate_system,
)
from systems import burst_systems, inhibition_full, inhibition_reduced


def species(name, *prefixes, max_count=3):
    return SpeciesDef(name, tuple(prefixes), max_count)


class TestValidateSpecies:
    def test_inhibition_enzyme_is_valid(self):
        enzyme = inhibition_full().species_def("E")
        assert len(enzyme.prefixes) == 5
        assert validate_species(enzyme) == []

    def test_duplicate_action(self):
        bad = species(
            "C", Prefix("a", 1, Role.REACTANT), Prefix("a", 1, Role.PRODUCT)
        )
        report = validate_species(bad)
        assert any(p.startswith("duplicate-action(a)") for p in report)

    def test_single_summand_is_valid(self):
        assert validate_species(species("C", Prefix("a", 1, Role.REACTANT))) == []

    def test_empty_definition(self):
        assert any(
            p.startswith("empty-definition") for p in validate_species(species("C"))
        )

    def test_zero_stoichiometry(self):
        bad = species("C", Prefix("a", 0, Role.REACTANT))
        assert any(p.startswith("invalid-stoichiometry") for p in validate_species(bad))

    def test_accepts_iff_actions_pairwise_distinct(self):
        # bounded-exhaustive over tiny species bodies
        pool = [
            Prefix(action, 1, role)
            for action in ("a", "b")
            for role in Role
        ]
        for size in (1, 2, 3):
            for body in itertools.product(pool, repeat=size):
                sdef = species("C", *body)
                names = [p.action for p in body]
                ok = len(set(names)) == len(names)
                assert (validate_species(sdef) == []) == ok


class TestValidateSystem:
    def test_inhibition_system_valid(self):
        assert validate_system(inhibition_full()) == []
        assert validate_system(inhibition_reduced()) == []

    def test_repeated_species_leaf(self):
        s = species("S", Prefix("a", 1, Role.REACTANT), max_count=5)
        sys = SystemDef((s,), Node(Leaf("S", 0), None, Leaf("S", 1)))
        assert any(p.startswith("repeated-species(S)") for p in validate_system(sys))

    def test_level_out_of_range(self):
        s = species("S", Prefix("a", 1, Role.REACTANT), max_count=5)
        sys = SystemDef((s,), Leaf("S", 6))
        assert any(
            p.startswith("level-out-of-range(S)") for p in validate_system(sys)
        )

    def test_dangling_coop_action(self):
        a = species("A", Prefix("x", 1, Role.REACTANT))
        b = species("B", Prefix("y", 1, Role.PRODUCT))
        sys = SystemDef((a, b), Node(Leaf("A", 1), frozenset({"x"}), Leaf("B", 0)))
        assert any(
            p.startswith("dangling-coop-action(x)") for p in validate_system(sys)
        )

    def test_unknown_and_unused_species(self):
        a = species("A", Prefix("x", 1, Role.REACTANT))
        b = species("B", Prefix("y", 1, Role.PRODUCT))
        sys = SystemDef((a, b), Leaf("A", 1))
        report = validate_system(sys)
        assert any(p.startswith("unused-species(B)") for p in report)
        sys2 = SystemDef((a,), Leaf("Z", 0))
        assert any(p.startswith("unknown-species(Z)") for p in validate_system(sys2))


class TestMaxLevel:
    @pytest.mark.parametrize(
        "m, h, n", [(5, 1, 5), (10, 4, 3), (4, 4, 1), (1, 1, 1), (7, 2, 4)]
    )
    def test_examples(self, m, h, n):
        assert max_level(SpeciesDef("C", (Prefix("a", 1, Role.REACTANT),), m), h) == n

    @given(st.integers(min_value=1, max_value=10**6), st.integers(min_value=1, max_value=10**4))
    def test_unique_bracketing(self, m, h):
        n = max_level(SpeciesDef("C", (Prefix("a", 1, Role.REACTANT),), m), h)
        assert (n - 1) * h < m <= n * h


class TestExtendSpecies:
    def test_concatenates_prefixes(self):
        a = species("C1", Prefix("a", 1, Role.PRODUCT))
        b = species("C", Prefix("g", 1, Role.REACTANT))
        ext = extend_species(a, b)
        assert ext.name == "C1{C}"
        assert [p.action for p in ext.prefixes] == ["a", "g"]
        assert [p.role for p in ext.prefixes] == [Role.PRODUCT, Role.REACTANT]
        assert validate_species(ext) == []

    def test_overlap_rejected(self):
        a = species("A", Prefix("a", 1, Role.PRODUCT))
        b = species("B", Prefix("a", 2, Role.REACTANT))
        with pytest.raises(OverlappingActionsError) as err:
            extend_species(a, b)
        assert err.value.actions == frozenset({"a"})

    def test_extension_always_well_defined(self):
        a = inhibition_full().species_def("S")
        b = species("N", Prefix("z1", 1, Role.ACTIVATOR), Prefix("z2", 2, Role.PRODUCT))
        assert validate_species(extend_species(a, b)) == []
        assert validate_species(extend_species(b, a)) == []


class TestCompose:
    def test_disjoint_composition(self):
        reduced = inhibition_reduced()
        extra = SystemDef(
            (species("Z", Prefix("z", 1, Role.REACTANT), max_count=2),),
            Leaf("Z", 2),
        )
        combined = compose(reduced, extra)
        assert combined.species_order == ("S'", "E'", "I'", "P'", "Z")
        assert len(list(combined.initial_levels())) == 5
        assert validate_system(combined) == []

    def test_shared_action_synchronises(self):
        s1, _, ctx, _ = burst_systems()
        combined = compose(s1, ctx)
        assert combined.actions() == frozenset({"a", "g"})
        # shared-all root node: 'a' occurs on both sides
        assert combined.tree.coop is None

    def test_self_composition_rejected(self):
        s1, _, _, _ = burst_systems()
        with pytest.raises(InvalidModelError) as err:
            compose(s1, s1)
        assert any("repeated-species(S1)" in p for p in err.value.problems)

    def test_step_size_mismatch_rejected(self):
        s1, _, _, _ = burst_systems()
        other = SystemDef(
            (species("Y", Prefix("y", 1, Role.REACTANT), max_count=2),),
            Leaf("Y", 1),
            step_size=2,
        )
        with pytest.raises(InvalidModelError):
            compose(s1, other)


class TestEquivConfig:
    def test_partition_must_be_disjoint(self):
        with pytest.raises(ValueError):
            EquivConfig(fast=frozenset({"g"}), slow=frozenset({"g"}))

    def test_swapped_inverts_aliases_and_delta(self):
        cfg = EquivConfig(
            fast=frozenset({"f"}),
            slow=frozenset({"s"}),
            delta=frozenset({"P"}),
            aliases={"P'": "P"},
        )
        swapped = cfg.swapped()
        assert swapped.aliases == {"P": "P'"}
        assert swapped.delta == frozenset({"P'"})
        assert swapped.swapped() == cfg
