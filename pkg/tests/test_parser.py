from __future__ import annotations

import pytest

from fastslow import (
    EquivConfig,
    Leaf,
    Node,
    ParseError,
    Prefix,
    Role,
    parse_config,
    parse_model,
    render_config,
    render_model,
)
from randgen import random_system
from systems import inhibition_full

import random


def diagnostics_of(text: str) -> list[str]:
    with pytest.raises(ParseError) as err:
        parse_model(text)
    return [str(d) for d in err.value.diagnostics]


class TestParseModel:
    def test_inhibition_fixture(self, fixtures):
        parsed = parse_model((fixtures / "inhibition_full.bp").read_text())
        assert parsed.species == inhibition_full().species
        assert parsed.species_order == ("S", "E", "I", "P", "EI", "SE")
        assert parsed.tree == inhibition_full().tree
        enzyme = parsed.species_def("E")
        assert [p.action for p in enzyme.prefixes] == ["a1", "am1", "b1", "bm1", "g"]
        assert parsed.rates["g"] == "k_g * SE"
        assert parsed.params == {"k_g": "0.1"}

    def test_missing_system_line(self):
        report = diagnostics_of("max S = 5;\nspecies S = (a,1) << S;\n")
        assert any("missing system declaration" in d for d in report)

    def test_zero_stoichiometry(self):
        report = diagnostics_of(
            "max S = 5;\nspecies S = (a,0) << S;\nsystem = S[0];\n"
        )
        assert any("stoichiometric coefficient" in d for d in report)

    def test_continuation_must_match(self):
        report = diagnostics_of(
            "max S = 5;\nmax T = 5;\nspecies S = (a,1) << T;\nsystem = S[0];\n"
        )
        assert any("must return to itself" in d for d in report)

    def test_missing_max(self):
        report = diagnostics_of("species S = (a,1) << S;\nsystem = S[0];\n")
        assert any("missing max declaration" in d for d in report)

    def test_level_out_of_range_forwarded(self):
        report = diagnostics_of(
            "max S = 5;\nspecies S = (a,1) << S;\nsystem = S[9];\n"
        )
        assert any("level-out-of-range(S)" in d for d in report)

    def test_multiple_diagnostics_collected(self):
        report = diagnostics_of(
            "max S = 5;\nspecies S = (a,0) << S;\nspecies S = (b,1) << S;\n"
        )
        assert len(report) >= 2

    def test_explicit_coop_sets(self):
        parsed = parse_model(
            "max A = 2;\nmax B = 2;\nmax C = 2;\n"
            "species A = (x,1) << A;\n"
            "species B = (x,1) >> B + (y,1) << B;\n"
            "species C = (y,1) >> C;\n"
            "system = (A[1] <x> B[0]) <y> C[0];\n"
        )
        root = parsed.tree
        assert isinstance(root, Node) and root.coop == frozenset({"y"})
        assert isinstance(root.left, Node) and root.left.coop == frozenset({"x"})

    def test_spans_inside_text(self):
        text = "max S = 5;\nspecies S = (a,0) << S;\n"
        with pytest.raises(ParseError) as err:
            parse_model(text)
        for d in err.value.diagnostics:
            assert 0 <= d.span.start <= d.span.end <= len(text)
            assert d.span.line >= 1 and d.span.column >= 1

    def test_comments_and_primes(self):
        parsed = parse_model(
            "// a comment\nmax S' = 2; // trailing\nspecies S' = (a,1) << S';\nsystem = S'[1];\n"
        )
        assert parsed.species_order == ("S'",)


class TestRender:
    def test_fixture_round_trip(self, fixtures):
        source = (fixtures / "inhibition_full.bp").read_text()
        parsed = parse_model(source)
        text = render_model(parsed)
        assert parse_model(text) == parsed
        # idempotent normalisation
        assert render_model(parse_model(text)) == text

    def test_all_roles_render(self):
        sys = parse_model(
            "max S = 3;\nmax T = 3;\n"
            "species S = (a,1) << S + (b,1) >> S + (c,1) (+) S + (d,1) (-) S + (e,1) (.) S;\n"
            "species T = (a,1) >> T + (b,1) << T + (c,2) (.) T + (d,1) (+) T + (e,1) (-) T;\n"
            "system = S[1] <a,b> T[2];\n"
        )
        text = render_model(sys)
        for op in ("<<", ">>", "(+)", "(-)", "(.)"):
            assert op in text
        assert parse_model(text) == sys

    def test_empty_coop_set_round_trips(self):
        from fastslow import SpeciesDef, SystemDef

        a = SpeciesDef("A", (Prefix("x", 1, Role.PRODUCT),), 2)
        b = SpeciesDef("B", (Prefix("x", 1, Role.REACTANT),), 2)
        sys = SystemDef((a, b), Node(Leaf("A", 0), frozenset(), Leaf("B", 1)))
        assert parse_model(render_model(sys)) == sys

    def test_random_round_trips(self):
        for case in range(150):
            sys = random_system(random.Random(f"roundtrip:{case}"))
            text = render_model(sys)
            again = parse_model(text)
            assert again == sys, text
            assert render_model(again) == text

    def test_unrenderable_context_rejected(self):
        sys = parse_model('max S = 2;\nspecies S = (a,1) << S;\nsystem = S[1];\n')
        from dataclasses import replace

        with pytest.raises(ValueError):
            render_model(replace(sys, params={"k": 'has "quotes"'}))


class TestParseConfig:
    def test_inhibition_config(self, fixtures):
        cfg = parse_config((fixtures / "inhibition.cfg").read_text())
        assert cfg.fast == frozenset({"a1", "am1", "b1", "bm1"})
        assert cfg.slow == frozenset({"g"})
        assert cfg.delta == frozenset({"P"})
        assert cfg.aliases == {"P'": "P"}

    def test_action_in_both_classes(self):
        with pytest.raises(ParseError) as err:
            parse_config("fast: g\nslow: g\n")
        assert any("action-in-both-classes(g)" in str(d) for d in err.value.diagnostics)

    def test_empty_delta_is_valid(self):
        cfg = parse_config("fast: a\nslow: g\n")
        assert cfg.delta == frozenset()

    def test_unknown_key(self):
        with pytest.raises(ParseError):
            parse_config("speed: a\n")

    def test_malformed_alias(self):
        with pytest.raises(ParseError):
            parse_config("alias: P'\n")

    def test_render_config_round_trip(self):
        cfg = EquivConfig(
            fast=frozenset({"a", "b"}),
            slow=frozenset({"g"}),
            delta=frozenset({"P", "Q"}),
            aliases={"P'": "P", "Q'": "Q"},
        )
        assert parse_config(render_config(cfg)) == cfg
