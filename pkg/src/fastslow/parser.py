"""Textual model language and equivalence-configuration files.

Model files are a list of declarations terminated by semicolons::

    step = 1;
    max S = 5;
    species S = (b1,1) << S + (bm1,1) >> S;
    rate b1 = "k1 * S * E";
    param k1 = "0.5";
    system = S[5] <*> E[3];

Operator spellings: ``<<`` reactant, ``>>`` product, ``(+)`` activator,
``(-)`` inhibitor, ``(.)`` generic modifier, ``+`` choice, ``<*>``
shared-all cooperation, ``<a,b>`` explicit cooperation set (``<>`` for the
empty set), ``S[3]`` a species at level 3.  ``//`` starts a comment.
Identifiers are letters, digits, underscores and primes, starting with a
letter.

Configuration files are ``key: value`` lines with the keys ``fast``,
``slow``, ``delta`` (comma-separated names) and ``alias`` (``X' = X``,
repeatable).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .model import (
    EquivConfig,
    Leaf,
    Node,
    Prefix,
    Role,
    SpeciesDef,
    SystemDef,
    validate_system,
)


@dataclass(frozen=True)
class SourceSpan:
    """Position of a piece of input text, for diagnostics."""

    line: int
    column: int
    start: int
    end: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    span: SourceSpan
    message: str

    def __str__(self) -> str:
        return f"{self.span}: {self.message}"


class ParseError(Exception):
    """Carries every diagnostic collected while reading an input file."""

    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = list(diagnostics)


class Token(NamedTuple):
    kind: str  # "ident", "int", "string", "symbol", "eof"
    text: str
    span: SourceSpan


KEYWORDS = {"step", "max", "species", "system", "param", "rate"}

_SYMBOLS = ("<*>", "(+)", "(-)", "(.)", "<<", ">>", ";", "=", "+", "(", ")", ",", "[", "]", "<", ">")


def _lex(text: str) -> list[Token]:
    tokens: list[Token] = []
    diagnostics: list[Diagnostic] = []
    pos = 0
    line = 1
    col = 1

    def span(start: int, end: int, sline: int, scol: int) -> SourceSpan:
        return SourceSpan(sline, scol, start, end)

    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch == "\n":
            pos += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            pos += 1
            col += 1
            continue
        if text.startswith("//", pos):
            while pos < n and text[pos] != "\n":
                pos += 1
                col += 1
            continue
        start, sline, scol = pos, line, col
        if ch.isalpha():
            while pos < n and (text[pos].isalnum() or text[pos] in "_'"):
                pos += 1
                col += 1
            tokens.append(Token("ident", text[start:pos], span(start, pos, sline, scol)))
            continue
        if ch.isdigit():
            while pos < n and text[pos].isdigit():
                pos += 1
                col += 1
            tokens.append(Token("int", text[start:pos], span(start, pos, sline, scol)))
            continue
        if ch == '"':
            pos += 1
            col += 1
            while pos < n and text[pos] not in '"\n':
                pos += 1
                col += 1
            if pos >= n or text[pos] != '"':
                diagnostics.append(
                    Diagnostic(span(start, pos, sline, scol), "unterminated string")
                )
                break
            pos += 1
            col += 1
            tokens.append(
                Token("string", text[start + 1 : pos - 1], span(start, pos, sline, scol))
            )
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, pos):
                pos += len(sym)
                col += len(sym)
                tokens.append(Token("symbol", sym, span(start, pos, sline, scol)))
                break
        else:
            diagnostics.append(
                Diagnostic(span(start, pos + 1, sline, scol), f"unexpected character {ch!r}")
            )
            pos += 1
            col += 1
    tokens.append(Token("eof", "", SourceSpan(line, col, n, n)))
    if diagnostics:
        raise ParseError(diagnostics)
    return tokens


_ROLE_BY_SPELLING = {role.value: role for role in Role}


class _ModelParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _lex(text)
        self.pos = 0
        self.diagnostics: list[Diagnostic] = []
        self.step: int | None = None
        self.step_span: SourceSpan | None = None
        self.maxes: dict[str, tuple[int, SourceSpan]] = {}
        self.species: list[tuple[str, tuple[Prefix, ...], SourceSpan]] = []
        self.tree: Leaf | Node | None = None
        self.tree_span: SourceSpan | None = None
        self.params: dict[str, str] = {}
        self.rates: dict[str, str] = {}

    # cursor helpers -----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_symbol(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "symbol" and tok.text == text

    def error(self, span: SourceSpan, message: str) -> None:
        self.diagnostics.append(Diagnostic(span, message))

    def fail(self, message: str) -> "_Recover":
        self.error(self.peek().span, message)
        return _Recover()

    def expect_symbol(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind == "symbol" and tok.text == text:
            return self.advance()
        raise self.fail(f"expected {text!r}, found {tok.text!r}" if tok.text else f"expected {text!r}, found end of input")

    def expect_ident(self, what: str = "name") -> Token:
        tok = self.peek()
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            return self.advance()
        raise self.fail(f"expected {what}, found {tok.text!r}" if tok.text else f"expected {what}, found end of input")

    def expect_int(self, what: str = "integer") -> tuple[int, SourceSpan]:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return int(tok.text), tok.span
        raise self.fail(f"expected {what}, found {tok.text!r}" if tok.text else f"expected {what}, found end of input")

    def expect_string(self) -> Token:
        tok = self.peek()
        if tok.kind == "string":
            return self.advance()
        raise self.fail(f"expected quoted string, found {tok.text!r}" if tok.text else "expected quoted string, found end of input")

    # declarations -------------------------------------------------------

    def parse(self) -> SystemDef:
        while self.peek().kind != "eof":
            try:
                self.declaration()
            except _Recover:
                self.skip_past_semicolon()
        return self.assemble()

    def skip_past_semicolon(self) -> None:
        while self.peek().kind != "eof":
            tok = self.advance()
            if tok.kind == "symbol" and tok.text == ";":
                return

    def declaration(self) -> None:
        tok = self.peek()
        if tok.kind != "ident" or tok.text not in KEYWORDS:
            raise self.fail(
                f"expected a declaration keyword, found {tok.text!r}"
                if tok.text
                else "expected a declaration"
            )
        if tok.text == "step":
            self.step_decl()
        elif tok.text == "max":
            self.max_decl()
        elif tok.text == "species":
            self.species_decl()
        elif tok.text == "system":
            self.system_decl()
        elif tok.text == "param":
            self.param_decl()
        else:
            self.rate_decl()

    def step_decl(self) -> None:
        kw = self.advance()
        self.expect_symbol("=")
        value, span = self.expect_int("step size")
        self.expect_symbol(";")
        if self.step is not None:
            self.error(kw.span, "duplicate step declaration")
            return
        if value < 1:
            self.error(span, "step size must be at least 1")
            return
        self.step = value
        self.step_span = kw.span

    def max_decl(self) -> None:
        self.advance()
        name = self.expect_ident("species name")
        self.expect_symbol("=")
        value, span = self.expect_int("maximum count")
        self.expect_symbol(";")
        if name.text in self.maxes:
            self.error(name.span, f"duplicate max declaration for {name.text}")
            return
        if value < 1:
            self.error(span, "maximum count must be at least 1")
            return
        self.maxes[name.text] = (value, name.span)

    def species_decl(self) -> None:
        self.advance()
        name = self.expect_ident("species name")
        self.expect_symbol("=")
        prefixes = [self.summand(name.text)]
        while self.at_symbol("+"):
            self.advance()
            prefixes.append(self.summand(name.text))
        self.expect_symbol(";")
        if any(name.text == existing for existing, _, _ in self.species):
            self.error(name.span, f"repeated-species({name.text})")
            return
        self.species.append((name.text, tuple(prefixes), name.span))

    def summand(self, species: str) -> Prefix:
        self.expect_symbol("(")
        action = self.expect_ident("action name")
        self.expect_symbol(",")
        stoich, stoich_span = self.expect_int("stoichiometric coefficient")
        self.expect_symbol(")")
        op = self.peek()
        role = _ROLE_BY_SPELLING.get(op.text) if op.kind == "symbol" else None
        if role is None:
            raise self.fail("expected a prefix operator (<<, >>, (+), (-) or (.))")
        self.advance()
        target = self.expect_ident("species name")
        if stoich < 1:
            self.error(stoich_span, "stoichiometric coefficient must be at least 1")
        if target.text != species:
            self.error(
                target.span,
                f"species {species} must return to itself, found {target.text}",
            )
        return Prefix(action.text, stoich, role)

    def system_decl(self) -> None:
        kw = self.advance()
        self.expect_symbol("=")
        tree = self.composition()
        self.expect_symbol(";")
        if self.tree is not None:
            self.error(kw.span, "duplicate system declaration")
            return
        self.tree = tree
        self.tree_span = kw.span

    def composition(self) -> Leaf | Node:
        node = self.comp_primary()
        while True:
            coop = self.coop_operator()
            if coop is _NO_COOP:
                return node
            node = Node(node, coop, self.comp_primary())

    def coop_operator(self) -> frozenset[str] | None | object:
        if self.at_symbol("<*>"):
            self.advance()
            return None
        if self.at_symbol("<"):
            self.advance()
            names: set[str] = set()
            if not self.at_symbol(">"):
                names.add(self.expect_ident("action name").text)
                while self.at_symbol(","):
                    self.advance()
                    names.add(self.expect_ident("action name").text)
            self.expect_symbol(">")
            return frozenset(names)
        return _NO_COOP

    def comp_primary(self) -> Leaf | Node:
        if self.at_symbol("("):
            self.advance()
            inner = self.composition()
            self.expect_symbol(")")
            return inner
        name = self.expect_ident("species name")
        self.expect_symbol("[")
        level, _ = self.expect_int("initial level")
        self.expect_symbol("]")
        return Leaf(name.text, level)

    def param_decl(self) -> None:
        self.advance()
        name = self.expect_ident("parameter name")
        self.expect_symbol("=")
        value = self.expect_string()
        self.expect_symbol(";")
        if name.text in self.params:
            self.error(name.span, f"duplicate param declaration for {name.text}")
            return
        self.params[name.text] = value.text

    def rate_decl(self) -> None:
        self.advance()
        name = self.expect_ident("rate name")
        self.expect_symbol("=")
        value = self.expect_string()
        self.expect_symbol(";")
        if name.text in self.rates:
            self.error(name.span, f"duplicate rate declaration for {name.text}")
            return
        self.rates[name.text] = value.text

    # assembly -----------------------------------------------------------

    def assemble(self) -> SystemDef:
        eof = self.tokens[-1].span
        defs: list[SpeciesDef] = []
        declared: set[str] = set()
        for name, prefixes, span in self.species:
            declared.add(name)
            entry = self.maxes.get(name)
            if entry is None:
                self.error(span, f"missing max declaration for species {name}")
                continue
            defs.append(SpeciesDef(name, prefixes, entry[0]))
        for name, (_, span) in self.maxes.items():
            if name not in declared:
                self.error(span, f"max declared for unknown species {name}")
        if self.tree is None:
            self.error(eof, "missing system declaration")
        if self.diagnostics:
            raise ParseError(self.diagnostics)
        assert self.tree is not None
        sys = SystemDef(
            species=tuple(defs),
            tree=self.tree,
            step_size=self.step if self.step is not None else 1,
            params=self.params,
            rates=self.rates,
        )
        span_by_species = {name: span for name, _, span in self.species}
        for problem in validate_system(sys):
            span = self.tree_span or eof
            for name, sp in span_by_species.items():
                if f"({name})" in problem:
                    span = sp
                    break
            self.error(span, problem)
        if self.diagnostics:
            raise ParseError(self.diagnostics)
        return sys


class _Recover(Exception):
    """Internal: abandon the current declaration and resynchronise."""


_NO_COOP = object()


def parse_model(text: str) -> SystemDef:
    """Parse and validate a model file; raises ParseError with positioned
    diagnostics on any syntax or well-definedness problem."""
    return _ModelParser(text).parse()


def parse_config(text: str) -> EquivConfig:
    """Parse an equivalence-configuration file.

    Unknown keys, malformed lines, actions listed as both fast and slow,
    and conflicting aliases are reported with line positions.  Checks that
    need the models themselves (delta names, alias sources) live with the
    equivalence checker.
    """
    fast: set[str] = set()
    slow: set[str] = set()
    delta: set[str] = set()
    aliases: dict[str, str] = {}
    diagnostics: list[Diagnostic] = []

    def span_for(line_no: int, line: str) -> SourceSpan:
        offset = sum(len(l) + 1 for l in text.split("\n")[: line_no - 1])
        return SourceSpan(line_no, 1, offset, offset + len(line))

    def is_name(token: str) -> bool:
        return (
            token != ""
            and token[0].isalpha()
            and all(c.isalnum() or c in "_'" for c in token)
        )

    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep or key not in ("fast", "slow", "delta", "alias"):
            diagnostics.append(
                Diagnostic(span_for(line_no, raw), f"unrecognised configuration line: {line!r}")
            )
            continue
        if key == "alias":
            source, eq, target = rest.partition("=")
            source, target = source.strip(), target.strip()
            if not eq or not is_name(source) or not is_name(target):
                diagnostics.append(
                    Diagnostic(span_for(line_no, raw), "alias lines look like: alias: X' = X")
                )
                continue
            if source in aliases and aliases[source] != target:
                diagnostics.append(
                    Diagnostic(span_for(line_no, raw), f"conflicting alias for {source}")
                )
                continue
            aliases[source] = target
            continue
        names = [part.strip() for part in rest.split(",") if part.strip()]
        bad = [n for n in names if not is_name(n)]
        if bad:
            diagnostics.append(
                Diagnostic(span_for(line_no, raw), f"invalid name {bad[0]!r}")
            )
            continue
        {"fast": fast, "slow": slow, "delta": delta}[key].update(names)

    for action in sorted(fast & slow):
        diagnostics.append(
            Diagnostic(
                SourceSpan(1, 1, 0, 0), f"action-in-both-classes({action})"
            )
        )
    if diagnostics:
        raise ParseError(diagnostics)
    return EquivConfig(frozenset(fast), frozenset(slow), frozenset(delta), aliases)


def render_species(sdef: SpeciesDef) -> str:
    body = " + ".join(
        f"({p.action},{p.stoich}) {p.role.value} {sdef.name}" for p in sdef.prefixes
    )
    return f"species {sdef.name} = {body};"


def _render_tree(tree: Leaf | Node) -> str:
    if isinstance(tree, Leaf):
        return f"{tree.species}[{tree.level}]"
    left = _render_tree(tree.left)
    right = _render_tree(tree.right)
    if isinstance(tree.right, Node):
        right = f"({right})"
    if tree.coop is None:
        op = "<*>"
    else:
        op = "<{}>".format(",".join(sorted(tree.coop)))
    return f"{left} {op} {right}"


def render_model(sys: SystemDef) -> str:
    """Canonical text for a model; re-parses to an identical SystemDef."""
    lines = [f"step = {sys.step_size};"]
    for sdef in sys.species:
        lines.append(f"max {sdef.name} = {sdef.max_count};")
        lines.append(render_species(sdef))
    for kind, table in (("param", sys.params), ("rate", sys.rates)):
        for name, value in table.items():
            if '"' in value or "\n" in value:
                raise ValueError(
                    f"{kind} {name} contains a quote or newline and cannot be rendered"
                )
            lines.append(f'{kind} {name} = "{value}";')
    lines.append(f"system = {_render_tree(sys.tree)};")
    return "\n".join(lines) + "\n"


def render_config(cfg: EquivConfig) -> str:
    """Canonical text for a configuration; re-parses to an equal EquivConfig."""
    lines = []
    if cfg.fast:
        lines.append("fast: " + ", ".join(sorted(cfg.fast)))
    if cfg.slow:
        lines.append("slow: " + ", ".join(sorted(cfg.slow)))
    if cfg.delta:
        lines.append("delta: " + ", ".join(sorted(cfg.delta)))
    for source in sorted(cfg.aliases):
        lines.append(f"alias: {source} = {cfg.aliases[source]}")
    return "\n".join(lines) + "\n"
