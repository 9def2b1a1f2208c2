"""Reader and writer for ground programs, policy files and instance files.

Program syntax, one statement per line in canonical form::

    %! subclass: k10          (instance header, before any rule)
    % comment
    t(0).
    u(0) :- t(0), not v(0).
    :- q, not s.
    1 {a(1), a(2), a(3)} 2 :- p.
    mu :- 3 {not a(1), not a(2), not a(3)}.

Policy files::

    dors-policy v1
    delta 1
    subclass k10
    c 0 2 occurs(move(down), 3)
    c 1 1 not occurs(noop, 9)
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, TextIO, Union

from .core import (
    CHOICE,
    CONSTRAINT,
    INF,
    NORMAL,
    Atom,
    CardinalityTest,
    ExtendedLiteral,
    Fn,
    GroundProgram,
    Literal,
    Rule,
)


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<header>%![^\n]*)
  | (?P<comment>%[^\n]*)
  | (?P<if>:-)
  | (?P<int>[0-9]+)
  | (?P<ident>[a-z_][A-Za-z0-9_]*)
  | (?P<punct>[(){},.\-])
    """,
    re.VERBOSE,
)

_HEADER_RE = re.compile(r"%!\s*subclass:\s*(\S+)\s*\Z")


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str):
    toks = []
    headers = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        col = i - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "header":
            hm = _HEADER_RE.match(m.group())
            if hm is None:
                raise ParseError("malformed directive", line, col)
            headers.append((hm.group(1), line, col, len(toks)))
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, col))
        i = m.end()
    toks.append(_Tok("eof", "", line, i - line_start + 1))
    return toks, headers


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str):
        raise ParseError(msg, self.tok.line, self.tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind != "eof":
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")

    def integer(self) -> int:
        if self.tok.kind != "int":
            self.error("expected integer")
        v = int(self.tok.text)
        self.i += 1
        return v

    def term(self):
        if self.tok.text == "-" and self.peek().kind == "int":
            self.i += 1
            return -self.integer()
        if self.tok.kind == "int":
            return self.integer()
        if self.tok.kind == "ident":
            name = self.tok.text
            self.i += 1
            if self.accept("("):
                return Fn(name, tuple(self.terms()))
            return name
        self.error("expected term")

    def terms(self):
        out = [self.term()]
        while self.accept(","):
            out.append(self.term())
        self.expect(")")
        return out

    def literal(self) -> Literal:
        strong = self.accept("-")
        if self.tok.kind != "ident" or self.tok.text == "not":
            self.error("expected literal")
        pred = self.tok.text
        self.i += 1
        args = tuple(self.terms()) if self.accept("(") else ()
        return Literal(Atom(pred, args), strong)

    def ext_literal(self) -> ExtendedLiteral:
        if self.tok.text == "not" and self.tok.kind == "ident":
            self.i += 1
            return ExtendedLiteral(self.literal(), True)
        return ExtendedLiteral(self.literal(), False)

    def body_element(self):
        if self.tok.kind == "int" or self.tok.text == "{":
            lower = self.integer() if self.tok.kind == "int" else 0
            line, col = self.tok.line, self.tok.col
            self.expect("{")
            elems = []
            if not self.accept("}"):
                elems.append(self.ext_literal())
                while self.accept(","):
                    elems.append(self.ext_literal())
                self.expect("}")
            if lower > len(elems):
                raise ParseError("malformed bounds: lower bound exceeds size", line, col)
            return CardinalityTest(lower, tuple(elems))
        return self.ext_literal()

    def body(self):
        out = [self.body_element()]
        while self.accept(","):
            out.append(self.body_element())
        return tuple(out)

    def statement(self) -> Rule:
        line, col = self.tok.line, self.tok.col
        if self.accept(":-"):
            body = self.body()
            self.expect(".")
            return Rule(CONSTRAINT, (), body)
        if self.tok.kind == "int" or self.tok.text == "{":
            lower = self.integer() if self.tok.kind == "int" else 0
            self.expect("{")
            heads = []
            if not self.accept("}"):
                heads.append(self.literal())
                while self.accept(","):
                    heads.append(self.literal())
                self.expect("}")
            upper = self.integer() if self.tok.kind == "int" else INF
            body = self.body() if self.accept(":-") else ()
            self.expect(".")
            if lower > upper or (upper != INF and upper > len(heads)):
                raise ParseError(f"malformed bounds {lower}..{upper}", line, col)
            return Rule(CHOICE, tuple(heads), body, lower, upper)
        head = self.literal()
        body = self.body() if self.accept(":-") else ()
        self.expect(".")
        return Rule(NORMAL, (head,), body)


def parse_program(text: Union[str, TextIO]) -> GroundProgram:
    if not isinstance(text, str):
        text = text.read()
    toks, headers = _tokenize(text)
    subclass = None
    if headers:
        label, line, col, tok_index = headers[0]
        if tok_index != 0:
            raise ParseError("subclass directive must precede all rules", line, col)
        if len(headers) > 1:
            _, line, col, _ = headers[1]
            raise ParseError("duplicate subclass directive", line, col)
        subclass = label
    p = _Parser(toks)
    rules = []
    while p.tok.kind != "eof":
        rules.append(p.statement())
    return GroundProgram(tuple(rules), subclass)


def parse_literal(text: str) -> Literal:
    toks, _ = _tokenize(text)
    p = _Parser(toks)
    l = p.literal()
    if p.tok.kind != "eof":
        p.error("trailing input after literal")
    return l


def parse_ext_literal(text: str) -> ExtendedLiteral:
    toks, _ = _tokenize(text)
    p = _Parser(toks)
    e = p.ext_literal()
    if p.tok.kind != "eof":
        p.error("trailing input after literal")
    return e


def _render_body_element(b) -> str:
    if isinstance(b, CardinalityTest):
        return f"{b.lower} {{{', '.join(map(str, b.elements))}}}"
    return str(b)


def render_rule(r: Rule) -> str:
    body = ", ".join(_render_body_element(b) for b in r.body)
    if r.kind == CHOICE:
        head = f"{{{', '.join(map(str, r.head))}}}"
        if r.lower:
            head = f"{r.lower} {head}"
        if r.upper != INF:
            head = f"{head} {int(r.upper)}"
    elif r.kind == NORMAL:
        head = str(r.head[0])
    else:
        head = ""
    if not body:
        return f"{head}."
    return f"{head} :- {body}." if head else f":- {body}."


def render_program(p: GroundProgram) -> str:
    out = io.StringIO()
    if p.subclass is not None:
        out.write(f"%! subclass: {p.subclass}\n")
    for r in p.rules:
        out.write(render_rule(r))
        out.write("\n")
    return out.getvalue()


@dataclass(frozen=True)
class InstanceFile:
    path: Optional[Path]
    program: GroundProgram

    @property
    def subclass(self) -> str:
        return self.program.subclass

    @property
    def name(self) -> str:
        return self.path.stem if self.path is not None else "<memory>"


def read_instance(path: Union[str, Path]) -> InstanceFile:
    path = Path(path)
    prog = parse_program(path.read_text(encoding="utf-8"))
    if prog.subclass is None:
        raise ParseError("missing '%! subclass:' header", 1, 1)
    return InstanceFile(path, prog)


def write_instance(inst: InstanceFile, path: Union[str, Path]) -> InstanceFile:
    path = Path(path)
    path.write_text(render_program(inst.program), encoding="utf-8")
    return InstanceFile(path, inst.program)


# -- policy files -------------------------------------------------------------

POLICY_MAGIC = "dors-policy v1"


class PolicyFormatError(ValueError):
    pass


def write_policy(pol, out: TextIO) -> None:
    out.write(POLICY_MAGIC + "\n")
    out.write(f"delta {pol.delta}\n")
    for label in sorted(pol.tables):
        out.write(f"subclass {label}\n")
        rows = sorted(
            ((level, str(e), count) for (e, level), count in pol.tables[label].items())
        )
        for level, text, count in rows:
            out.write(f"c {level} {count} {text}\n")


def policy_to_text(pol) -> str:
    buf = io.StringIO()
    write_policy(pol, buf)
    return buf.getvalue()


def read_policy(src: Union[str, TextIO]):
    from .policy import Policy

    text = src if isinstance(src, str) else src.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != POLICY_MAGIC:
        found = lines[0] if lines else ""
        raise PolicyFormatError(f"version mismatch: expected {POLICY_MAGIC!r}, got {found!r}")
    if len(lines) < 2 or not re.fullmatch(r"delta [1-9][0-9]*", lines[1]):
        raise PolicyFormatError("line 2: expected 'delta <positive integer>'")
    delta = int(lines[1].split()[1])
    tables: dict = {}
    current = None
    for n, line in enumerate(lines[2:], start=3):
        if line.startswith("subclass "):
            current = line[len("subclass "):]
            if not current or " " in current or current in tables:
                raise PolicyFormatError(f"line {n}: bad subclass line")
            tables[current] = {}
            continue
        m = re.fullmatch(r"c (0|[1-9][0-9]*) ([1-9][0-9]*) (.+)", line)
        if m is None or current is None:
            raise PolicyFormatError(f"line {n}: malformed count line {line!r}")
        try:
            e = parse_ext_literal(m.group(3))
        except ParseError as exc:
            raise PolicyFormatError(f"line {n}: {exc}") from None
        key = (e, int(m.group(1)))
        if key in tables[current]:
            raise PolicyFormatError(f"line {n}: duplicate entry")
        tables[current][key] = int(m.group(2))
    return Policy(delta, tables)


def save_policy(pol, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_policy(pol, fh)


def load_policy(path: Union[str, Path]):
    with open(path, encoding="utf-8") as fh:
        return read_policy(fh)
