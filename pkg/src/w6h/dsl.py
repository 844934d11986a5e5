"""The ``.w6h`` text format: lexer, recursive-descent parser, printer, JSON export.

::

    model "Acme"
    plan {
      backlog { item a item b }
      sprint S1 { a }
      release R1 { S1 }
    }
    iteration 1 label "AS-IS"
      view designer {
        what { item Customer kind "entity" "Someone who buys" }
        how { item PlaceOrder }
        which { link PlaceOrder -> Customer [R] "looks up buyer" }
      }
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterator, Optional

from .interrogatives import Interrogative
from .model import (
    Artifact,
    BacklogPlan,
    CrudVerb,
    PerspectiveRow,
    SelectionLink,
    Snapshot,
    SourceSpan,
    ViewSlice,
    Workspace,
    verb_string,
)

P_SYNTAX = "P001"
P_KEYWORD = "P002"
P_VERB = "P003"
P_DUPLICATE = "P004"
P_ITERATION = "P005"

TOP_KEYWORDS = ("model", "iteration", "plan")


@dataclass(frozen=True)
class ParseError:
    code: str
    span: SourceSpan
    message: str

    def __str__(self) -> str:
        return f"{self.span}: {self.code} {self.message}"


class ParseErrors(Exception):
    def __init__(self, errors: list[ParseError]) -> None:
        self.errors = sorted(errors, key=lambda e: (e.span.line, e.span.column, e.code))
        super().__init__("\n".join(str(e) for e in self.errors))


class _Abort(Exception):
    pass


@dataclass(frozen=True)
class Token:
    kind: str
    value: object
    text: str
    span: SourceSpan


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<int>[0-9]+(?![A-Za-z_]))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<arrow>->)
  | (?P<punct>[{}\[\],])
""", re.VERBOSE)


def tokenize(text: str, file: str = "<input>") -> Iterator[Token]:
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        span = SourceSpan(file, line, pos - line_start + 1)
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos] == '"':
                raise ParseErrors([ParseError(P_SYNTAX, span, "unterminated string")])
            raise ParseErrors([ParseError(P_SYNTAX, span, f"unexpected character {text[pos]!r}")])
        kind, lexeme = m.lastgroup, m.group()
        pos = m.end()
        if kind == "nl":
            line, line_start = line + 1, pos
            continue
        if kind in ("ws", "comment"):
            continue
        if kind == "string":
            try:
                value: object = json.loads(lexeme)
            except json.JSONDecodeError:
                raise ParseErrors([ParseError(P_SYNTAX, span, "invalid escape in string")]) from None
        elif kind == "int":
            value = int(lexeme)
        elif kind == "punct":
            kind, value = lexeme, lexeme
        else:
            value = lexeme
        yield Token(kind, value, lexeme, span)
    yield Token("eof", None, "", SourceSpan(file, line, pos - line_start + 1))


def _describe(tok: Token) -> str:
    return "end of input" if tok.kind == "eof" else repr(tok.text)


class _Parser:
    def __init__(self, text: str, file: str) -> None:
        self.tokens = list(tokenize(text, file))
        self.pos = 0
        self.errors: list[ParseError] = []

    # token helpers

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, code: str, tok: Token, message: str) -> None:
        self.errors.append(ParseError(code, tok.span, message))

    def fail(self, code: str, tok: Token, message: str):
        self.error(code, tok, message)
        raise _Abort

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(P_SYNTAX, tok, f"expected {what}, found {_describe(tok)}")
        return self.advance()

    def at_word(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.value == word

    def expect_word(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind == "ident" and tok.value != word:
            self.fail(P_KEYWORD, tok, f"unknown keyword {tok.text!r}, expected {word!r}")
        if tok.kind != "ident":
            self.fail(P_SYNTAX, tok, f"expected {word!r}, found {_describe(tok)}")
        return self.advance()

    def optional_string(self) -> Optional[str]:
        if self.peek().kind == "string":
            return self.advance().value
        return None

    # grammar

    def workspace(self) -> Workspace:
        self.expect_word("model")
        name = self.expect("string", "model name string").value
        snapshots: list[Snapshot] = []
        plan: Optional[BacklogPlan] = None
        plan_tok: Optional[Token] = None
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                break
            if self.at_word("iteration"):
                snap = self.iteration(snapshots[-1].iteration if snapshots else None)
                if snap is not None:
                    snapshots.append(snap)
            elif self.at_word("plan"):
                parsed = self.plan()
                if plan_tok is not None:
                    self.error(P_DUPLICATE, tok, f"duplicate plan block (first at {plan_tok.span})")
                else:
                    plan, plan_tok = parsed, tok
            elif tok.kind == "ident":
                self.fail(P_KEYWORD, tok, f"unknown keyword {tok.text!r}")
            else:
                self.fail(P_SYNTAX, tok, f"expected 'iteration' or 'plan', found {_describe(tok)}")
        return Workspace(name, tuple(snapshots), plan)

    def iteration(self, last: Optional[int]) -> Optional[Snapshot]:
        head = self.advance()
        num_tok = self.expect("int", "iteration number")
        number = num_tok.value
        ok = True
        if number < 1:
            self.error(P_SYNTAX, num_tok, "iteration number must be positive")
            ok = False
        elif last is not None and number <= last:
            self.error(P_ITERATION, num_tok, f"iteration {number} must exceed previous iteration {last}")
            ok = False
        label = None
        if self.at_word("label"):
            self.advance()
            label = self.expect("string", "label string").value
        slices = {row: ViewSlice.empty(row) for row in PerspectiveRow}
        seen_views: dict[PerspectiveRow, Token] = {}
        while self.at_word("view"):
            self.advance()
            row_tok = self.peek()
            row = self.view_name()
            parsed = self.view_body(row)
            if row in seen_views:
                self.error(P_DUPLICATE, row_tok,
                           f"duplicate view {row.keyword} (first at {seen_views[row].span})")
            else:
                seen_views[row] = row_tok
                slices[row] = parsed
        tok = self.peek()
        if tok.kind == "ident" and tok.value not in TOP_KEYWORDS:
            self.fail(P_KEYWORD, tok, f"unknown keyword {tok.text!r}")
        if tok.kind != "eof" and tok.kind != "ident":
            self.fail(P_SYNTAX, tok, f"expected 'view', found {_describe(tok)}")
        if not ok:
            return None
        return Snapshot(number, label, tuple(slices[r] for r in PerspectiveRow), span=head.span)

    def view_name(self) -> PerspectiveRow:
        tok = self.peek()
        if tok.kind != "ident":
            self.fail(P_SYNTAX, tok, f"expected view name, found {_describe(tok)}")
        try:
            row = PerspectiveRow.from_keyword(tok.value) if tok.value.islower() else None
        except ValueError:
            row = None
        if row is None:
            self.fail(P_KEYWORD, tok, f"unknown view {tok.text!r}")
        self.advance()
        return row

    def column_name(self) -> Interrogative:
        tok = self.peek()
        if tok.kind != "ident":
            self.fail(P_SYNTAX, tok, f"expected column name or '}}', found {_describe(tok)}")
        try:
            q = Interrogative.from_keyword(tok.value) if tok.value.islower() else None
        except ValueError:
            q = None
        if q is None:
            self.fail(P_KEYWORD, tok, f"unknown column {tok.text!r}")
        self.advance()
        return q

    def view_body(self, row: PerspectiveRow) -> ViewSlice:
        self.expect("{", "'{'")
        cells: dict[Interrogative, list[Artifact]] = {q: [] for q in Interrogative}
        links: list[SelectionLink] = []
        declared: dict[str, Artifact] = {}
        while self.peek().kind != "}":
            q = self.column_name()
            self.expect("{", "'{'")
            while self.peek().kind != "}":
                tok = self.peek()
                if self.at_word("item"):
                    self.advance()
                    art = self.item()
                    if art.name in declared:
                        self.errors.append(ParseError(
                            P_DUPLICATE, art.span,
                            f"duplicate name {art.name} in view {row.keyword} "
                            f"(first declared at {declared[art.name].span})"))
                    else:
                        declared[art.name] = art
                        cells[q].append(art)
                elif self.at_word("link"):
                    self.advance()
                    link = self.link(tok)
                    if q is not Interrogative.WHICH:
                        self.error(P_SYNTAX, tok, f"links are only allowed in the which column, not {q.keyword}")
                    elif link is not None:
                        links.append(link)
                elif tok.kind == "ident":
                    self.fail(P_KEYWORD, tok, f"unknown keyword {tok.text!r}")
                else:
                    self.fail(P_SYNTAX, tok, f"expected 'item', 'link' or '}}', found {_describe(tok)}")
            self.advance()
        self.advance()
        return ViewSlice.build(row, cells, links)

    def item(self) -> Artifact:
        name_tok = self.expect("ident", "artifact name")
        kind = None
        if self.at_word("kind") and self.tokens[self.pos + 1].kind == "string":
            self.advance()
            kind = self.advance().value
        description = self.optional_string()
        return Artifact(name_tok.value, kind, description, span=name_tok.span)

    def link(self, head: Token) -> Optional[SelectionLink]:
        subject = self.expect("ident", "link subject")
        self.expect("arrow", "'->'")
        obj = self.expect("ident", "link object")
        verbs: set[CrudVerb] = set()
        if self.peek().kind == "[":
            self.advance()
            while True:
                tok = self.expect("ident", "CRUD verb")
                if tok.value in ("C", "R", "U", "D"):
                    verbs.add(CrudVerb(tok.value))
                else:
                    self.error(P_VERB, tok, f"bad CRUD verb {tok.text!r}, expected one of C, R, U, D")
                if self.peek().kind == ",":
                    self.advance()
                    continue
                self.expect("]", "',' or ']'")
                break
        note = self.optional_string()
        if subject.value == obj.value:
            self.error(P_SYNTAX, obj, f"link from {subject.value} to itself")
            return None
        return SelectionLink(subject.value, obj.value, frozenset(verbs), note, span=head.span)

    def name_block(self, what: str, keyword: Optional[str] = None) -> tuple[str, ...]:
        self.expect("{", "'{'")
        names: list[str] = []
        seen: dict[str, Token] = {}
        while self.peek().kind != "}":
            if keyword is not None:
                self.expect_word(keyword)
            tok = self.expect("ident", f"{what} name or '}}'")
            if tok.value in seen:
                self.error(P_DUPLICATE, tok, f"duplicate {what} {tok.value} (first at {seen[tok.value].span})")
                continue
            seen[tok.value] = tok
            names.append(tok.value)
        self.advance()
        return tuple(names)

    def plan(self) -> BacklogPlan:
        self.advance()
        self.expect("{", "'{'")
        backlog: list[str] = []
        groups: dict[str, dict[str, tuple[str, ...]]] = {"sprint": {}, "release": {}}
        spans: dict[tuple[str, str], Token] = {}
        while self.peek().kind != "}":
            tok = self.peek()
            if self.at_word("backlog"):
                self.advance()
                for name in self.name_block("backlog item", keyword="item"):
                    if name in backlog:
                        self.error(P_DUPLICATE, tok, f"duplicate backlog item {name}")
                    else:
                        backlog.append(name)
            elif self.at_word("sprint") or self.at_word("release"):
                section = self.advance().value
                name_tok = self.expect("ident", f"{section} name")
                members = self.name_block("sprint" if section == "release" else "item")
                key = (section, name_tok.value)
                if key in spans:
                    self.error(P_DUPLICATE, name_tok,
                               f"duplicate {section} {name_tok.value} (first at {spans[key].span})")
                else:
                    spans[key] = name_tok
                    groups[section][name_tok.value] = members
            elif tok.kind == "ident":
                self.fail(P_KEYWORD, tok, f"unknown keyword {tok.text!r}")
            else:
                self.fail(P_SYNTAX, tok, f"expected 'backlog', 'sprint', 'release' or '}}', found {_describe(tok)}")
        self.advance()
        return BacklogPlan(tuple(backlog), tuple(groups["sprint"].items()),
                           tuple(groups["release"].items()))


def parse(text: str, file: str = "<input>") -> Workspace:
    """Parse ``.w6h`` source. Raises :class:`ParseErrors` holding every error found."""
    parser = _Parser(text, file)
    try:
        ws = parser.workspace()
    except _Abort:
        ws = None
    if parser.errors:
        raise ParseErrors(parser.errors)
    return ws


def parse_file(path) -> Workspace:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), str(path))


def _quote(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def print_workspace(ws: Workspace) -> str:
    out = [f"model {_quote(ws.name)}"]
    if ws.plan is not None:
        out.extend(_print_plan(ws.plan))
    for snap in ws.snapshots:
        out.append("")
        head = f"iteration {snap.iteration}"
        if snap.label is not None:
            head += f" label {_quote(snap.label)}"
        out.append(head)
        for slice_ in snap.slices:
            if slice_.is_empty():
                continue
            out.append(f"  view {slice_.row.keyword} {{")
            for cell in slice_.cells:
                q = cell.address[1]
                links = slice_.links if q is Interrogative.WHICH else ()
                if not cell.artifacts and not links:
                    continue
                out.append(f"    {q.keyword} {{")
                for a in cell.artifacts:
                    line = f"      item {a.name}"
                    if a.kind is not None:
                        line += f" kind {_quote(a.kind)}"
                    if a.description is not None:
                        line += f" {_quote(a.description)}"
                    out.append(line)
                for link in links:
                    line = f"      link {link.subject} -> {link.object}"
                    if link.verbs:
                        line += " [" + ", ".join(verb_string(link.verbs)) + "]"
                    if link.note is not None:
                        line += f" {_quote(link.note)}"
                    out.append(line)
                out.append("    }")
            out.append("  }")
    return "\n".join(out) + "\n"


def _print_plan(plan: BacklogPlan) -> list[str]:
    out = ["plan {"]
    out.append("  backlog {" + "".join(f" item {n}" for n in plan.backlog) + " }")
    for name, items in plan.sprints:
        out.append(f"  sprint {name} {{" + "".join(f" {i}" for i in items) + " }")
    for name, sprints in plan.releases:
        out.append(f"  release {name} {{" + "".join(f" {s}" for s in sprints) + " }")
    out.append("}")
    return out


def artifact_doc(a: Artifact) -> dict:
    doc: dict = {"name": a.name}
    if a.kind is not None:
        doc["kind"] = a.kind
    if a.description is not None:
        doc["description"] = a.description
    return doc


def link_doc(link: SelectionLink) -> dict:
    doc: dict = {
        "subject": link.subject,
        "object": link.object,
        "verbs": list(verb_string(link.verbs)),
    }
    if link.note is not None:
        doc["note"] = link.note
    return doc


def _view_doc(slice_: ViewSlice) -> dict:
    return {
        "row": slice_.row.keyword,
        "cells": [
            {"interrogative": c.address[1].keyword,
             "artifacts": [artifact_doc(a) for a in c.artifacts]}
            for c in slice_.cells if c.artifacts
        ],
        "links": [link_doc(l) for l in slice_.links],
    }


def snapshot_doc(snap: Snapshot) -> dict:
    doc: dict = {"iteration": snap.iteration}
    if snap.label is not None:
        doc["label"] = snap.label
    doc["views"] = [_view_doc(s) for s in snap.slices if not s.is_empty()]
    return doc


def workspace_doc(ws: Workspace) -> dict:
    doc: dict = {
        "w6hVersion": 1,
        "name": ws.name,
        "snapshots": [snapshot_doc(s) for s in ws.snapshots],
    }
    if ws.plan is not None:
        doc["plan"] = {
            "backlog": list(ws.plan.backlog),
            "sprints": [{"name": n, "items": list(i)} for n, i in ws.plan.sprints],
            "releases": [{"name": n, "sprints": list(s)} for n, s in ws.plan.releases],
        }
    return doc


def export_interchange(ws: Workspace) -> str:
    return json.dumps(workspace_doc(ws), indent=2, ensure_ascii=False) + "\n"


def load_interchange(text: str) -> Workspace:
    """Inverse of :func:`export_interchange`."""
    doc = json.loads(text)
    snaps = []
    for s in doc["snapshots"]:
        slices = {row: ViewSlice.empty(row) for row in PerspectiveRow}
        for v in s["views"]:
            row = PerspectiveRow.from_keyword(v["row"])
            cells = {
                Interrogative.from_keyword(c["interrogative"]):
                    [Artifact(a["name"], a.get("kind"), a.get("description")) for a in c["artifacts"]]
                for c in v["cells"]
            }
            links = [SelectionLink(l["subject"], l["object"], frozenset(l["verbs"]), l.get("note"))
                     for l in v["links"]]
            slices[row] = ViewSlice.build(row, cells, links)
        snaps.append(Snapshot(s["iteration"], s.get("label"), tuple(slices.values())))
    plan = None
    if "plan" in doc:
        p = doc["plan"]
        plan = BacklogPlan(tuple(p["backlog"]),
                           tuple((x["name"], tuple(x["items"])) for x in p["sprints"]),
                           tuple((x["name"], tuple(x["sprints"])) for x in p["releases"]))
    return Workspace(doc["name"], tuple(snaps), plan)
