"""Products built from which-selections: CRUD matrices, elicitation sessions, backlog plans."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .interrogatives import (
    DependencyRuleSet,
    Interrogative,
    is_answerable,
    next_questions,
    standard_rules,
)
from .model import (
    Artifact,
    BacklogPlan,
    CrudVerb,
    DuplicateName,
    PerspectiveRow,
    ViewSlice,
    verb_string,
)
from .validator import Diagnostic

__all__ = [
    "BacklogPlan",
    "CrudMatrix",
    "ElicitationSession",
    "NotAnswerable",
    "answer",
    "crud_findings",
    "derive_crud",
    "finish",
    "render_crud",
    "start_session",
    "validate_plan",
]


@dataclass(frozen=True)
class CrudMatrix:
    functions: tuple[str, ...] = ()
    entities: tuple[str, ...] = ()
    entries: Mapping[tuple[str, str], frozenset] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for (f, e), verbs in self.entries.items():
            if f not in self.functions or e not in self.entities:
                raise ValueError(f"entry ({f}, {e}) names an unlisted function or entity")
            if not verbs:
                raise ValueError(f"entry ({f}, {e}) has no verbs")

    def verbs(self, function: str, entity: str) -> frozenset:
        return self.entries.get((function, entity), frozenset())


def derive_crud(slice_: ViewSlice) -> CrudMatrix:
    W = Interrogative
    functions = slice_.cell(W.HOW).names
    entities = slice_.cell(W.WHAT).names
    entries: dict[tuple[str, str], frozenset] = {}
    for link in slice_.links:
        if link.verbs and link.subject in functions and link.object in entities:
            entries[link.pair] = entries.get(link.pair, frozenset()) | link.verbs
    return CrudMatrix(functions, entities, entries)


def crud_findings(m: CrudMatrix) -> list[Diagnostic]:
    W = Interrogative
    out = []
    for e in m.entities:
        column = frozenset().union(*(m.verbs(f, e) for f in m.functions))
        if CrudVerb.C not in column:
            out.append(Diagnostic("W103", f"entity {e} is never created", interrogative=W.WHAT, artifact=e))
        if CrudVerb.R not in column:
            out.append(Diagnostic("W104", f"entity {e} is never read", interrogative=W.WHAT, artifact=e))
    for f in m.functions:
        if not any(m.verbs(f, e) for e in m.entities):
            out.append(Diagnostic("W105", f"function {f} uses no data entity", interrogative=W.HOW, artifact=f))
    return out


def render_crud(m: CrudMatrix) -> str:
    lines = ["\t".join(("",) + m.entities)]
    for f in m.functions:
        lines.append("\t".join([f] + [verb_string(m.verbs(f, e)) or "-" for e in m.entities]))
    return "\n".join(lines) + "\n"


class NotAnswerable(ValueError):
    pass


@dataclass(frozen=True)
class ElicitationSession:
    row: PerspectiveRow
    rules: DependencyRuleSet = field(default_factory=standard_rules)
    answers: tuple[tuple[Interrogative, tuple[Artifact, ...]], ...] = ()

    @property
    def answered(self) -> frozenset:
        return frozenset(q for q, _ in self.answers)

    @property
    def order(self) -> tuple[Interrogative, ...]:
        return tuple(q for q, _ in self.answers)

    @property
    def askable(self) -> frozenset:
        return next_questions(self.answered, self.rules)

    @property
    def finished(self) -> bool:
        return len(self.answers) == len(Interrogative)


def start_session(row: PerspectiveRow, rules: DependencyRuleSet | None = None) -> ElicitationSession:
    return ElicitationSession(row, rules if rules is not None else standard_rules())


def answer(s: ElicitationSession, q: Interrogative, items: Iterable[Artifact]) -> ElicitationSession:
    if s.finished:
        raise NotAnswerable("session is finished")
    if q in s.answered:
        raise NotAnswerable(f"{q.keyword} is already answered")
    if not is_answerable(q, s.answered, s.rules):
        raise NotAnswerable(f"{q.keyword} is not answerable yet")
    items = tuple(items)
    taken = {a.name for _, arts in s.answers for a in arts}
    names = [a.name for a in items]
    clash = taken.intersection(names) or {n for n, c in Counter(names).items() if c > 1}
    if clash:
        raise DuplicateName("duplicate artifact names: " + ", ".join(sorted(clash)))
    return replace(s, answers=s.answers + ((q, items),))


def finish(s: ElicitationSession) -> ViewSlice:
    return ViewSlice.build(s.row, dict(s.answers))


def validate_plan(p: BacklogPlan) -> list[Diagnostic]:
    out = []
    backlog = set(p.backlog)
    sprint_names = {name for name, _ in p.sprints}
    for name, items in p.sprints:
        for item in items:
            if item not in backlog:
                out.append(Diagnostic("E006", f"sprint {name} selects {item}, which is not in the backlog",
                                      artifact=item, context=name))
    for name, sprints in p.releases:
        for sprint in sprints:
            if sprint not in sprint_names:
                out.append(Diagnostic("E007", f"release {name} selects unknown sprint {sprint}",
                                      artifact=sprint, context=name))
    assigned: dict[str, list[str]] = {}
    for name, items in p.sprints:
        for item in dict.fromkeys(items):
            assigned.setdefault(item, []).append(name)
    for item, sprints in assigned.items():
        if len(sprints) > 1:
            out.append(Diagnostic("W106", f"item {item} is assigned to sprints " + ", ".join(sprints),
                                  artifact=item, context="backlog"))
    return out
