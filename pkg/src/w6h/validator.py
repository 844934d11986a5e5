"""Coded diagnostics over a workspace."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Optional

from .interrogatives import DependencyRuleSet, Interrogative, standard_rules, unmet_groups, validate_rules
from .model import PerspectiveRow, Snapshot, ViewSlice, Workspace, populated, verb_string


class Severity(enum.Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


class UnknownCode(KeyError):
    pass


# code -> (name, severity, explanation)
REGISTRY: dict[str, tuple[str, Severity, str]] = {
    "E001": ("DependencyViolation", Severity.ERROR,
             "A populated cell answers an interrogative whose prerequisite interrogatives are "
             "not answered in the same view. Interrogatives have a precedence: how needs what "
             "plus one of which/where, why needs what and how, when needs how and why. Populate "
             "at least one prerequisite interrogative from every unmet group."),
    "E002": ("DanglingReference", Severity.ERROR,
             "A which-column link names an artifact that is not declared anywhere in the view."),
    "E003": ("CrudVerbPlacement", Severity.ERROR,
             "CRUD verbs are only meaningful on links from a how (function) artifact to a what "
             "(data entity) artifact. Other links are plain selections and carry no verbs."),
    "E004": ("DuplicateName", Severity.ERROR,
             "Two artifacts in the same view share a name; links could not tell them apart."),
    "E005": ("IterationOrder", Severity.ERROR,
             "Iteration numbers must increase strictly through the workspace."),
    "E006": ("UnknownBacklogItem", Severity.ERROR,
             "A sprint selects an item that is not in the product backlog."),
    "E007": ("UnknownSprint", Severity.ERROR,
             "A release selects a sprint that is not declared in the plan."),
    "W101": ("EmptyCell", Severity.WARNING,
             "A view leaves an interrogative unanswered. Holistic completeness asks for every "
             "one of the 42 cells (6 views x 7 interrogatives) to be populated."),
    "W102": ("SelectionWithoutLinks", Severity.WARNING,
             "The which cell is populated but the view declares no selection links, so the "
             "selection does not connect anything."),
    "W103": ("EntityNeverCreated", Severity.WARNING,
             "No function creates this data entity (no C in its CRUD column)."),
    "W104": ("EntityNeverRead", Severity.WARNING,
             "No function reads this data entity (no R in its CRUD column)."),
    "W105": ("FunctionWithoutData", Severity.WARNING,
             "This function touches no data entity (its CRUD row is empty)."),
    "W106": ("SharedBacklogItem", Severity.WARNING,
             "A backlog item is assigned to more than one sprint."),
}


def explain(code: str) -> str:
    try:
        name, severity, text = REGISTRY[code]
    except KeyError:
        raise UnknownCode(code) from None
    return f"{code} {name} ({severity.value.lower()}): {text}"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    iteration: Optional[int] = None
    row: Optional[PerspectiveRow] = None
    interrogative: Optional[Interrogative] = None
    artifact: Optional[str] = None
    # plan diagnostics have no row; they are located by sprint/release name instead
    context: Optional[str] = None
    severity: Severity = field(init=False)

    def __post_init__(self) -> None:
        if self.code not in REGISTRY:
            raise UnknownCode(self.code)
        if self.artifact is not None and self.interrogative is None and self.row is not None:
            raise ValueError("artifact location requires an interrogative")
        object.__setattr__(self, "severity", REGISTRY[self.code][1])

    @property
    def location(self) -> str:
        if self.context is not None:
            parts = ["plan", self.context]
        else:
            parts = [str(self.iteration) if self.iteration is not None else "-",
                     self.row.keyword if self.row else "-",
                     self.interrogative.keyword if self.interrogative else "-"]
        if self.artifact is not None:
            parts.append(self.artifact)
        return ":".join(parts)

    def sort_key(self) -> tuple:
        return (
            self.iteration if self.iteration is not None else 0,
            int(self.row) if self.row is not None else 0,
            int(self.interrogative) if self.interrogative is not None else 0,
            self.code,
            self.artifact or "",
            self.context or "",
        )

    def render(self) -> str:
        return f"{self.severity.value} {self.code} {self.location} {self.message}"


@dataclass(frozen=True)
class Profile:
    rules: DependencyRuleSet = field(default_factory=standard_rules)
    strict: bool = False

    def __post_init__(self) -> None:
        findings = validate_rules(self.rules)
        if findings:
            raise ValueError("invalid rule set: " + "; ".join(findings))


def _fmt_group(group: frozenset) -> str:
    return "{" + ", ".join(q.keyword for q in sorted(group)) + "}"


def check_slice(slice_: ViewSlice, rules: DependencyRuleSet, iteration: int) -> list[Diagnostic]:
    from .derivations import crud_findings, derive_crud

    W = Interrogative
    row = slice_.row
    out: list[Diagnostic] = []
    answered = populated(slice_)
    for q in sorted(answered):
        unmet = unmet_groups(q, answered, rules)
        if unmet:
            out.append(Diagnostic(
                "E001", f"{q.keyword} is populated but prerequisite groups are unmet: "
                + ", ".join(_fmt_group(g) for g in unmet),
                iteration, row, q))
    for q in W:
        if q not in answered:
            out.append(Diagnostic("W101", f"{q.keyword} cell is empty", iteration, row, q))

    where = {a.name: c.address[1] for c in slice_.cells for a in c.artifacts}
    for link in slice_.links:
        for end in link.pair:
            if end not in where:
                out.append(Diagnostic("E002", f"link {link.subject} -> {link.object} references "
                                      f"undeclared artifact {end}", iteration, row, W.WHICH, end))
        resolved = all(end in where for end in link.pair)
        if link.verbs and resolved and (where.get(link.subject), where.get(link.object)) != (W.HOW, W.WHAT):
            out.append(Diagnostic(
                "E003", f"CRUD verbs [{verb_string(link.verbs)}] on {link.subject} -> {link.object}; "
                "verbs are restricted to how -> what links",
                iteration, row, W.WHICH, f"{link.subject}->{link.object}"))
    if W.WHICH in answered and not slice_.links:
        out.append(Diagnostic("W102", "which cell is populated but the view has no links",
                              iteration, row, W.WHICH))
    # CRUD hygiene only applies once the view uses verbs at all
    if any(link.verbs for link in slice_.links):
        for d in crud_findings(derive_crud(slice_)):
            out.append(replace(d, iteration=iteration, row=row))
    return out


def check_snapshot(snap: Snapshot, rules: DependencyRuleSet) -> list[Diagnostic]:
    out = []
    for slice_ in snap.slices:
        out.extend(check_slice(slice_, rules, snap.iteration))
    return out


def _dedupe_sorted(diags: list[Diagnostic]) -> list[Diagnostic]:
    seen = set()
    out = []
    for d in sorted(diags, key=Diagnostic.sort_key):
        key = (d.location, d.code)
        if key not in seen:
            seen.add(key)
            out.append(d)
    return out


def validate(ws: Workspace, profile: Optional[Profile] = None) -> list[Diagnostic]:
    """Run every check; the result is sorted by location then code and free of repeats."""
    from .derivations import validate_plan

    profile = profile or Profile()
    diags: list[Diagnostic] = []
    for snap in ws.snapshots:
        diags.extend(check_snapshot(snap, profile.rules))
    if ws.plan is not None:
        diags.extend(validate_plan(ws.plan))
    return _dedupe_sorted(diags)


def has_errors(diags: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diags)


def exit_status(diags: list[Diagnostic], profile: Profile) -> int:
    if has_errors(diags):
        return 1
    if profile.strict and diags:
        return 1
    return 0


def render(diags: list[Diagnostic]) -> str:
    return "".join(d.render() + "\n" for d in diags)
