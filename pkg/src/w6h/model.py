"""Workspace model: snapshots of six stakeholder views by seven interrogatives."""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

from .interrogatives import Interrogative

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class ModelError(ValueError):
    pass


class NotFound(ModelError, LookupError):
    pass


class DuplicateName(ModelError):
    pass


class IterationOrder(ModelError):
    pass


class PerspectiveRow(enum.IntEnum):
    SCOPE = 1
    OWNER = 2
    DESIGNER = 3
    BUILDER = 4
    SUBCONTRACTOR = 5
    FUNCTIONING = 6

    @property
    def keyword(self) -> str:
        return self.name.lower()

    @classmethod
    def from_keyword(cls, word: str) -> "PerspectiveRow":
        try:
            return cls[word.upper()]
        except KeyError:
            raise ValueError(f"unknown view: {word!r}") from None

    def __str__(self) -> str:
        return self.name.capitalize()


class CrudVerb(enum.Enum):
    C = "C"
    R = "R"
    U = "U"
    D = "D"

    @property
    def rank(self) -> int:
        return "CRUD".index(self.value)


def verb_string(verbs: Iterable[CrudVerb]) -> str:
    return "".join(v.value for v in sorted(verbs, key=lambda v: v.rank))


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Artifact:
    name: str
    kind: Optional[str] = None
    description: Optional[str] = None
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not IDENT_RE.match(self.name or ""):
            raise ModelError(f"invalid artifact name: {self.name!r}")


@dataclass(frozen=True)
class SelectionLink:
    subject: str
    object: str
    verbs: frozenset = frozenset()
    note: Optional[str] = None
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.subject == self.object:
            raise ModelError(f"link endpoints must differ: {self.subject}")
        object.__setattr__(self, "verbs", frozenset(CrudVerb(v) for v in self.verbs))

    @property
    def pair(self) -> tuple[str, str]:
        return (self.subject, self.object)


@dataclass(frozen=True)
class Cell:
    address: tuple[PerspectiveRow, Interrogative]
    artifacts: tuple[Artifact, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "artifacts", tuple(self.artifacts))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.artifacts)

    def __bool__(self) -> bool:
        return bool(self.artifacts)


@dataclass(frozen=True)
class ViewSlice:
    """One stakeholder row. Cells are stored in canonical interrogative order."""

    row: PerspectiveRow
    cells: tuple[Cell, ...]
    links: tuple[SelectionLink, ...] = ()

    def __post_init__(self) -> None:
        cells = tuple(self.cells)
        if [c.address for c in cells] != [(self.row, q) for q in Interrogative]:
            raise ModelError(f"{self.row} slice needs exactly one cell per interrogative")
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "links", tuple(self.links))
        seen: dict[str, Interrogative] = {}
        for cell in cells:
            for a in cell.artifacts:
                if a.name in seen:
                    raise DuplicateName(
                        f"{a.name} declared in both {seen[a.name].keyword} and "
                        f"{cell.address[1].keyword} of {self.row.keyword}"
                    )
                seen[a.name] = cell.address[1]

    @classmethod
    def build(cls, row: PerspectiveRow,
              artifacts: Mapping[Interrogative, Iterable[Artifact]] | None = None,
              links: Iterable[SelectionLink] = ()) -> "ViewSlice":
        artifacts = artifacts or {}
        cells = tuple(Cell((row, q), tuple(artifacts.get(q, ()))) for q in Interrogative)
        return cls(row, cells, tuple(links))

    @classmethod
    def empty(cls, row: PerspectiveRow) -> "ViewSlice":
        return cls.build(row)

    def cell(self, q: Interrogative) -> Cell:
        return self.cells[q - 1]

    def names(self) -> set[str]:
        return {a.name for c in self.cells for a in c.artifacts}

    def is_empty(self) -> bool:
        return not self.links and not any(self.cells)

    def with_cell(self, q: Interrogative, artifacts: Iterable[Artifact]) -> "ViewSlice":
        cells = list(self.cells)
        cells[q - 1] = Cell((self.row, q), tuple(artifacts))
        return replace(self, cells=tuple(cells))


def resolve(slice_: ViewSlice, name: str) -> tuple[Interrogative, Artifact]:
    for cell in slice_.cells:
        for a in cell.artifacts:
            if a.name == name:
                return cell.address[1], a
    raise NotFound(f"no artifact named {name!r} in {slice_.row.keyword}")


def populated(slice_: ViewSlice) -> frozenset:
    return frozenset(c.address[1] for c in slice_.cells if c.artifacts)


@dataclass(frozen=True)
class BacklogPlan:
    """Names-only Scrum plan: backlog items, sprints choosing items, releases choosing sprints."""

    backlog: tuple[str, ...] = ()
    sprints: tuple[tuple[str, tuple[str, ...]], ...] = ()
    releases: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "backlog", tuple(self.backlog))
        object.__setattr__(self, "sprints", tuple((n, tuple(i)) for n, i in self.sprints))
        object.__setattr__(self, "releases", tuple((n, tuple(s)) for n, s in self.releases))
        for kind, names in (("sprint", [n for n, _ in self.sprints]),
                            ("release", [n for n, _ in self.releases])):
            if len(set(names)) != len(names):
                raise DuplicateName(f"{kind} names must be unique")


@dataclass(frozen=True)
class Snapshot:
    iteration: int
    label: Optional[str] = None
    slices: tuple[ViewSlice, ...] = ()
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.iteration < 1:
            raise ModelError(f"iteration must be positive, got {self.iteration}")
        slices = tuple(self.slices) or tuple(ViewSlice.empty(r) for r in PerspectiveRow)
        if [s.row for s in slices] != list(PerspectiveRow):
            raise ModelError("snapshot needs exactly one slice per perspective row")
        object.__setattr__(self, "slices", slices)

    def slice(self, row: PerspectiveRow) -> ViewSlice:
        return self.slices[row - 1]

    def with_slice(self, new: ViewSlice) -> "Snapshot":
        slices = list(self.slices)
        slices[new.row - 1] = new
        return replace(self, slices=tuple(slices))


@dataclass(frozen=True)
class Workspace:
    name: str
    snapshots: tuple[Snapshot, ...] = ()
    plan: Optional[BacklogPlan] = None

    def __post_init__(self) -> None:
        snaps = tuple(self.snapshots)
        for prev, cur in zip(snaps, snaps[1:]):
            if cur.iteration <= prev.iteration:
                raise IterationOrder(
                    f"iteration {cur.iteration} does not follow iteration {prev.iteration}"
                )
        object.__setattr__(self, "snapshots", snaps)

    def snapshot(self, iteration: int) -> Snapshot:
        for s in self.snapshots:
            if s.iteration == iteration:
                return s
        raise NotFound(f"no iteration {iteration}")

    def latest(self) -> Snapshot:
        if not self.snapshots:
            raise NotFound("workspace has no iterations")
        return self.snapshots[-1]


def append_snapshot(ws: Workspace, snap: Snapshot) -> Workspace:
    if ws.snapshots and snap.iteration <= ws.snapshots[-1].iteration:
        raise IterationOrder(
            f"iteration {snap.iteration} must exceed last iteration {ws.snapshots[-1].iteration}"
        )
    return replace(ws, snapshots=ws.snapshots + (snap,))
