"""Snapshot differences and AS-IS to TO-BE transition reports.

Artifacts are identified by name within a cell, links by (subject, object)
plus their occurrence count among links with the same endpoints. A rename is
a removal and an addition.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .interrogatives import Interrogative
from .model import (
    Artifact,
    ModelError,
    PerspectiveRow,
    SelectionLink,
    Snapshot,
    ViewSlice,
    verb_string,
)
from .dsl import artifact_doc, link_doc

LinkKey = tuple  # (subject, object, occurrence)


class Inapplicable(ModelError):
    pass


@dataclass(frozen=True)
class ArtifactChange:
    before: Artifact
    after: Artifact

    @property
    def name(self) -> str:
        return self.after.name

    def fields(self) -> list[tuple[str, Optional[str], Optional[str]]]:
        return [(f, getattr(self.before, f), getattr(self.after, f))
                for f in ("kind", "description")
                if getattr(self.before, f) != getattr(self.after, f)]


@dataclass(frozen=True)
class CellDelta:
    row: PerspectiveRow
    interrogative: Interrogative
    added: tuple[Artifact, ...] = ()
    removed: tuple[Artifact, ...] = ()
    changed: tuple[ArtifactChange, ...] = ()
    # final name order, set only when added/kept artifacts do not land in it naturally
    order: Optional[tuple[str, ...]] = None

    @property
    def address(self) -> tuple[PerspectiveRow, Interrogative]:
        return (self.row, self.interrogative)


@dataclass(frozen=True)
class LinkEdit:
    key: LinkKey
    before: Optional[SelectionLink] = None
    after: Optional[SelectionLink] = None


@dataclass(frozen=True)
class LinkDelta:
    row: PerspectiveRow
    added: tuple[LinkEdit, ...] = ()
    removed: tuple[LinkEdit, ...] = ()
    changed: tuple[LinkEdit, ...] = ()
    order: Optional[tuple[LinkKey, ...]] = None


@dataclass(frozen=True)
class ModelDelta:
    from_iteration: int
    to_iteration: int
    to_label: Optional[str] = None
    cell_deltas: tuple[CellDelta, ...] = ()
    link_deltas: tuple[LinkDelta, ...] = ()

    def is_empty(self) -> bool:
        return not self.cell_deltas and not self.link_deltas

    def counts(self) -> dict[str, int]:
        return {
            "added": sum(len(c.added) for c in self.cell_deltas),
            "removed": sum(len(c.removed) for c in self.cell_deltas),
            "changed": sum(len(c.changed) for c in self.cell_deltas),
            "reordered": sum(1 for c in self.cell_deltas if c.order is not None)
            + sum(1 for l in self.link_deltas if l.order is not None),
            "links_added": sum(len(l.added) for l in self.link_deltas),
            "links_removed": sum(len(l.removed) for l in self.link_deltas),
            "links_changed": sum(len(l.changed) for l in self.link_deltas),
        }


def link_keys(links) -> list[LinkKey]:
    seen: dict[tuple[str, str], int] = {}
    keys = []
    for link in links:
        n = seen.get(link.pair, 0)
        seen[link.pair] = n + 1
        keys.append(link.pair + (n,))
    return keys


def _diff_cell(row, q, old: tuple[Artifact, ...], new: tuple[Artifact, ...]) -> Optional[CellDelta]:
    before = {a.name: a for a in old}
    after = {a.name: a for a in new}
    added = tuple(a for a in new if a.name not in before)
    removed = tuple(a for a in old if a.name not in after)
    changed = tuple(ArtifactChange(before[a.name], a) for a in new
                    if a.name in before and before[a.name] != a)
    natural = [a.name for a in old if a.name in after] + [a.name for a in added]
    target = [a.name for a in new]
    order = tuple(target) if natural != target else None
    if not (added or removed or changed or order):
        return None
    return CellDelta(row, q, added, removed, changed, order)


def _diff_links(row, old: tuple[SelectionLink, ...], new: tuple[SelectionLink, ...]) -> Optional[LinkDelta]:
    before = dict(zip(link_keys(old), old))
    after = dict(zip(link_keys(new), new))
    added = tuple(LinkEdit(k, None, l) for k, l in after.items() if k not in before)
    removed = tuple(LinkEdit(k, l, None) for k, l in before.items() if k not in after)
    changed = tuple(LinkEdit(k, before[k], l) for k, l in after.items()
                    if k in before and before[k] != l)
    natural = [k for k in before if k in after] + [e.key for e in added]
    target = list(after)
    order = tuple(target) if natural != target else None
    if not (added or removed or changed or order):
        return None
    return LinkDelta(row, added, removed, changed, order)


def diff(a: Snapshot, b: Snapshot) -> ModelDelta:
    cells, links = [], []
    for sa, sb in zip(a.slices, b.slices):
        for ca, cb in zip(sa.cells, sb.cells):
            d = _diff_cell(sa.row, ca.address[1], ca.artifacts, cb.artifacts)
            if d is not None:
                cells.append(d)
        ld = _diff_links(sa.row, sa.links, sb.links)
        if ld is not None:
            links.append(ld)
    return ModelDelta(a.iteration, b.iteration, b.label, tuple(cells), tuple(links))


def _apply_cell(d: CellDelta, old: tuple[Artifact, ...]) -> tuple[Artifact, ...]:
    current = {a.name: a for a in old}
    where = f"{d.row.keyword}:{d.interrogative.keyword}"
    for a in d.removed:
        if a.name not in current:
            raise Inapplicable(f"{where}: cannot remove missing artifact {a.name}")
    for c in d.changed:
        if c.name not in current:
            raise Inapplicable(f"{where}: cannot change missing artifact {c.name}")
    for a in d.added:
        if a.name in current:
            raise Inapplicable(f"{where}: cannot add existing artifact {a.name}")
    gone = {a.name for a in d.removed}
    edits = {c.name: c.after for c in d.changed}
    result = [edits.get(a.name, a) for a in old if a.name not in gone] + list(d.added)
    if d.order is not None:
        by_name = {a.name: a for a in result}
        if sorted(by_name) != sorted(d.order):
            raise Inapplicable(f"{where}: order does not match resulting artifacts")
        result = [by_name[n] for n in d.order]
    return tuple(result)


def _apply_links(d: LinkDelta, old: tuple[SelectionLink, ...]) -> tuple[SelectionLink, ...]:
    current = dict(zip(link_keys(old), old))
    where = f"{d.row.keyword}:links"
    for e in d.removed + d.changed:
        if e.key not in current:
            raise Inapplicable(f"{where}: no link {e.key[0]} -> {e.key[1]} #{e.key[2]}")
    for e in d.added:
        if e.key in current:
            raise Inapplicable(f"{where}: link {e.key[0]} -> {e.key[1]} #{e.key[2]} already present")
    gone = {e.key for e in d.removed}
    edits = {e.key: e.after for e in d.changed}
    result = {k: edits.get(k, l) for k, l in current.items() if k not in gone}
    for e in d.added:
        result[e.key] = e.after
    keys = list(d.order) if d.order is not None else list(result)
    if sorted(keys) != sorted(result):
        raise Inapplicable(f"{where}: order does not match resulting links")
    return tuple(result[k] for k in keys)


def apply(d: ModelDelta, a: Snapshot) -> Snapshot:
    """Replay ``d`` onto ``a``; raises :class:`Inapplicable` on the first entry that does not fit."""
    cells = {(s.row, c.address[1]): c.artifacts for s in a.slices for c in s.cells}
    links = {s.row: s.links for s in a.slices}
    for cd in d.cell_deltas:
        cells[cd.address] = _apply_cell(cd, cells[cd.address])
    for ld in d.link_deltas:
        links[ld.row] = _apply_links(ld, links[ld.row])
    try:
        slices = tuple(
            ViewSlice.build(row, {q: cells[(row, q)] for q in Interrogative}, links[row])
            for row in PerspectiveRow
        )
    except ModelError as exc:
        raise Inapplicable(str(exc)) from exc
    return Snapshot(d.to_iteration, d.to_label, slices)


def _fmt_artifact(a: Artifact) -> str:
    text = a.name
    if a.kind is not None:
        text += f" kind {json.dumps(a.kind, ensure_ascii=False)}"
    if a.description is not None:
        text += f" {json.dumps(a.description, ensure_ascii=False)}"
    return text


def _fmt_link(link: SelectionLink) -> str:
    text = f"{link.subject} -> {link.object}"
    if link.verbs:
        text += f" [{verb_string(link.verbs)}]"
    if link.note is not None:
        text += f" {json.dumps(link.note, ensure_ascii=False)}"
    return text


def render_transition(d: ModelDelta) -> str:
    lines = [f"Transition: iteration {d.from_iteration} -> iteration {d.to_iteration}"
             + (f" ({d.to_label})" if d.to_label else "")]
    if d.is_empty():
        lines.append("no changes")
    for row in PerspectiveRow:
        cds = [c for c in d.cell_deltas if c.row is row]
        lds = [l for l in d.link_deltas if l.row is row]
        if not cds and not lds:
            continue
        lines.append(f"view {row.keyword}")
        for c in cds:
            lines.append(f"  {c.interrogative.keyword}")
            lines.extend(f"    + {_fmt_artifact(a)}" for a in c.added)
            lines.extend(f"    - {_fmt_artifact(a)}" for a in c.removed)
            for ch in c.changed:
                for name, old, new in ch.fields():
                    lines.append(f"    ~ {ch.name}: {name} {json.dumps(old)} -> {json.dumps(new)}")
            if c.order is not None:
                lines.append("    reordered: " + ", ".join(c.order))
        for l in lds:
            lines.append("  links")
            lines.extend(f"    + {_fmt_link(e.after)}" for e in l.added)
            lines.extend(f"    - {_fmt_link(e.before)}" for e in l.removed)
            lines.extend(f"    ~ {_fmt_link(e.before)}  =>  {_fmt_link(e.after)}" for e in l.changed)
            if l.order is not None:
                lines.append("    reordered")
    counts = d.counts()
    lines.append("Summary: " + " ".join(f"{k}={v}" for k, v in counts.items()))
    return "\n".join(lines) + "\n"


def delta_doc(d: ModelDelta) -> dict:
    doc: dict = {"from": d.from_iteration, "to": d.to_iteration}
    if d.to_label is not None:
        doc["label"] = d.to_label
    doc["cells"] = []
    for c in d.cell_deltas:
        entry = {
            "row": c.row.keyword,
            "interrogative": c.interrogative.keyword,
            "added": [artifact_doc(a) for a in c.added],
            "removed": [artifact_doc(a) for a in c.removed],
            "changed": [{"name": ch.name, "before": artifact_doc(ch.before),
                         "after": artifact_doc(ch.after)} for ch in c.changed],
        }
        if c.order is not None:
            entry["order"] = list(c.order)
        doc["cells"].append(entry)
    doc["links"] = []
    for l in d.link_deltas:
        entry = {
            "row": l.row.keyword,
            "added": [link_doc(e.after) for e in l.added],
            "removed": [link_doc(e.before) for e in l.removed],
            "changed": [{"before": link_doc(e.before), "after": link_doc(e.after)} for e in l.changed],
        }
        if l.order is not None:
            entry["order"] = [list(k) for k in l.order]
        doc["links"].append(entry)
    return doc


def export_delta(d: ModelDelta) -> str:
    return json.dumps(delta_doc(d), indent=2, ensure_ascii=False) + "\n"
