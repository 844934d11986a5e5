import pytest

from w6h.interrogatives import Interrogative as Q
from w6h.model import (
    Artifact,
    CrudVerb,
    DuplicateName,
    IterationOrder,
    ModelError,
    NotFound,
    PerspectiveRow as R,
    SelectionLink,
    Snapshot,
    ViewSlice,
    Workspace,
    append_snapshot,
    populated,
    resolve,
)


def designer(**cells):
    return ViewSlice.build(R.DESIGNER, {Q[k.upper()]: [Artifact(n) for n in v] for k, v in cells.items()})


def test_rows():
    assert [r.keyword for r in R] == ["scope", "owner", "designer", "builder", "subcontractor", "functioning"]


def test_resolve():
    s = designer(what=["Customer"])
    q, art = resolve(s, "Customer")
    assert q is Q.WHAT and art.name == "Customer"
    with pytest.raises(NotFound):
        resolve(s, "Ghost")
    with pytest.raises(NotFound):
        resolve(ViewSlice.empty(R.DESIGNER), "x")


def test_populated():
    assert populated(ViewSlice.empty(R.OWNER)) == set()
    assert populated(designer(what=["A"], which=["B"])) == {Q.WHAT, Q.WHICH}
    full = designer(**{q.keyword: [f"n{int(q)}"] for q in Q})
    assert populated(full) == set(Q)


def test_name_unique_across_cells():
    with pytest.raises(DuplicateName):
        designer(what=["Customer"], how=["Customer"])
    with pytest.raises(DuplicateName):
        designer(what=["Customer", "Customer"])


def test_artifact_name_lexeme():
    for bad in ["", "1abc", "a-b", "a b"]:
        with pytest.raises(ModelError):
            Artifact(bad)
    assert Artifact("_ok9").name == "_ok9"


def test_link_endpoints_differ():
    with pytest.raises(ModelError):
        SelectionLink("A", "A")
    assert SelectionLink("A", "B", {"C", "R"}).verbs == {CrudVerb.C, CrudVerb.R}


def test_spans_do_not_affect_equality():
    from w6h.model import SourceSpan
    assert Artifact("A", span=SourceSpan("f", 1, 1)) == Artifact("A")


def test_append_snapshot():
    ws = Workspace("w", (Snapshot(1),))
    ws2 = append_snapshot(ws, Snapshot(2))
    assert [s.iteration for s in ws2.snapshots] == [1, 2]
    assert [s.iteration for s in ws.snapshots] == [1]
    with pytest.raises(IterationOrder):
        append_snapshot(ws2, Snapshot(2))
    assert [s.iteration for s in append_snapshot(Workspace("e"), Snapshot(5)).snapshots] == [5]


def test_workspace_rejects_unordered_iterations():
    with pytest.raises(IterationOrder):
        Workspace("w", (Snapshot(2), Snapshot(1)))
    with pytest.raises(ModelError):
        Snapshot(0)


def test_snapshot_always_has_six_slices():
    snap = Snapshot(1)
    assert [s.row for s in snap.slices] == list(R)
    assert all(s.is_empty() for s in snap.slices)
