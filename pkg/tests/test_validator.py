import random

import pytest

from conftest import FIXTURES, random_snapshot
from w6h.dsl import parse, parse_file
from w6h.interrogatives import DependencyRuleSet, Interrogative as Q, standard_rules, unmet_groups
from w6h.model import Artifact, PerspectiveRow as R, SelectionLink, Snapshot, ViewSlice, Workspace, populated
from w6h.validator import (
    REGISTRY,
    Diagnostic,
    Profile,
    Severity,
    UnknownCode,
    exit_status,
    explain,
    render,
    validate,
)


def ws_with(slice_):
    return Workspace("t", (Snapshot(1).with_slice(slice_),))


def codes(diags, code):
    return [d for d in diags if d.code == code]


def test_how_alone_gives_one_e001_with_both_groups():
    slice_ = ViewSlice.build(R.DESIGNER, {Q.HOW: [Artifact("PlaceOrder")]})
    diags = validate(ws_with(slice_))
    (e001,) = codes(diags, "E001")
    assert (e001.row, e001.interrogative) == (R.DESIGNER, Q.HOW)
    assert "{what}" in e001.message and "{which, where}" in e001.message
    designer_w101 = [d for d in codes(diags, "W101") if d.row is R.DESIGNER]
    assert {d.interrogative for d in designer_w101} == set(Q) - {Q.HOW}


def test_all_empty_snapshot_gives_42_w101():
    diags = validate(Workspace("e", (Snapshot(1),)))
    assert len(diags) == 42
    assert all(d.code == "W101" and d.severity is Severity.WARNING for d in diags)


def test_dangling_link():
    slice_ = ViewSlice.build(R.DESIGNER, {Q.HOW: [Artifact("PlaceOrder")]},
                             [SelectionLink("PlaceOrder", "Ghost")])
    (e002,) = codes(validate(ws_with(slice_)), "E002")
    assert e002.artifact == "Ghost"
    assert "Ghost" in e002.message


def test_crud_on_non_function_link():
    slice_ = ViewSlice.build(R.OWNER, {Q.WHO: [Artifact("Partner")], Q.WHICH: [Artifact("KeyActivities")]},
                             [SelectionLink("Partner", "KeyActivities", {"R"})])
    diags = validate(ws_with(slice_))
    assert len(codes(diags, "E003")) == 1
    assert not codes(diags, "E002")


def test_fully_populated_view_has_no_errors():
    ws = parse_file(FIXTURES / "full_view.w6h")
    diags = validate(ws)
    assert not [d for d in diags if d.severity is Severity.ERROR]
    assert not [d for d in diags if d.row is R.DESIGNER]


def test_which_without_links_w102():
    slice_ = ViewSlice.build(R.SCOPE, {Q.WHICH: [Artifact("Pick")]})
    (w102,) = codes(validate(ws_with(slice_)), "W102")
    assert w102.interrogative is Q.WHICH


def test_crud_hygiene_delegated():
    diags = validate(parse_file(FIXTURES / "crud_placeorder.w6h"))
    assert [(d.code, d.artifact) for d in diags if d.code in ("W103", "W104", "W105")] == [
        ("W103", "Customer"), ("W104", "Order")]
    assert all(d.iteration == 1 and d.row is R.DESIGNER for d in codes(diags, "W103"))


def test_no_crud_hygiene_without_verbs():
    slice_ = ViewSlice.build(R.DESIGNER, {Q.WHAT: [Artifact("E")], Q.HOW: [Artifact("F")]})
    assert not [d for d in validate(ws_with(slice_)) if d.code in ("W103", "W104", "W105")]


def test_e001_soundness_random():
    rng = random.Random(11)
    rules = standard_rules()
    for _ in range(300):
        snap = random_snapshot(rng, density=rng.random())
        diags = validate(Workspace("r", (snap,)))
        for s in snap.slices:
            got = {d.interrogative for d in codes(diags, "E001") if d.row is s.row}
            pop = populated(s)
            expected = {q for q in pop if any(not (g & pop) for g in rules[q])}
            assert got == expected


def test_sorted_unique_and_deterministic():
    rng = random.Random(5)
    for _ in range(100):
        ws = Workspace("r", (random_snapshot(rng, 1), random_snapshot(rng, 3)))
        diags = validate(ws)
        assert diags == sorted(diags, key=Diagnostic.sort_key)
        keys = [(d.location, d.code) for d in diags]
        assert len(keys) == len(set(keys))
        assert render(validate(ws)) == render(diags)


def test_render_format():
    d = Diagnostic("E001", "msg", 2, R.DESIGNER, Q.HOW)
    assert d.render() == "ERROR E001 2:designer:how msg"
    d = Diagnostic("W103", "msg", 1, R.OWNER, Q.WHAT, "Customer")
    assert d.render() == "WARNING W103 1:owner:what:Customer msg"


def test_diagnostic_rejects_unknown_code_and_bad_location():
    with pytest.raises(UnknownCode):
        Diagnostic("Z999", "x")
    with pytest.raises(ValueError):
        Diagnostic("E002", "x", 1, R.OWNER, None, "A")


def test_explain():
    assert "prerequisite" in explain("E001")
    assert "holistic" in explain("W101").lower()
    with pytest.raises(UnknownCode):
        explain("Z999")
    for code in REGISTRY:
        assert explain(code).startswith(code)


def test_strict_profile_exit_status():
    diags = validate(Workspace("e", (Snapshot(1),)))
    assert exit_status(diags, Profile()) == 0
    assert exit_status(diags, Profile(strict=True)) == 1
    assert exit_status([], Profile(strict=True)) == 0


def test_profile_rejects_broken_rules():
    with pytest.raises(ValueError):
        Profile(DependencyRuleSet({q: () for q in Q if q is not Q.WHEN} | {Q.WHEN: (frozenset({Q.WHEN}),)}))


def test_empty_rules_profile_has_no_e001():
    slice_ = ViewSlice.build(R.DESIGNER, {Q.WHEN: [Artifact("T")]})
    assert not codes(validate(ws_with(slice_), Profile(DependencyRuleSet.empty())), "E001")


def test_plan_findings_in_validate():
    diags = validate(parse_file(FIXTURES / "plan_unknown_item.w6h"))
    assert [d.render() for d in diags] == [
        "ERROR E006 plan:S1:c sprint S1 selects c, which is not in the backlog"]
