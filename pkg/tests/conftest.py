import pathlib
import random
import string

from w6h.interrogatives import Interrogative
from w6h.model import (
    Artifact,
    BacklogPlan,
    CrudVerb,
    PerspectiveRow,
    SelectionLink,
    Snapshot,
    ViewSlice,
    Workspace,
)

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

NAME_POOL = ["Customer", "Order", "PlaceOrder", "ShipOrder", "Clerk", "Warehouse", "GrowSales",
             "Cutoff", "_tmp", "a1", "Invoice", "Billing", "kind", "item", "link", "view"]
TEXT_POOL = ["", "plain", 'has "quotes"', "back\\slash", "tab\there", "line\nbreak",
             "ünïcödé ✓", "# not a comment", "{ braces }"]


def _maybe_text(rng: random.Random):
    return rng.choice(TEXT_POOL) if rng.random() < 0.4 else None


def _name(rng: random.Random) -> str:
    if rng.random() < 0.5:
        return rng.choice(NAME_POOL)
    first = rng.choice(string.ascii_letters + "_")
    return first + "".join(rng.choices(string.ascii_letters + string.digits + "_", k=rng.randint(0, 6)))


def random_slice(rng: random.Random, row: PerspectiveRow, density: float = 0.5) -> ViewSlice:
    cells = {}
    used: set[str] = set()
    for q in Interrogative:
        if rng.random() > density:
            continue
        arts = []
        for _ in range(rng.randint(1, 4)):
            n = _name(rng)
            if n in used:
                continue
            used.add(n)
            arts.append(Artifact(n, _maybe_text(rng), _maybe_text(rng)))
        cells[q] = arts
    links = []
    endpoints = sorted(used) + ["Ghost"]
    for _ in range(rng.randint(0, 4) if len(endpoints) > 1 else 0):
        s, o = rng.sample(endpoints, 2)
        verbs = frozenset(rng.sample(list(CrudVerb), rng.randint(0, 4)))
        links.append(SelectionLink(s, o, verbs, _maybe_text(rng)))
    return ViewSlice.build(row, cells, links)


def random_snapshot(rng: random.Random, iteration: int = 1, density: float = 0.5) -> Snapshot:
    label = rng.choice([None, "AS-IS", "TO-BE", "interim"])
    slices = tuple(random_slice(rng, r, density) if rng.random() < 0.6 else ViewSlice.empty(r)
                   for r in PerspectiveRow)
    return Snapshot(iteration, label, slices)


def random_plan(rng: random.Random) -> BacklogPlan:
    items = rng.sample(NAME_POOL, rng.randint(0, 5))
    sprints = [(f"S{i}", tuple(rng.sample(items + ["zz"], rng.randint(0, min(3, len(items) + 1)))))
               for i in range(rng.randint(0, 3))]
    pool = [s for s, _ in sprints] + ["S9"]
    releases = [(f"R{i}", tuple(rng.sample(pool, rng.randint(0, min(2, len(pool))))))
                for i in range(rng.randint(0, 2))]
    return BacklogPlan(tuple(items), tuple(sprints), tuple(releases))


def random_workspace(rng: random.Random) -> Workspace:
    iteration = 0
    snaps = []
    for _ in range(rng.randint(0, 3)):
        iteration += rng.randint(1, 3)
        snaps.append(random_snapshot(rng, iteration))
    plan = random_plan(rng) if rng.random() < 0.3 else None
    return Workspace(rng.choice(["Acme", "", "Ünï \"co\""]), tuple(snaps), plan)


def mutate_snapshot(rng: random.Random, snap: Snapshot) -> Snapshot:
    """A nearby snapshot: some cells edited, some slices regenerated."""
    slices = []
    for s in snap.slices:
        roll = rng.random()
        if roll < 0.3:
            slices.append(random_slice(rng, s.row))
        elif roll < 0.6:
            cells = {c.address[1]: list(c.artifacts) for c in s.cells}
            names = s.names()
            for q, arts in cells.items():
                if arts and rng.random() < 0.3:
                    arts.pop(rng.randrange(len(arts)))
                if arts and rng.random() < 0.3:
                    i = rng.randrange(len(arts))
                    arts[i] = Artifact(arts[i].name, rng.choice(["entity", None]), _maybe_text(rng))
                if rng.random() < 0.2:
                    rng.shuffle(arts)
                if rng.random() < 0.3:
                    n = _name(rng)
                    if n not in names:
                        names.add(n)
                        arts.append(Artifact(n))
            links = list(s.links)
            if links and rng.random() < 0.4:
                links.pop(rng.randrange(len(links)))
            if links and rng.random() < 0.3:
                i = rng.randrange(len(links))
                old = links[i]
                verbs = frozenset(rng.sample(list(CrudVerb), rng.randint(0, 4)))
                links[i] = SelectionLink(old.subject, old.object, verbs, old.note)
            if links and rng.random() < 0.2:
                links.append(links[rng.randrange(len(links))])
            if links and rng.random() < 0.2:
                rng.shuffle(links)
            slices.append(ViewSlice.build(s.row, cells, links))
        else:
            slices.append(s)
    return Snapshot(snap.iteration + 1, rng.choice([None, "TO-BE"]), tuple(slices))


_ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance.py" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    if report.when == "call" or report.outcome != "passed":
        if report.outcome == "failed" or name not in _ACCEPTANCE:
            _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda n: int(n.split("_")[2])):
        verdict = "PASS" if _ACCEPTANCE[name] == "passed" else "FAIL"
        number, title = name.split("_")[2], " ".join(name.split("_")[3:])
        terminalreporter.write_line(f"{verdict}  criterion {number}: {title}")
