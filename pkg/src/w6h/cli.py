"""``w6h`` command line: check, orders, crud, diff, report, elicit, export."""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from typing import Optional, Sequence, TextIO

from .derivations import NotAnswerable, answer, crud_findings, derive_crud, finish, render_crud, start_session
from .diff import diff, render_transition
from .dsl import ParseErrors, export_interchange, parse, print_workspace
from .interrogatives import DependencyRuleSet, Interrogative, standard_rules, valid_orders, validate_rules
from .model import Artifact, ModelError, NotFound, PerspectiveRow, Snapshot, Workspace, populated
from .validator import Profile, Severity, exit_status, validate

EXIT_OK, EXIT_FINDINGS, EXIT_USAGE = 0, 1, 2

_COLORS = {Severity.ERROR: "\033[31m", Severity.WARNING: "\033[33m"}


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _styled(stream: TextIO) -> bool:
    return not os.environ.get("W6H_NO_COLOR") and hasattr(stream, "isatty") and stream.isatty()


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _load_workspace(path: str) -> Workspace:
    return parse(_read(path), path)


def _load_rules(path: Optional[str]) -> DependencyRuleSet:
    if path is None:
        return standard_rules()
    try:
        rules = DependencyRuleSet.from_dict(json.loads(_read(path)))
    except (ValueError, AttributeError) as exc:
        raise UsageError(f"invalid rules file {path}: {exc}") from None
    findings = validate_rules(rules)
    if findings:
        raise UsageError(f"invalid rules file {path}: " + "; ".join(findings))
    return rules


def _view(name: str) -> PerspectiveRow:
    try:
        return PerspectiveRow.from_keyword(name)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown view {name!r} (choose from {', '.join(r.keyword for r in PerspectiveRow)})"
        ) from None


def _write_out(text: str, path: Optional[str], out: TextIO) -> None:
    if path is None:
        out.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


def _snapshot(ws: Workspace, iteration: Optional[int]) -> Snapshot:
    try:
        return ws.latest() if iteration is None else ws.snapshot(iteration)
    except NotFound as exc:
        raise UsageError(str(exc)) from None


def cmd_check(args, out: TextIO, err: TextIO) -> int:
    ws = _load_workspace(args.file)
    profile = Profile(_load_rules(args.rules), strict=args.strict)
    diags = validate(ws, profile)
    color = _styled(out)
    for d in diags:
        line = d.render()
        if color:
            line = _COLORS[d.severity] + line + "\033[0m"
        out.write(line + "\n")
    return exit_status(diags, profile)


def cmd_orders(args, out: TextIO, err: TextIO) -> int:
    orders = valid_orders(_load_rules(args.rules))
    if args.count:
        out.write(f"{len(orders)}\n")
    else:
        for order in orders:
            out.write(" > ".join(q.keyword for q in order) + "\n")
    return EXIT_OK


def cmd_crud(args, out: TextIO, err: TextIO) -> int:
    ws = _load_workspace(args.file)
    snap = _snapshot(ws, args.iteration)
    matrix = derive_crud(snap.slice(args.view))
    out.write(render_crud(matrix))
    for d in crud_findings(matrix):
        out.write(replace(d, iteration=snap.iteration, row=args.view).render() + "\n")
    return EXIT_OK


def cmd_diff(args, out: TextIO, err: TextIO) -> int:
    ws = _load_workspace(args.file)
    a = _snapshot(ws, getattr(args, "from"))
    b = _snapshot(ws, args.to)
    out.write(render_transition(diff(a, b)))
    return EXIT_OK


def holism_report(ws: Workspace) -> str:
    total = len(PerspectiveRow) * len(Interrogative)
    lines = [f"model {json.dumps(ws.name, ensure_ascii=False)}"]
    if not ws.snapshots:
        lines.append("no iterations")
    for snap in ws.snapshots:
        head = f"iteration {snap.iteration}"
        if snap.label:
            head += f" ({snap.label})"
        lines.append(head)
        filled = 0
        for s in snap.slices:
            n = len(populated(s))
            filled += n
            lines.append(f"  {s.row.keyword:<14}populated={n} empty={len(Interrogative) - n}")
        lines.append(f"  completeness {filled}/{total} = {100.0 * filled / total:.1f}%")
    return "\n".join(lines) + "\n"


def cmd_report(args, out: TextIO, err: TextIO) -> int:
    out.write(holism_report(_load_workspace(args.file)))
    return EXIT_OK


def cmd_export(args, out: TextIO, err: TextIO) -> int:
    _write_out(export_interchange(_load_workspace(args.file)), args.out, out)
    return EXIT_OK


def elicit(row: PerspectiveRow, inp: TextIO, out: TextIO,
           rules: Optional[DependencyRuleSet] = None) -> Workspace:
    """Prompt loop on plain text streams; returns a one-view, one-iteration workspace.

    Each round lists the askable interrogatives. The user answers with one of
    them (or ``done``), then a line of artifact names separated by spaces or
    commas. End of input also ends the session.
    """
    session = start_session(row, rules)
    while not session.finished:
        askable = sorted(session.askable)
        out.write(f"askable: {' '.join(q.keyword for q in askable)}\n")
        out.write("interrogative (or 'done')> ")
        out.flush()
        choice = inp.readline()
        if not choice or choice.strip() in ("done", "quit"):
            break
        word = choice.strip().lower()
        if not word:
            continue
        try:
            q = Interrogative.from_keyword(word)
        except ValueError:
            out.write(f"not an interrogative: {word}\n")
            continue
        if q not in askable:
            out.write(f"{q.keyword} is not askable yet\n")
            continue
        out.write(f"{q.keyword} artifacts> ")
        out.flush()
        line = inp.readline()
        names = [n for n in line.replace(",", " ").split() if n]
        try:
            items = [Artifact(n) for n in names]
            if not items:
                raise ModelError("at least one artifact name is required")
            session = answer(session, q, items)
        except (ModelError, NotAnswerable) as exc:
            out.write(f"rejected: {exc}\n")
    slice_ = finish(session)
    snap = Snapshot(1, None).with_slice(slice_)
    return Workspace("Elicited", (snap,))


def cmd_elicit(args, out: TextIO, err: TextIO, inp: TextIO) -> int:
    ws = elicit(args.view, inp, out if args.out else err)
    _write_out(print_workspace(ws), args.out, out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="w6h", description="W6H enterprise architecture toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("check", help="parse and validate a model")
    p.add_argument("file")
    p.add_argument("--strict", action="store_true", help="warnings also fail")
    p.add_argument("--rules", help="alternate dependency rules (JSON)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("orders", help="list valid interrogative orders")
    p.add_argument("--rules", help="alternate dependency rules (JSON)")
    p.add_argument("--count", action="store_true", help="print only the number of orders")
    p.set_defaults(func=cmd_orders)

    p = sub.add_parser("crud", help="CRUD matrix of one view")
    p.add_argument("file")
    p.add_argument("--view", required=True, type=_view)
    p.add_argument("--iteration", type=int)
    p.set_defaults(func=cmd_crud)

    p = sub.add_parser("diff", help="transition report between two iterations")
    p.add_argument("file")
    p.add_argument("--from", required=True, type=int)
    p.add_argument("--to", required=True, type=int)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("report", help="holism report per iteration")
    p.add_argument("file")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("elicit", help="interactive capture of one view")
    p.add_argument("--view", required=True, type=_view)
    p.add_argument("--out")
    p.set_defaults(func=cmd_elicit)

    p = sub.add_parser("export", help="write the JSON interchange document")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return parser


def run(argv: Optional[Sequence[str]] = None, stdin: Optional[TextIO] = None,
        stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    inp = stdin or sys.stdin
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.func is cmd_elicit:
            return cmd_elicit(args, out, err, inp)
        return args.func(args, out, err)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except ParseErrors as exc:
        for e in exc.errors:
            err.write(f"{e}\n")
        return EXIT_USAGE
    except SystemExit as exc:
        # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
