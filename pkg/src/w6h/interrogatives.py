"""The seven interrogatives and the AND-of-OR prerequisite engine.

A rule set maps each interrogative to a list of prerequisite groups. Every
group must be met (AND), and a group is met once any of its members has been
answered (OR).
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping


class Interrogative(enum.IntEnum):
    WHO = 1
    WHAT = 2
    WHICH = 3
    WHERE = 4
    HOW = 5
    WHY = 6
    WHEN = 7

    @property
    def keyword(self) -> str:
        return self.name.lower()

    @classmethod
    def from_keyword(cls, word: str) -> "Interrogative":
        try:
            return cls[word.upper()]
        except KeyError:
            raise ValueError(f"unknown interrogative: {word!r}") from None

    def __str__(self) -> str:
        return self.name.capitalize()


ALL = frozenset(Interrogative)

PrereqGroup = frozenset  # frozenset[Interrogative], never empty
AnsweredSet = frozenset  # frozenset[Interrogative]


@dataclass(frozen=True)
class DependencyRuleSet:
    """Prerequisite groups per interrogative.

    ``rules`` may be partial while being checked by :func:`validate_rules`;
    lookups of missing interrogatives return no groups.
    """

    rules: Mapping[Interrogative, tuple[frozenset, ...]]

    def __post_init__(self) -> None:
        normalized = {
            Interrogative(q): tuple(frozenset(Interrogative(m) for m in g) for g in groups)
            for q, groups in self.rules.items()
        }
        object.__setattr__(self, "rules", normalized)

    def __getitem__(self, q: Interrogative) -> tuple[frozenset, ...]:
        return self.rules.get(q, ())

    def __iter__(self) -> Iterator[Interrogative]:
        return iter(sorted(self.rules))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DependencyRuleSet):
            return NotImplemented
        return {q: set(g) for q, g in self.rules.items()} == {
            q: set(g) for q, g in other.rules.items()
        }

    def __hash__(self) -> int:
        return hash(frozenset((q, frozenset(g)) for q, g in self.rules.items()))

    @classmethod
    def empty(cls) -> "DependencyRuleSet":
        return cls({q: () for q in Interrogative})

    @classmethod
    def from_dict(cls, data: Mapping) -> "DependencyRuleSet":
        """Build from the interchange form ``{"rules": {"how": [["what"], ...]}}``.

        A bare mapping of interrogative names to group lists is accepted too.
        """
        body = data.get("rules", data)
        if not isinstance(body, Mapping):
            raise ValueError("rules must be an object")
        rules = {}
        for key, groups in body.items():
            q = Interrogative.from_keyword(key)
            if not isinstance(groups, list) or not all(isinstance(g, list) for g in groups):
                raise ValueError(f"groups for {key!r} must be a list of lists")
            rules[q] = tuple(frozenset(Interrogative.from_keyword(m) for m in g) for g in groups)
        return cls(rules)

    @classmethod
    def load(cls, path) -> "DependencyRuleSet":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "w6hVersion": 1,
            "rules": {
                q.keyword: [sorted(m.keyword for m in g) for g in self[q]]
                for q in sorted(self.rules)
            },
        }


def standard_rules() -> DependencyRuleSet:
    W = Interrogative
    return DependencyRuleSet({
        W.WHO: (),
        W.WHAT: (),
        W.WHICH: (),
        W.WHERE: (),
        W.HOW: (frozenset({W.WHAT}), frozenset({W.WHICH, W.WHERE})),
        W.WHY: (frozenset({W.WHAT}), frozenset({W.HOW})),
        W.WHEN: (frozenset({W.HOW}), frozenset({W.WHY})),
    })


def variant_rules() -> DependencyRuleSet:
    """Column numbering of the iteration table, where Where follows How.

    How becomes independent and Where needs What plus one of Which/How; Why
    and When then hang off Where instead of How.
    """
    W = Interrogative
    return DependencyRuleSet({
        W.WHO: (),
        W.WHAT: (),
        W.WHICH: (),
        W.HOW: (),
        W.WHERE: (frozenset({W.WHAT}), frozenset({W.WHICH, W.HOW})),
        W.WHY: (frozenset({W.WHAT}), frozenset({W.WHERE})),
        W.WHEN: (frozenset({W.WHERE}), frozenset({W.WHY})),
    })


def canonical_order() -> tuple[Interrogative, ...]:
    return tuple(Interrogative)


def is_answerable(q: Interrogative, answered: Iterable[Interrogative],
                  rules: DependencyRuleSet) -> bool:
    answered = frozenset(answered)
    return all(group & answered for group in rules[q])


def unmet_groups(q: Interrogative, answered: Iterable[Interrogative],
                 rules: DependencyRuleSet) -> list[frozenset]:
    answered = frozenset(answered)
    return [g for g in rules[q] if not g & answered]


def next_questions(answered: Iterable[Interrogative],
                   rules: DependencyRuleSet) -> frozenset:
    answered = frozenset(answered)
    return frozenset(
        q for q in Interrogative if q not in answered and is_answerable(q, answered, rules)
    )


def _closure(rules: DependencyRuleSet) -> frozenset:
    # answerability is monotone, so greedy saturation finds every reachable interrogative
    reached: frozenset = frozenset()
    while True:
        step = next_questions(reached, rules)
        if not step:
            return reached
        reached |= step


def validate_rules(rules: DependencyRuleSet) -> list[str]:
    """Return findings for a malformed rule set; empty when usable.

    >>> validate_rules(standard_rules())
    []
    """
    findings = []
    missing = [q for q in Interrogative if q not in rules.rules]
    if missing:
        findings.append("missing: " + ", ".join(str(q) for q in missing))
    for q in Interrogative:
        groups = rules[q]
        if any(not g for g in groups):
            findings.append(f"empty group: {q}")
        if any(q in g for g in groups):
            findings.append(f"self-reference: {q}")
    stuck = sorted(ALL - _closure(rules))
    if stuck:
        findings.append("no valid order: " + ", ".join(str(q) for q in stuck))
    return findings


def valid_orders(rules: DependencyRuleSet) -> list[tuple[Interrogative, ...]]:
    """All permutations answerable prefix by prefix, lexicographic by index."""
    out: list[tuple[Interrogative, ...]] = []
    prefix: list[Interrogative] = []

    def extend(answered: frozenset) -> None:
        if len(prefix) == len(Interrogative):
            out.append(tuple(prefix))
            return
        for q in sorted(next_questions(answered, rules)):
            prefix.append(q)
            extend(answered | {q})
            prefix.pop()

    extend(frozenset())
    return out


def is_valid_order(order: Iterable[Interrogative], rules: DependencyRuleSet) -> bool:
    seen: set = set()
    order = tuple(order)
    if sorted(order) != sorted(Interrogative):
        return False
    for q in order:
        if not is_answerable(q, seen, rules):
            return False
        seen.add(q)
    return True

