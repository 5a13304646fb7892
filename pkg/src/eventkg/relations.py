"""Relation types, seed connectives and training-instance construction."""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field

from .conllu import DependencyGraph, Token
from .eventuality import Eventuality


class Category(str, enum.Enum):
    TEMPORAL = "Temporal"
    CONTINGENCY = "Contingency"
    COMPARISON = "Comparison"
    EXPANSION = "Expansion"
    CO_OCCURRENCE = "Co_Occurrence"


class RelationType(str, enum.Enum):
    PRECEDENCE = "Precedence"
    SUCCESSION = "Succession"
    SYNCHRONOUS = "Synchronous"
    REASON = "Reason"
    RESULT = "Result"
    CONDITION = "Condition"
    CONTRAST = "Contrast"
    CONCESSION = "Concession"
    CONJUNCTION = "Conjunction"
    INSTANTIATION = "Instantiation"
    RESTATEMENT = "Restatement"
    ALTERNATIVE = "Alternative"
    CHOSEN_ALTERNATIVE = "ChosenAlternative"
    EXCEPTION = "Exception"
    CO_OCCURRENCE = "Co_Occurrence"

    def __str__(self):
        return self.value

    @property
    def category(self) -> Category:
        return CATEGORY_OF[self]


R = RelationType

CATEGORY_TYPES: dict[Category, tuple[RelationType, ...]] = {
    Category.TEMPORAL: (R.PRECEDENCE, R.SUCCESSION, R.SYNCHRONOUS),
    Category.CONTINGENCY: (R.REASON, R.RESULT, R.CONDITION),
    Category.COMPARISON: (R.CONTRAST, R.CONCESSION),
    Category.EXPANSION: (R.CONJUNCTION, R.INSTANTIATION, R.RESTATEMENT,
                         R.ALTERNATIVE, R.CHOSEN_ALTERNATIVE, R.EXCEPTION),
    Category.CO_OCCURRENCE: (R.CO_OCCURRENCE,),
}
CATEGORY_OF = {t: c for c, ts in CATEGORY_TYPES.items() for t in ts}
DISCOURSE_TYPES = tuple(t for t in RelationType if t is not R.CO_OCCURRENCE)
CLASSIFIER_CATEGORIES = (Category.TEMPORAL, Category.CONTINGENCY, Category.COMPARISON, Category.EXPANSION)


def relation_type(name: str) -> RelationType:
    """Look up a type by name, case-insensitively; ``CoOccurrence`` and ``Co-Occurrence`` also work."""
    norm = name.strip().lower().replace("-", "_")
    for t in RelationType:
        if t.value.lower() == norm or t.value.lower().replace("_", "") == norm:
            return t
    raise ValueError(f"unknown relation type {name!r}")


@dataclass(frozen=True)
class SeedRule:
    connective: tuple[str, ...]
    relation: RelationType
    trailing: bool = False

    def __post_init__(self):
        if not self.connective or any(w != w.lower() or not w for w in self.connective):
            raise ValueError(f"bad connective {self.connective!r}")


_SEEDS = {
    R.PRECEDENCE: ["before", "then", "till", "until"],
    R.SUCCESSION: ["after", "once"],
    R.SYNCHRONOUS: ["meanwhile", "meantime", "at the same time"],
    R.REASON: ["because"],
    R.RESULT: ["so", "thus", "therefore", "so that"],
    R.CONDITION: ["if", "as long as"],
    R.CONTRAST: ["but", "however", "by contrast", "in contrast",
                 "on the other hand", "on the contrary"],
    R.CONCESSION: ["although"],
    R.CONJUNCTION: ["and", "also"],
    R.INSTANTIATION: ["for example", "for instance"],
    R.RESTATEMENT: ["in other words"],
    R.ALTERNATIVE: ["or", "unless", "as an alternative", "otherwise"],
    R.EXCEPTION: ["except"],
}


def seed_rules() -> list[SeedRule]:
    rules = [SeedRule(tuple(c.split()), rel) for rel, conns in _SEEDS.items() for c in conns]
    rules.append(SeedRule(("instead",), R.CHOSEN_ALTERNATIVE, trailing=True))
    return rules


@dataclass
class TrainingInstance:
    """Two eventualities from one sentence, ``e1`` textually first.

    ``span_gap`` is the half-open range of sentence indexes strictly between
    the two eventualities.
    """

    e1_key: str
    e2_key: str
    sentence_id: str
    span_gap: tuple[int, int]
    labels: set[RelationType] = field(default_factory=set)
    e1_positions: tuple[int, ...] = ()
    e2_positions: tuple[int, ...] = ()
    sentence: DependencyGraph | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.e1_key == self.e2_key:
            raise ValueError("an instance needs two distinct eventualities")
        if R.CO_OCCURRENCE in self.labels:
            raise ValueError("Co_Occurrence is not an instance label")

    @property
    def ident(self) -> tuple:
        return (self.sentence_id, self.e1_positions, self.e2_positions, self.e1_key, self.e2_key)

    def to_json(self) -> dict:
        obj = {
            "e1": self.e1_key,
            "e2": self.e2_key,
            "sid": self.sentence_id,
            "gap": list(self.span_gap),
            "labels": sorted(t.value for t in self.labels),
            "e1_pos": list(self.e1_positions),
            "e2_pos": list(self.e2_positions),
        }
        if self.sentence is not None:
            obj["sent"] = [[t.form, t.upos, t.head, t.deprel] for t in self.sentence.tokens]
        return obj

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False)

    @classmethod
    def from_json(cls, obj: dict) -> "TrainingInstance":
        sentence = None
        if obj.get("sent"):
            toks = [Token(i, f, u, int(h), r) for i, (f, u, h, r) in enumerate(obj["sent"], start=1)]
            sentence = DependencyGraph(str(obj["sid"]), toks)
        return cls(
            e1_key=obj["e1"],
            e2_key=obj["e2"],
            sentence_id=str(obj["sid"]),
            span_gap=tuple(obj["gap"]),
            labels={relation_type(n) for n in obj.get("labels", [])},
            e1_positions=tuple(obj.get("e1_pos", ())),
            e2_positions=tuple(obj.get("e2_pos", ())),
            sentence=sentence,
        )

    def sentence_forms(self) -> list[str]:
        return [t.form for t in self.sentence.tokens] if self.sentence is not None else []


def _ordered(es: list[Eventuality]) -> list[Eventuality]:
    return sorted(es, key=lambda e: (e.positions[0] if e.positions else 0, e.positions))


def build_instances(graph: DependencyGraph, es: list[Eventuality]) -> list[TrainingInstance]:
    out = []
    for e1, e2 in itertools.combinations(_ordered(es), 2):
        if e1.key == e2.key:
            continue
        lo = e1.positions[-1] + 1
        hi = max(lo, e2.positions[0])
        out.append(TrainingInstance(
            e1.key, e2.key, graph.sentence_id, (lo, hi),
            e1_positions=e1.positions, e2_positions=e2.positions, sentence=graph,
        ))
    return out


def co_occurrence_pairs(es: list[Eventuality]) -> list[tuple[str, str]]:
    return [(a.key, b.key) for a, b in itertools.combinations(_ordered(es), 2) if a.key != b.key]


def _is_punct(t: Token) -> bool:
    return t.deprel == "punct" or t.upos == "PUNCT"


def _find(seq: list[Token], words: tuple[str, ...], anchored_start: bool) -> list[list[Token]]:
    n = len(words)
    starts = [0] if anchored_start else range(len(seq) - n + 1)
    hits = []
    for i in starts:
        window = seq[i:i + n]
        if len(window) == n and tuple(t.form for t in window) == words:
            hits.append(window)
    return hits


def match_seed(x: TrainingInstance, graph: DependencyGraph, rules: list[SeedRule] | None = None) -> set[RelationType]:
    """Types whose connective sits between (or, for trailing rules, right after) the pair.

    Punctuation is skipped, so template commas are optional. A connective only
    counts when one of its words is governed by a word of either eventuality.
    """
    if rules is None:
        rules = seed_rules()
    lo, hi = x.span_gap
    gap = [t for t in graph.tokens[lo - 1:hi - 1] if not _is_punct(t)]
    tail_start = x.e2_positions[-1] if x.e2_positions else len(graph.tokens)
    trailing = [t for t in graph.tokens[tail_start:] if not _is_punct(t)]
    anchors = set(x.e1_positions) | set(x.e2_positions)
    fired = set()
    for rule in rules:
        windows = _find(trailing, rule.connective, True) if rule.trailing else _find(gap, rule.connective, False)
        if any(any(t.head in anchors for t in w) for w in windows):
            fired.add(rule.relation)
    return fired


def seed_sentence(graph: DependencyGraph, es: list[Eventuality], rules=None) -> list[TrainingInstance]:
    """Build every instance of a sentence and attach its seed labels."""
    instances = build_instances(graph, es)
    for x in instances:
        x.labels = match_seed(x, graph, rules)
    return instances
