"""Pronoun resolution by counting supporting edges in the graph.

Each candidate noun and the pronoun are located inside extracted
eventualities, swapped for a placeholder, and the graph is searched for
edges whose head and tail agree with the two pseudo-eventualities everywhere
except at the placeholder, where they share the same word.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from typing import Sequence

from .conllu import DependencyGraph, parse_conllu
from .eventuality import Eventuality
from .extract import extract_eventualities
from .relations import RelationType, TrainingInstance, match_seed
from .store import KnowledgeGraph

CO = RelationType.CO_OCCURRENCE
ABSTAIN = "abstain"
ACCURACY_CONVENTION = "A_p excludes abstentions; A_o scores each abstention as half a correct answer"


@dataclass(frozen=True)
class PseudoEventuality:
    words: tuple[str, ...]
    slot: int
    marker: str = "X"

    def __post_init__(self):
        if not 0 <= self.slot < len(self.words):
            raise ValueError("placeholder outside the eventuality")

    @classmethod
    def from_eventuality(cls, e: Eventuality, position: int, marker: str) -> "PseudoEventuality":
        slot = e.positions.index(position)
        words = list(e.words)
        words[slot] = marker
        return cls(tuple(words), slot, marker)

    def substitute(self, marker: str) -> "PseudoEventuality":
        words = list(self.words)
        words[self.slot] = marker
        return PseudoEventuality(tuple(words), self.slot, marker)

    def fits(self, words: Sequence[str]) -> bool:
        """True if ``words`` equals this pseudo-eventuality off the placeholder."""
        if len(words) != len(self.words):
            return False
        return all(a == b for i, (a, b) in enumerate(zip(words, self.words)) if i != self.slot)

    @property
    def text(self) -> str:
        return " ".join(self.words)


@dataclass
class WscQuestion:
    qid: str
    sentences: list[DependencyGraph]
    n1: tuple[int, int]
    n2: tuple[int, int]
    pronoun: tuple[int, int]
    answer: str | None = None

    def __post_init__(self):
        if self.n1 == self.n2:
            raise ValueError("candidates must be distinct tokens")
        if self.pronoun in (self.n1, self.n2):
            raise ValueError("pronoun cannot be a candidate")

    def form(self, ref: tuple[int, int]) -> str:
        return self.sentences[ref[0]].token(ref[1]).form

    @classmethod
    def from_json(cls, obj: dict) -> "WscQuestion":
        graphs = parse_conllu(io.StringIO(obj["conllu"]))
        return cls(
            qid=str(obj.get("id", "")),
            sentences=graphs,
            n1=tuple(obj["n1"]),
            n2=tuple(obj["n2"]),
            pronoun=tuple(obj["pronoun"]),
            answer=obj.get("answer"),
        )


@dataclass
class Prepared:
    n1: PseudoEventuality | None
    n2: PseudoEventuality | None
    pronoun: PseudoEventuality | None
    relation: RelationType
    flags: list[str] = field(default_factory=list)


def _containing(events: list[list[Eventuality]], ref: tuple[int, int]) -> Eventuality | None:
    sent, tok = ref
    for e in events[sent]:
        if tok in e.positions:
            return e
    return None


def _relation(q: WscQuestion, events, e_n, n_ref, e_p) -> RelationType:
    if e_n is None or e_p is None or n_ref[0] != q.pronoun[0]:
        return CO
    graph = q.sentences[n_ref[0]]
    first, second = sorted([e_n, e_p], key=lambda e: e.positions[0])
    if first.key == second.key:
        return CO
    lo = first.positions[-1] + 1
    x = TrainingInstance(first.key, second.key, graph.sentence_id, (lo, max(lo, second.positions[0])),
                         e1_positions=first.positions, e2_positions=second.positions)
    found = match_seed(x, graph)
    return min(found, key=lambda t: t.value) if found else CO


def prepare(q: WscQuestion) -> Prepared:
    events = [extract_eventualities(g) for g in q.sentences]
    e1, e2, ep = (_containing(events, r) for r in (q.n1, q.n2, q.pronoun))
    flags = [name for name, e in (("n1", e1), ("n2", e2), ("pronoun", ep)) if e is None]
    pseudo = [
        PseudoEventuality.from_eventuality(e, ref[1], m) if e is not None else None
        for e, ref, m in ((e1, q.n1, "X"), (e2, q.n2, "Y"), (ep, q.pronoun, "P"))
    ]
    e_n, n_ref = (e1, q.n1) if e1 is not None else (e2, q.n2)
    return Prepared(*pseudo, relation=_relation(q, events, e_n, n_ref, ep), flags=flags)


def aser_r(g: KnowledgeGraph, cand: PseudoEventuality, pron: PseudoEventuality, rtype: RelationType) -> int:
    """Number of ``rtype`` edges supporting the (candidate, pronoun) pseudo pair."""
    anchor = next((w for i, w in enumerate(cand.words) if i != cand.slot), None)
    pool = g.word_index.get(anchor, set()) if anchor is not None else g.eventualities.keys()
    count = 0
    for hkey in sorted(pool):
        head = g.eventualities[hkey]
        if not cand.fits(head.words):
            continue
        w_h = head.words[cand.slot]
        for tkey, _ in g.out_neighbors(hkey, rtype):
            tail = g.eventualities[tkey].words
            if pron.fits(tail) and tail[pron.slot] == w_h:
                count += 1
    return count


@dataclass
class Resolution:
    qid: str
    prediction: str
    scores: dict[str, int]
    relation: RelationType
    flags: list[str]
    answer: str | None = None

    @property
    def correct(self) -> bool | None:
        if self.answer is None or self.prediction == ABSTAIN:
            return None
        return self.prediction == self.answer

    def to_json(self) -> dict:
        return {
            "id": self.qid,
            "prediction": self.prediction,
            "scores": self.scores,
            "relation": self.relation.value,
            "flags": self.flags,
            "answer": self.answer,
            "correct": self.correct,
        }


def score(g: KnowledgeGraph, prep: Prepared) -> dict[str, int]:
    out = {}
    for name, cand, marker in (("n1", prep.n1, "X"), ("n2", prep.n2, "Y")):
        if cand is None or prep.pronoun is None:
            out[name] = 0
        else:
            out[name] = aser_r(g, cand, prep.pronoun.substitute(marker), prep.relation)
    return out


def resolve(g: KnowledgeGraph, q: WscQuestion) -> Resolution:
    prep = prepare(q)
    s = score(g, prep)
    if s["n1"] > s["n2"]:
        pred = "n1"
    elif s["n2"] > s["n1"]:
        pred = "n2"
    else:
        pred = ABSTAIN
    return Resolution(q.qid, pred, s, prep.relation, prep.flags, q.answer)


def accuracy(results: list[Resolution]) -> dict:
    right = sum(1 for r in results if r.correct is True)
    wrong = sum(1 for r in results if r.correct is False)
    na = sum(1 for r in results if r.prediction == ABSTAIN)
    total = right + wrong + na
    return {
        "correct": right,
        "wrong": wrong,
        "na": na,
        "A_p": right / (right + wrong) if right + wrong else 0.0,
        "A_o": (right + 0.5 * na) / total if total else 0.0,
    }


def report(g: KnowledgeGraph, questions: list[WscQuestion]) -> dict:
    results = [resolve(g, q) for q in questions]
    return {
        "convention": ACCURACY_CONVENTION,
        "summary": accuracy(results),
        "questions": [r.to_json() for r in results],
    }


def load_questions(path) -> list[WscQuestion]:
    with open(path, encoding="utf-8") as fh:
        return [WscQuestion.from_json(json.loads(line)) for line in fh if line.strip()]
