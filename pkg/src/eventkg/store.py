"""In-memory hybrid graph with JSON Lines persistence.

Eventualities are keyed by their canonical key and carry a frequency. Relation
edges are directed (head, tail) pairs holding one weight per relation type.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .eventuality import Eventuality
from .relations import RelationType, relation_type

EVENTUALITY_FILE = "eventualities.jsonl"
RELATION_FILE = "relations.jsonl"

CO = RelationType.CO_OCCURRENCE


class StoreError(Exception):
    pass


class StoreLoadError(StoreError):
    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


@dataclass
class RelationEdge:
    head: str
    tail: str
    weights: dict[RelationType, float] = field(default_factory=dict)

    def to_json(self) -> dict:
        w = {t.value: float(v) for t, v in sorted(self.weights.items(), key=lambda kv: kv[0].value)}
        return {"h": self.head, "t": self.tail, "w": w}


class KnowledgeGraph:
    def __init__(self):
        self.eventualities: dict[str, Eventuality] = {}
        self._weights: dict[tuple[str, str], dict[RelationType, float]] = {}
        self._out: dict[str, set[str]] = {}
        self._in: dict[str, set[str]] = {}
        self.word_index: dict[str, set[str]] = {}
        # incremented by every neighbour lookup; lets callers measure query cost
        self.edge_visits = 0

    def __len__(self):
        return len(self.eventualities)

    def __contains__(self, key: str) -> bool:
        return key in self.eventualities

    def __eq__(self, other):
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return (
            {k: (e, e.frequency) for k, e in self.eventualities.items()}
            == {k: (e, e.frequency) for k, e in other.eventualities.items()}
            and self._weights == other._weights
        )

    @property
    def num_edges(self) -> int:
        return len(self._weights)

    def frequency(self, key: str) -> int:
        return self.eventualities[key].frequency

    def upsert_eventuality(self, e: Eventuality, count: int = 1) -> str:
        if count < 1:
            raise ValueError("count must be >= 1")
        key = e.key
        old = self.eventualities.get(key)
        freq = count + (old.frequency if old is not None else 0)
        self.eventualities[key] = Eventuality(e.words, e.upos, e.edges, e.pattern, freq)
        if old is None:
            for w in e.words:
                self.word_index.setdefault(w, set()).add(key)
        return key

    def upsert_relation(self, head: str, tail: str, rtype: RelationType, delta: float = 1.0) -> float:
        if delta <= 0:
            raise ValueError("delta must be positive")
        for k, role in ((head, "head"), (tail, "tail")):
            if k not in self.eventualities:
                raise StoreError(f"unknown {role} eventuality {k!r}")
        w = self._weights.setdefault((head, tail), {})
        w[rtype] = w.get(rtype, 0.0) + delta
        self._out.setdefault(head, set()).add(tail)
        self._in.setdefault(tail, set()).add(head)
        return w[rtype]

    def weight(self, head: str, rtype: RelationType, tail: str) -> float:
        return self._weights.get((head, tail), {}).get(rtype, 0.0)

    def weights(self, head: str, tail: str) -> dict[RelationType, float]:
        return dict(self._weights.get((head, tail), {}))

    def _neighbors(self, index, key, rtype, outgoing):
        out = []
        for other in index.get(key, ()):
            pair = (key, other) if outgoing else (other, key)
            w = self._weights[pair].get(rtype, 0.0)
            if w > 0:
                out.append((other, w))
        self.edge_visits += len(out)
        out.sort(key=lambda kv: (-kv[1], kv[0]))
        return out

    def out_neighbors(self, head: str, rtype: RelationType) -> list[tuple[str, float]]:
        """Tails reachable by ``rtype``, heaviest first, ties broken by key."""
        return self._neighbors(self._out, head, rtype, True)

    def in_neighbors(self, tail: str, rtype: RelationType) -> list[tuple[str, float]]:
        return self._neighbors(self._in, tail, rtype, False)

    def out_weights(self, head: str) -> dict[RelationType, float]:
        """Total outgoing weight of ``head`` per relation type."""
        totals: dict[RelationType, float] = {}
        for tail in self._out.get(head, ()):
            for t, w in self._weights[(head, tail)].items():
                totals[t] = totals.get(t, 0.0) + w
        return totals

    def successors(self, head: str) -> set[str]:
        return set(self._out.get(head, ()))

    def edges(self) -> Iterator[RelationEdge]:
        for (h, t), w in self._weights.items():
            yield RelationEdge(h, t, dict(w))

    def match_by_words(self, words: Iterable[str]) -> list[Eventuality]:
        words = tuple(words)
        if not words:
            raise ValueError("empty word query")
        keys = self.word_index.get(words[0], set())
        return sorted((self.eventualities[k] for k in keys if self.eventualities[k].words == words),
                      key=lambda e: e.key)

    def check_integrity(self) -> None:
        for (h, t), w in self._weights.items():
            if h not in self.eventualities or t not in self.eventualities:
                raise StoreError(f"dangling edge {h!r} -> {t!r}")
            if not any(v > 0 for v in w.values()):
                raise StoreError(f"edge {h!r} -> {t!r} has no positive weight")
            if t not in self._out.get(h, ()) or h not in self._in.get(t, ()):
                raise StoreError(f"adjacency index out of sync for {h!r} -> {t!r}")
        n_out = sum(len(v) for v in self._out.values())
        n_in = sum(len(v) for v in self._in.values())
        if n_out != len(self._weights) or n_in != len(self._weights):
            raise StoreError("adjacency index holds stale entries")
        for key, e in self.eventualities.items():
            for w in e.words:
                if key not in self.word_index.get(w, ()):
                    raise StoreError(f"word index misses {w!r} for {key!r}")

    def scaled(self, factor: float) -> "KnowledgeGraph":
        g = self.copy()
        g._weights = {pair: {t: v * factor for t, v in w.items()} for pair, w in g._weights.items()}
        return g

    def copy(self) -> "KnowledgeGraph":
        g = KnowledgeGraph()
        g.eventualities = dict(self.eventualities)
        g._weights = {pair: dict(w) for pair, w in self._weights.items()}
        g._out = {k: set(v) for k, v in self._out.items()}
        g._in = {k: set(v) for k, v in self._in.items()}
        g.word_index = {k: set(v) for k, v in self.word_index.items()}
        return g


def pair_count(weights: dict[RelationType, float]) -> float:
    """Number of sentences the pair was seen in: its Co_Occurrence weight, or
    the total weight for edges that carry no Co_Occurrence entry."""
    if CO in weights:
        return weights[CO]
    return sum(weights.values())


def filter_core(g: KnowledgeGraph, min_freq: int = 2) -> KnowledgeGraph:
    """Drop eventualities and pairs seen fewer than ``min_freq`` times."""
    if min_freq < 1:
        raise ValueError("min_freq must be >= 1")
    core = KnowledgeGraph()
    for e in g.eventualities.values():
        if e.frequency >= min_freq:
            core.upsert_eventuality(e, e.frequency)
    for edge in g.edges():
        if edge.head in core and edge.tail in core and pair_count(edge.weights) >= min_freq:
            for t, w in edge.weights.items():
                core.upsert_relation(edge.head, edge.tail, t, w)
    return core


def save(g: KnowledgeGraph, directory) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    with open(d / EVENTUALITY_FILE, "w", encoding="utf-8", newline="\n") as fh:
        for key in sorted(g.eventualities):
            fh.write(g.eventualities[key].dumps() + "\n")
    with open(d / RELATION_FILE, "w", encoding="utf-8", newline="\n") as fh:
        for edge in sorted(g.edges(), key=lambda e: (e.head, e.tail)):
            fh.write(json.dumps(edge.to_json(), ensure_ascii=False) + "\n")


def _read_jsonl(path: Path):
    if not path.exists():
        raise StoreLoadError(path, 0, "file not found")
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise StoreLoadError(path, lineno, f"invalid JSON ({exc.msg})") from None


def load(directory) -> KnowledgeGraph:
    d = Path(directory)
    g = KnowledgeGraph()
    path = d / EVENTUALITY_FILE
    for lineno, obj in _read_jsonl(path):
        try:
            e = Eventuality.from_json(obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise StoreLoadError(path, lineno, f"bad eventuality record: {exc}") from None
        if e.frequency < 1:
            raise StoreLoadError(path, lineno, "frequency must be >= 1")
        g.upsert_eventuality(e, e.frequency)
    path = d / RELATION_FILE
    for lineno, obj in _read_jsonl(path):
        try:
            head, tail, weights = obj["h"], obj["t"], obj["w"]
            for name, w in weights.items():
                g.upsert_relation(head, tail, relation_type(name), float(w))
        except (KeyError, TypeError, ValueError, AttributeError, StoreError) as exc:
            raise StoreLoadError(path, lineno, f"bad relation record: {exc}") from None
    return g
