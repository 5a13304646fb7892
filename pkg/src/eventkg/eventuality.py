from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

FORMAT_SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class Eventuality:
    """A hyperedge over words: forms in sentence order plus internal dependency edges.

    ``edges`` use 0-based positions local to ``words``. ``positions`` holds the
    1-based sentence indexes the words came from and is empty for eventualities
    loaded from a store.
    """

    words: tuple[str, ...]
    upos: tuple[str, ...]
    edges: tuple[tuple[int, str, int], ...]
    pattern: str
    frequency: int = 0
    positions: tuple[int, ...] = field(default=(), compare=False)
    center: int = field(default=0, compare=False)

    def __post_init__(self):
        n = len(self.words)
        if n == 0:
            raise ValueError("eventuality has no words")
        if len(self.upos) != n:
            raise ValueError("words and upos differ in length")
        if self.positions and (len(self.positions) != n or list(self.positions) != sorted(self.positions)):
            raise ValueError("positions must be sorted and match words")
        for g, _, d in self.edges:
            if not (0 <= g < n and 0 <= d < n):
                raise ValueError(f"edge ({g}, {d}) points outside the eventuality")
        if self.frequency < 0:
            raise ValueError("frequency must be non-negative")

    @property
    def key(self) -> str:
        return canonical_key(self)

    @property
    def text(self) -> str:
        return " ".join(self.words)

    @property
    def span(self) -> tuple[int, int]:
        return self.positions[0], self.positions[-1]

    def with_frequency(self, frequency: int) -> "Eventuality":
        return replace(self, frequency=frequency)

    def to_json(self) -> dict:
        return {
            "key": self.key,
            "words": list(self.words),
            "upos": list(self.upos),
            "edges": [[g, rel, d] for g, rel, d in self.edges],
            "pattern": self.pattern,
            "freq": self.frequency,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False)

    @classmethod
    def from_json(cls, obj: dict) -> "Eventuality":
        e = cls(
            words=tuple(obj["words"]),
            upos=tuple(obj["upos"]),
            edges=tuple((int(g), str(rel), int(d)) for g, rel, d in obj["edges"]),
            pattern=obj["pattern"],
            frequency=int(obj.get("freq", 0)),
        )
        if "key" in obj and obj["key"] != e.key:
            raise ValueError(f"stored key {obj['key']!r} does not match content {e.key!r}")
        return e


def canonical_key(e: Eventuality) -> str:
    """Forms joined by spaces, then ``|``, then sorted ``gov:rel:dep`` edges."""
    edges = sorted(f"{g}:{rel}:{d}" for g, rel, d in e.edges)
    return " ".join(e.words) + "|" + " ".join(edges)


def words_of_key(key: str) -> list[str]:
    return key.split("|", 1)[0].split(" ")
