"""Reading CoNLL-U dependency parses into sentence graphs.

Only the ID, FORM, UPOS, HEAD and DEPREL columns are consumed. Multiword
token ranges (``3-4``) and empty nodes (``3.1``) are skipped.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO

logger = logging.getLogger(__name__)

DEFAULT_CLAUSAL_LABELS = frozenset(
    {"ccomp", "csubj", "csubjpass", "acl", "acl:relcl", "parataxis"}
)

# UD v2 -> Stanford/UD v1 label names used by the built-in patterns
UD2_LABEL_MAP = {
    "obj": "dobj",
    "obl": "nmod",
    "nsubj:pass": "nsubjpass",
    "aux:pass": "auxpass",
    "csubj:pass": "csubjpass",
}


class ConlluError(ValueError):
    """A sentence block that could not be turned into a DependencyGraph."""

    def __init__(self, message: str, line: int | None = None, sentence_id: str | None = None):
        self.line = line
        self.sentence_id = sentence_id
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    upos: str
    head: int
    deprel: str

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"token index must be >= 1, got {self.index}")
        if self.head < 0:
            raise ValueError(f"head must be >= 0, got {self.head}")
        if self.head == self.index:
            raise ValueError(f"token {self.index} is its own head")
        if not self.form:
            raise ValueError(f"token {self.index} has an empty form")


@dataclass
class DependencyGraph:
    sentence_id: str
    tokens: list[Token]
    text: str = ""
    _children: dict[int, list[Token]] | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.text:
            self.text = " ".join(t.form for t in self.tokens)

    def __len__(self):
        return len(self.tokens)

    def token(self, index: int) -> Token:
        return self.tokens[index - 1]

    @property
    def root(self) -> int:
        for t in self.tokens:
            if t.head == 0:
                return t.index
        raise ConlluError("sentence has no root", sentence_id=self.sentence_id)

    def children(self, index: int) -> list[Token]:
        """Dependents of token ``index`` in sentence order."""
        if self._children is None:
            kids: dict[int, list[Token]] = {}
            for t in self.tokens:
                kids.setdefault(t.head, []).append(t)
            self._children = kids
        return self._children.get(index, [])

    def edges(self) -> list[tuple[int, str, int]]:
        return [(t.head, t.deprel, t.index) for t in self.tokens if t.head != 0]

    def validate(self) -> None:
        """Raise ConlluError unless the head structure is a single rooted tree."""
        n = len(self.tokens)
        for pos, t in enumerate(self.tokens, start=1):
            if t.index != pos:
                raise ConlluError(f"token ids not consecutive at {t.index}", sentence_id=self.sentence_id)
            if t.head > n:
                raise ConlluError(f"token {t.index} points at missing head {t.head}", sentence_id=self.sentence_id)
        roots = [t.index for t in self.tokens if t.head == 0]
        if len(roots) != 1:
            raise ConlluError(f"expected exactly one root, found {len(roots)}", sentence_id=self.sentence_id)
        for t in self.tokens:
            seen = {t.index}
            h = t.head
            while h != 0:
                if h in seen:
                    raise ConlluError(f"cyclic heads through token {t.index}", sentence_id=self.sentence_id)
                seen.add(h)
                h = self.tokens[h - 1].head


def _split_blocks(lines: Iterable[str]) -> Iterator[tuple[int, list[tuple[int, str]]]]:
    block: list[tuple[int, str]] = []
    start = 1
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            if block:
                yield start, block
                block = []
            continue
        if not block:
            start = lineno
        block.append((lineno, line))
    if block:
        yield start, block


def _build(block: list[tuple[int, str]], counter: int, ud2: bool) -> DependencyGraph:
    sid = None
    text = ""
    tokens = []
    for lineno, line in block:
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            key = key.strip()
            if key == "sent_id":
                sid = value.strip()
            elif key == "text":
                text = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluError(f"expected 10 columns, found {len(cols)}", line=lineno, sentence_id=sid)
        tid = cols[0]
        if "-" in tid or "." in tid:
            continue
        try:
            index = int(tid)
        except ValueError:
            raise ConlluError(f"non-integer ID {tid!r}", line=lineno, sentence_id=sid) from None
        try:
            head = int(cols[6])
        except ValueError:
            raise ConlluError(f"non-integer HEAD {cols[6]!r}", line=lineno, sentence_id=sid) from None
        deprel = cols[7]
        if ud2:
            deprel = UD2_LABEL_MAP.get(deprel, deprel)
        try:
            tokens.append(Token(index, cols[1].lower(), cols[3], head, deprel))
        except ValueError as exc:
            raise ConlluError(str(exc), line=lineno, sentence_id=sid) from None
    if sid is None:
        sid = str(counter)
    if not tokens:
        raise ConlluError("sentence block has no tokens", line=block[0][0], sentence_id=sid)
    graph = DependencyGraph(sid, tokens, text)
    try:
        graph.validate()
    except ConlluError as exc:
        raise ConlluError(str(exc), line=block[0][0], sentence_id=sid) from None
    return graph


def iter_conllu(stream: TextIO | Iterable[str], ud2: bool = False) -> Iterator[DependencyGraph | ConlluError]:
    """Yield one DependencyGraph per sentence block, or the ConlluError for a bad block.

    Errors are yielded rather than raised so a single malformed sentence does
    not stop the stream.
    """
    for counter, (_, block) in enumerate(_split_blocks(stream)):
        try:
            yield _build(block, counter, ud2)
        except ConlluError as exc:
            yield exc


def parse_conllu(stream: TextIO | Iterable[str] | str, ud2: bool = False) -> list[DependencyGraph]:
    """Parse every well-formed sentence; malformed blocks are logged and skipped."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    graphs = []
    for item in iter_conllu(stream, ud2=ud2):
        if isinstance(item, ConlluError):
            logger.warning("skipping sentence %s: %s", item.sentence_id, item)
            continue
        graphs.append(item)
    return graphs


def serialize_conllu(graphs: Iterable[DependencyGraph]) -> str:
    out = []
    for g in graphs:
        out.append(f"# sent_id = {g.sentence_id}")
        out.append(f"# text = {g.text}")
        for t in g.tokens:
            out.append("\t".join([str(t.index), t.form, "_", t.upos, "_", "_", str(t.head), t.deprel, "_", "_"]))
        out.append("")
    return "\n".join(out) + ("\n" if out else "")


def is_clausal(graph: DependencyGraph, labels: frozenset[str] | set[str] = DEFAULT_CLAUSAL_LABELS) -> bool:
    return any(t.deprel in labels for t in graph.tokens)
