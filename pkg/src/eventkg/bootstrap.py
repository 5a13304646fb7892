"""Self-training of per-category relation classifiers.

Each category (temporal, contingency, comparison, expansion) gets its own
classifier over ``{category types} + None``. An instance is encoded by three
bidirectional LSTMs (first eventuality, second eventuality, whole sentence)
whose summaries ``h1, h2, hs`` are combined as ``[h1, h2, h1 - h2, h1 * h2, hs]``
and fed to a two-layer ReLU network.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
from torch import nn
from torch.nn.utils.rnn import pack_padded_sequence, pad_sequence

from .eventuality import words_of_key
from .relations import (
    CATEGORY_TYPES,
    CLASSIFIER_CATEGORIES,
    Category,
    RelationType,
    TrainingInstance,
    relation_type,
)

logger = logging.getLogger(__name__)

PAD, UNK = 0, 1
NONE_LABEL = "None"


@dataclass
class BootstrapConfig:
    tau0: float = 0.5
    iterations: int = 10
    learning_rate: float = 0.01
    batch_size: int = 16
    dropout: float = 0.2
    d_e: int = 32
    d_h: int = 32
    ffn_hidden: int = 64
    negative_ratio: float = 1.0
    epochs: int = 5
    seed: int = 42
    workers: int = 1

    def __post_init__(self):
        if not 0 < self.tau0 < 1:
            raise ValueError("tau0 must lie in (0, 1)")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        for name in ("batch_size", "d_e", "d_h", "ffn_hidden", "epochs", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.d_h % 2:
            raise ValueError("d_h must be even (two LSTM directions of d_h/2)")
        if not 0 <= self.dropout < 1:
            raise ValueError("dropout must lie in [0, 1)")
        if self.learning_rate <= 0 or self.negative_ratio < 0:
            raise ValueError("learning_rate must be positive and negative_ratio non-negative")


def anneal_threshold(tau0: float, k: float, K: float) -> float:
    """tau_k = tau0 + (1 - tau0) / (1 + exp(-(k - K/2)))."""
    if not 0 < tau0 < 1:
        raise ValueError("tau0 must lie in (0, 1)")
    if K < 0 or not 0 <= k <= K:
        raise ValueError("need 0 <= k <= K")
    return tau0 + (1.0 - tau0) / (1.0 + math.exp(-(k - K / 2.0)))


def instance_text(x: TrainingInstance) -> tuple[list[str], list[str], list[str]]:
    e1, e2 = words_of_key(x.e1_key), words_of_key(x.e2_key)
    sent = x.sentence_forms() or e1 + e2
    return e1, e2, sent


class Vocabulary:
    def __init__(self, words: Sequence[str] = ()):
        self.itos = ["<pad>", "<unk>"]
        self.stoi = {w: i for i, w in enumerate(self.itos)}
        for w in words:
            self.add(w)

    def add(self, w: str) -> int:
        if w not in self.stoi:
            self.stoi[w] = len(self.itos)
            self.itos.append(w)
        return self.stoi[w]

    def __len__(self):
        return len(self.itos)

    def encode(self, words: Sequence[str]) -> list[int]:
        return [self.stoi.get(w, UNK) for w in words] or [UNK]

    @classmethod
    def from_instances(cls, instances) -> "Vocabulary":
        v = cls()
        for x in instances:
            for part in instance_text(x):
                for w in part:
                    v.add(w)
        return v


def load_embeddings(path, vocab: Vocabulary, dim: int, generator: torch.Generator) -> torch.Tensor:
    """Whitespace-separated ``word v1 .. vd`` lines; unseen words keep a random init."""
    weight = (torch.rand(len(vocab), dim, generator=generator, dtype=torch.float64) * 0.2 - 0.1).float()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip().split(" ")
            if len(parts) != dim + 1:
                raise ValueError(f"{path}:{lineno}: expected {dim} values")
            if parts[0] in vocab.stoi:
                weight[vocab.stoi[parts[0]]] = torch.tensor([float(v) for v in parts[1:]])
    weight[PAD] = 0.0
    return weight


class _Dropout(nn.Module):
    # draws from an explicit generator so classifiers stay independent under threads
    def __init__(self, p: float, generator: torch.Generator):
        super().__init__()
        self.p = p
        self.generator = generator

    def forward(self, x):
        if not self.training or self.p == 0:
            return x
        keep = torch.rand(x.shape, generator=self.generator, dtype=x.dtype) >= self.p
        return x * keep / (1.0 - self.p)


class RelationClassifier(nn.Module):
    def __init__(self, vocab_size: int, n_out: int, d_e: int, d_h: int, ffn_hidden: int,
                 dropout: float, generator: torch.Generator):
        super().__init__()
        self.embed = nn.Embedding(vocab_size, d_e, padding_idx=PAD)
        self.enc_e1 = nn.LSTM(d_e, d_h // 2, batch_first=True, bidirectional=True)
        self.enc_e2 = nn.LSTM(d_e, d_h // 2, batch_first=True, bidirectional=True)
        self.enc_s = nn.LSTM(d_e, d_h // 2, batch_first=True, bidirectional=True)
        self.hidden = nn.Linear(5 * d_h, ffn_hidden)
        self.out = nn.Linear(ffn_hidden, n_out)
        self.drop = _Dropout(dropout, generator)
        self._init(generator, d_h)

    def _init(self, gen, d_h):
        with torch.no_grad():
            for name, p in self.named_parameters():
                if name.startswith("embed"):
                    bound = 0.1
                elif name.startswith("enc"):
                    bound = 1.0 / math.sqrt(d_h // 2)
                else:
                    bound = 1.0 / math.sqrt(p.shape[-1])
                p.copy_(torch.rand(p.shape, generator=gen, dtype=torch.float64).to(p.dtype) * 2 * bound - bound)
            self.embed.weight[PAD].zero_()

    def _summary(self, lstm, ids, lengths):
        packed = pack_padded_sequence(self.embed(ids), lengths, batch_first=True, enforce_sorted=False)
        _, (h, _) = lstm(packed)
        return torch.cat([h[0], h[1]], dim=-1)

    def forward(self, e1, e1_len, e2, e2_len, s, s_len):
        h1 = self._summary(self.enc_e1, e1, e1_len)
        h2 = self._summary(self.enc_e2, e2, e2_len)
        hs = self._summary(self.enc_s, s, s_len)
        feats = torch.cat([h1, h2, h1 - h2, h1 * h2, hs], dim=-1)
        hidden = torch.relu(self.hidden(self.drop(feats)))
        return self.out(self.drop(hidden))


def _batch(encoded: list[tuple[list[int], list[int], list[int]]], dtype=torch.long):
    cols = []
    for part in range(3):
        seqs = [torch.tensor(row[part], dtype=dtype) for row in encoded]
        cols.append(pad_sequence(seqs, batch_first=True, padding_value=PAD))
        cols.append(torch.tensor([len(row[part]) for row in encoded], dtype=torch.long))
    return cols


class ClassifierModel:
    """A trained classifier for one category plus its vocabulary."""

    def __init__(self, category: Category, vocab: Vocabulary, config: BootstrapConfig,
                 generator: torch.Generator | None = None, embeddings: torch.Tensor | None = None):
        self.category = category
        self.vocab = vocab
        self.config = config
        self.labels: list[str] = [t.value for t in CATEGORY_TYPES[category]] + [NONE_LABEL]
        self.generator = generator or torch.Generator().manual_seed(config.seed)
        self.net = RelationClassifier(len(vocab), len(self.labels), config.d_e, config.d_h,
                                      config.ffn_hidden, config.dropout, self.generator)
        if embeddings is not None:
            with torch.no_grad():
                self.net.embed.weight.copy_(embeddings)
        self.optimizer = torch.optim.Adam(self.net.parameters(), lr=config.learning_rate)
        self.loss_history: list[float] = []

    @property
    def types(self) -> list[RelationType]:
        return list(CATEGORY_TYPES[self.category])

    def encode(self, x: TrainingInstance):
        return tuple(self.vocab.encode(part) for part in instance_text(x))

    def logits(self, instances: Sequence[TrainingInstance]) -> torch.Tensor:
        return self.net(*_batch([self.encode(x) for x in instances]))

    def predict_proba(self, instances: Sequence[TrainingInstance], batch_size: int = 256) -> np.ndarray:
        self.net.eval()
        out = []
        with torch.no_grad():
            for i in range(0, len(instances), batch_size):
                out.append(torch.softmax(self.logits(instances[i:i + batch_size]).double(), dim=-1).numpy())
        return np.concatenate(out) if out else np.zeros((0, len(self.labels)))

    def score_instance(self, x: TrainingInstance) -> dict[str, float]:
        probs = self.predict_proba([x])[0]
        return {lab: float(p) for lab, p in zip(self.labels, probs)}

    def fit(self, rows: list[tuple[TrainingInstance, int]], epochs: int) -> list[float]:
        """Cross-entropy training on (instance, label index) rows; returns epoch-mean losses."""
        loss_fn = nn.CrossEntropyLoss()
        encoded = [(self.encode(x), y) for x, y in rows]
        bs = self.config.batch_size
        history = []
        for _ in range(epochs):
            self.net.train()
            order = torch.randperm(len(encoded), generator=self.generator).tolist()
            total, count = 0.0, 0
            for i in range(0, len(order), bs):
                chunk = [encoded[j] for j in order[i:i + bs]]
                target = torch.tensor([y for _, y in chunk], dtype=torch.long)
                self.optimizer.zero_grad()
                loss = loss_fn(self.net(*_batch([e for e, _ in chunk])), target)
                loss.backward()
                self.optimizer.step()
                total += loss.item() * len(chunk)
                count += len(chunk)
            history.append(total / max(count, 1))
        self.loss_history.extend(history)
        return history

    def state_json(self) -> dict:
        tensors = {
            name: {"shape": list(t.shape), "data": t.detach().double().flatten().tolist()}
            for name, t in self.net.state_dict().items()
        }
        return {
            "category": self.category.value,
            "labels": self.labels,
            "config": asdict(self.config),
            "vocabulary": self.vocab.itos,
            "tensors": tensors,
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.state_json()), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "ClassifierModel":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        vocab = Vocabulary(obj["vocabulary"][2:])
        model = cls(Category(obj["category"]), vocab, BootstrapConfig(**obj["config"]))
        state = {
            name: torch.tensor(spec["data"], dtype=torch.float32).reshape(spec["shape"])
            for name, spec in obj["tensors"].items()
        }
        model.net.load_state_dict(state)
        return model


def score_instance(model: ClassifierModel, x: TrainingInstance) -> dict[str, float]:
    return model.score_instance(x)


def _category_of_labels(labels, category: Category) -> list[RelationType]:
    return sorted((t for t in labels if t.category is category), key=lambda t: t.value)


def _training_rows(model: ClassifierModel, pool, labels, rng: np.random.Generator):
    positives = []
    unlabeled = []
    for x in pool:
        mine = _category_of_labels(labels.get(x.ident, ()), model.category)
        if mine:
            positives.extend((x, model.labels.index(t.value)) for t in mine)
        else:
            unlabeled.append(x)
    if not positives:
        raise ValueError(f"no labelled instances for category {model.category.value}")
    n_neg = min(len(unlabeled), int(round(model.config.negative_ratio * len(positives))))
    picks = rng.choice(len(unlabeled), size=n_neg, replace=False) if n_neg else []
    none = model.labels.index(NONE_LABEL)
    return positives + [(unlabeled[i], none) for i in sorted(picks)]


def train_category(
    instances: Sequence[TrainingInstance],
    category: Category,
    config: BootstrapConfig,
    labels: dict | None = None,
    model: ClassifierModel | None = None,
    vocab: Vocabulary | None = None,
    rng: np.random.Generator | None = None,
    epochs: int | None = None,
) -> ClassifierModel:
    """Fit (or keep fitting) the ``category`` classifier.

    Labelled instances of the category are positives; ``negative_ratio`` times
    as many instances without a label in the category are drawn as None.
    """
    if labels is None:
        labels = {x.ident: set(x.labels) for x in instances}
    if model is None:
        gen = torch.Generator().manual_seed(config.seed * 31 + CLASSIFIER_CATEGORIES.index(category))
        model = ClassifierModel(category, vocab or Vocabulary.from_instances(instances), config, gen)
    if rng is None:
        rng = np.random.default_rng(config.seed)
    rows = _training_rows(model, instances, labels, rng)
    model.fit(rows, epochs if epochs is not None else config.epochs)
    return model


@dataclass
class BootstrapResult:
    labels: dict[tuple, set[RelationType]]
    telemetry: list[dict]
    models: dict[Category, ClassifierModel]

    def labeled_instances(self, instances: Sequence[TrainingInstance]) -> list[TrainingInstance]:
        out = []
        for x in instances:
            lab = self.labels.get(x.ident)
            if lab:
                out.append(TrainingInstance(x.e1_key, x.e2_key, x.sentence_id, x.span_gap, set(lab),
                                            x.e1_positions, x.e2_positions, x.sentence))
        return out


def _label_category(model: ClassifierModel, pool, labels, tau: float) -> list[tuple[tuple, RelationType]]:
    todo = [x for x in pool if not _category_of_labels(labels.get(x.ident, ()), model.category)]
    if not todo:
        return []
    probs = model.predict_proba(todo)
    n_types = len(model.types)
    added = []
    for x, row in zip(todo, probs):
        typed = row[:n_types]
        best = int(np.argmax(typed))
        if typed[best] > tau:
            added.append((x.ident, model.types[best]))
    return added


def bootstrap(
    all_instances: Sequence[TrainingInstance],
    seeds: Sequence[TrainingInstance],
    config: BootstrapConfig,
    embeddings_path=None,
) -> BootstrapResult:
    """Iteratively train the four category classifiers and absorb confident predictions."""
    pool = list(all_instances)
    known = {x.ident for x in pool}
    for s in seeds:
        if s.ident not in known:
            pool.append(s)
            known.add(s.ident)
    labels: dict[tuple, set[RelationType]] = {}
    for s in seeds:
        if s.labels:
            labels.setdefault(s.ident, set()).update(s.labels)
    if not labels:
        raise ValueError("bootstrapping needs at least one seed label")

    vocab = Vocabulary.from_instances(pool)
    models: dict[Category, ClassifierModel] = {}
    telemetry = []
    for k in range(1, config.iterations + 1):
        tau = anneal_threshold(config.tau0, k, config.iterations)
        active = [c for c in CLASSIFIER_CATEGORIES
                  if any(t.category is c for lab in labels.values() for t in lab)]

        def run(cat: Category):
            idx = CLASSIFIER_CATEGORIES.index(cat)
            model = models.get(cat)
            if model is None:
                gen = torch.Generator().manual_seed(config.seed * 31 + idx)
                emb = None
                if embeddings_path is not None:
                    emb = load_embeddings(embeddings_path, vocab, config.d_e, gen)
                model = ClassifierModel(cat, vocab, config, gen, emb)
            rng = np.random.default_rng([config.seed, k, idx])
            train_category(pool, cat, config, labels, model=model, rng=rng)
            return cat, model, _label_category(model, pool, labels, tau)

        if config.workers > 1:
            with ThreadPoolExecutor(config.workers) as ex:
                outcomes = list(ex.map(run, active))
        else:
            outcomes = [run(c) for c in active]

        # merge after all categories finish so no classifier sees another's new labels
        for cat, model, added in outcomes:
            models[cat] = model
            for ident, t in added:
                labels.setdefault(ident, set()).add(t)

        per_type: dict[str, int] = {}
        for lab in labels.values():
            for t in lab:
                per_type[t.value] = per_type.get(t.value, 0) + 1
        telemetry.append({"iter": k, "tau": tau, "labeled": len(labels),
                          "per_type": dict(sorted(per_type.items()))})
        logger.info("iteration %d: tau=%.4f labeled=%d", k, tau, len(labels))
    return BootstrapResult(labels, telemetry, models)


def parse_labels(names) -> set[RelationType]:
    return {relation_type(n) for n in names}
