"""Command line entry point: ``eventkg <command> ...``.

Every stage reads and writes files so it can be rerun on its own:

    extract   CoNLL-U -> eventualities.jsonl + instances.jsonl
    seed      instances -> seed-labelled instances
    bootstrap instances + seeds -> labelled instances + telemetry
    build     eventualities + instance files -> graph directory
    query     one/two-hop retrieval against a graph directory
    wsc       pronoun questions -> JSON report
    report    figures and TSV summaries
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from multiprocessing import Pool
from pathlib import Path

from . import __version__
from .conllu import DEFAULT_CLAUSAL_LABELS, ConlluError, is_clausal, iter_conllu
from .eventuality import FORMAT_SCHEMA_VERSION, Eventuality
from .extract import extract_eventualities
from .patterns import PATTERN_CODES, PATTERN_SET_VERSION
from .relations import DISCOURSE_TYPES, RelationType, TrainingInstance, build_instances, match_seed, relation_type

log = logging.getLogger("eventkg")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNKNOWN_EVENT = 3
EXIT_AMBIGUOUS = 4

BE_FORMS = frozenset({"be", "am", "is", "are", "was", "were", "been", "being", "'m", "'s", "'re"})


class CliError(Exception):
    def __init__(self, message, code=EXIT_ERROR):
        super().__init__(message)
        self.code = code


def _read_jsonl(path):
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if line.strip():
                    try:
                        yield json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise CliError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _write_jsonl(path, lines):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def _read_instances(path) -> list[TrainingInstance]:
    out = []
    for obj in _read_jsonl(path):
        try:
            out.append(TrainingInstance.from_json(obj))
        except (KeyError, ValueError, TypeError) as exc:
            raise CliError(f"{path}: bad instance record: {exc}") from None
    return out


# --- extract -----------------------------------------------------------------

def _process(args):
    graph, clausal = args
    if is_clausal(graph, clausal):
        return None
    es = extract_eventualities(graph)
    return es, build_instances(graph, es)


def _graphs(paths, ud2, stats):
    for path in paths:
        try:
            fh = open(path, encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc.strerror}") from None
        with fh:
            for item in iter_conllu(fh, ud2=ud2):
                if isinstance(item, ConlluError):
                    stats["errors"] += 1
                    log.warning("%s: sentence %s skipped: %s", path, item.sentence_id, item)
                    continue
                stats["sentences"] += 1
                yield item


def cmd_extract(args) -> int:
    clausal = frozenset(args.clausal_labels.split(",")) if args.clausal_labels else DEFAULT_CLAUSAL_LABELS
    stats = Counter()
    events: dict[str, Eventuality] = {}
    counts: Counter = Counter()
    instances = []
    jobs = ((g, clausal) for g in _graphs(args.input, args.ud2, stats))
    if args.workers > 1:
        pool = Pool(args.workers)
        results = pool.imap(_process, jobs, chunksize=64)
    else:
        pool = None
        results = map(_process, jobs)
    try:
        for res in results:
            if res is None:
                stats["clausal"] += 1
                continue
            es, xs = res
            for e in es:
                counts[e.key] += 1
                events.setdefault(e.key, e)
            instances.extend(xs)
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    _write_jsonl(args.out_events, (events[k].with_frequency(counts[k]).dumps() for k in events))
    _write_jsonl(args.out_instances, (x.dumps() for x in instances))

    per_code = Counter()
    unique = Counter()
    for k, e in events.items():
        per_code[e.pattern] += counts[k]
        unique[e.pattern] += 1
    print("pattern\teventualities\tunique")
    for code in PATTERN_CODES:
        print(f"{code}\t{per_code[code]}\t{unique[code]}")
    print(f"total\t{sum(per_code.values())}\t{len(events)}")
    log.info("sentences=%d clausal_skipped=%d errors=%d instances=%d",
             stats["sentences"], stats["clausal"], stats["errors"], len(instances))
    return EXIT_OK


# --- seed ----------------------------------------------------------------------

def cmd_seed(args) -> int:
    instances = _read_instances(args.instances)
    seeds = []
    for x in instances:
        if x.sentence is None:
            raise CliError(f"{args.instances}: instance {x.sentence_id} carries no sentence")
        x.labels = match_seed(x, x.sentence)
        if x.labels:
            seeds.append(x)
    _write_jsonl(args.out, (x.dumps() for x in seeds))
    per_type = Counter(t.value for x in seeds for t in x.labels)
    print("relation\tseeds")
    for t in DISCOURSE_TYPES:
        print(f"{t.value}\t{per_type[t.value]}")
    print(f"instances\t{len(seeds)}")
    return EXIT_OK


# --- bootstrap -------------------------------------------------------------------

def cmd_bootstrap(args) -> int:
    from .bootstrap import BootstrapConfig, bootstrap

    instances = _read_instances(args.instances)
    seeds = _read_instances(args.seeds)
    telemetry_path = args.telemetry or str(Path(args.out).with_suffix("")) + ".telemetry.jsonl"
    if args.iterations == 0 or not any(x.labels for x in seeds):
        if args.iterations:
            log.warning("no seed labels; nothing to bootstrap")
        _write_jsonl(args.out, (x.dumps() for x in seeds))
        _write_jsonl(telemetry_path, [])
        return EXIT_OK
    config = BootstrapConfig(
        tau0=args.tau0, iterations=args.iterations, learning_rate=args.lr, batch_size=args.batch_size,
        dropout=args.dropout, d_e=args.d_e, d_h=args.d_h, ffn_hidden=args.ffn_hidden,
        negative_ratio=args.negative_ratio, epochs=args.epochs, seed=args.seed, workers=args.workers,
    )
    result = bootstrap(instances, seeds, config, embeddings_path=args.embeddings)
    pool = {x.ident: x for x in instances}
    for s in seeds:
        pool.setdefault(s.ident, s)
    _write_jsonl(args.out, (x.dumps() for x in result.labeled_instances(list(pool.values()))))
    _write_jsonl(telemetry_path, (json.dumps(r, sort_keys=False) for r in result.telemetry))
    if args.checkpoint_dir:
        ckpt = Path(args.checkpoint_dir)
        ckpt.mkdir(parents=True, exist_ok=True)
        for cat, model in result.models.items():
            model.save(ckpt / f"{cat.value.lower()}.json")
    print("iter\ttau\tlabeled")
    for r in result.telemetry:
        print(f"{r['iter']}\t{r['tau']:.6f}\t{r['labeled']}")
    return EXIT_OK


# --- build -------------------------------------------------------------------------

def build_graph(events_path, relation_paths):
    from .store import KnowledgeGraph

    g = KnowledgeGraph()
    for obj in _read_jsonl(events_path):
        try:
            e = Eventuality.from_json(obj)
        except (KeyError, ValueError, TypeError) as exc:
            raise CliError(f"{events_path}: bad eventuality record: {exc}") from None
        g.upsert_eventuality(e, max(e.frequency, 1))
    merged: dict[tuple, set] = {}
    for path in relation_paths:
        for x in _read_instances(path):
            merged.setdefault(x.ident, set()).update(x.labels)
    for (sid, _, _, e1, e2), labels in merged.items():
        for k in (e1, e2):
            if k not in g:
                raise CliError(f"instance in sentence {sid} references unknown eventuality {k!r}")
        g.upsert_relation(e1, e2, RelationType.CO_OCCURRENCE, 1.0)
        for t in sorted(labels, key=lambda t: t.value):
            g.upsert_relation(e1, e2, t, 1.0)
    return g


def cmd_build(args) -> int:
    from .store import filter_core, save

    g = build_graph(args.events, args.relations)
    if args.core:
        g = filter_core(g, args.min_freq)
    save(g, args.out)
    print(f"eventualities\t{len(g)}")
    print(f"edges\t{g.num_edges}")
    return EXIT_OK


# --- query -------------------------------------------------------------------------

def resolve_event(g, text: str):
    """Keys matching ``text``: a literal key, an exact word match, or a match
    where a query word ``be`` stands for any form of *be*."""
    if "|" in text and text in g:
        return [text]
    words = tuple(text.lower().split())
    hits = g.match_by_words(words)
    if not hits and "be" in words:
        slots = [i for i, w in enumerate(words) if w == "be"]
        for e in g.eventualities.values():
            if len(e.words) == len(words) and all(
                (e.words[i] in BE_FORMS) if i in slots else e.words[i] == w for i, w in enumerate(words)
            ):
                hits.append(e)
        hits.sort(key=lambda e: e.key)
    return [e.key for e in hits]


def _one(g, text):
    keys = resolve_event(g, text)
    if not keys:
        raise CliError(f"no eventuality matches {text!r}", EXIT_UNKNOWN_EVENT)
    if len(keys) > 1:
        print(json.dumps({"query": text, "ambiguous": keys}, ensure_ascii=False, indent=2))
        raise CliError(f"{text!r} matches {len(keys)} eventualities; pass one key with --event", EXIT_AMBIGUOUS)
    return keys[0]


def _path(spec):
    try:
        return [relation_type(r) for r in spec.split(",") if r.strip()]
    except ValueError as exc:
        raise CliError(str(exc)) from None


def cmd_query(args) -> int:
    from . import inference
    from .store import StoreLoadError, load

    try:
        g = load(args.kg)
    except StoreLoadError as exc:
        raise CliError(str(exc)) from None
    head = _one(g, args.event)
    include_co = not args.exclude_cooccurrence
    if args.mode == "tails":
        if not args.relations:
            raise CliError("tails queries need --relations")
        path = _path(args.relations)
        try:
            results = inference.retrieve(g, head, path, args.topk, reverse=args.reverse)
        except ValueError as exc:
            raise CliError(str(exc)) from None
        query = {"event": head, "relations": [t.value for t in path], "reverse": args.reverse}
    else:
        if not args.event2:
            raise CliError("rels queries need --event2")
        tail = _one(g, args.event2)
        results = inference.relation_paths(g, head, tail, include_co)
        if args.relations:
            wanted = tuple(_path(args.relations))
            results = [r for r in results if r.target == wanted]
        results = results[:args.topk]
        query = {"event": head, "event2": tail}
    doc = {"query": query, "results": [r.to_json() for r in results]}
    text = json.dumps(doc, ensure_ascii=False, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return EXIT_OK


# --- wsc -----------------------------------------------------------------------

def cmd_wsc(args) -> int:
    from . import wsc
    from .store import StoreLoadError, load

    try:
        g = load(args.kg)
    except StoreLoadError as exc:
        raise CliError(str(exc)) from None
    try:
        questions = wsc.load_questions(args.questions)
    except OSError as exc:
        raise CliError(f"cannot read {args.questions}: {exc.strerror}") from None
    except (KeyError, ValueError, TypeError) as exc:
        raise CliError(f"{args.questions}: bad question: {exc}") from None
    rep = wsc.report(g, questions)
    Path(args.report).write_text(json.dumps(rep, indent=2) + "\n", encoding="utf-8")
    s = rep["summary"]
    print("correct\twrong\tna\tA_p\tA_o")
    print(f"{s['correct']}\t{s['wrong']}\t{s['na']}\t{s['A_p']:.4f}\t{s['A_o']:.4f}")
    return EXIT_OK


# --- report --------------------------------------------------------------------

def cmd_report(args) -> int:
    from . import plots

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if args.events:
        counts, unique, freqs = Counter(), Counter(), []
        for obj in _read_jsonl(args.events):
            counts[obj["pattern"]] += obj["freq"]
            unique[obj["pattern"]] += 1
            freqs.append(obj["freq"])
        written += plots.pattern_counts(counts, unique, out)
        written += plots.frequency_distribution(freqs, out)
    if args.telemetry:
        written += plots.bootstrap_progress(list(_read_jsonl(args.telemetry)), out)
    if args.kg:
        from .store import load

        totals = Counter()
        for edge in load(args.kg).edges():
            for t, w in edge.weights.items():
                totals[t.value] += w
        written += plots.relation_distribution(totals, out)
    if not written:
        raise CliError("report needs at least one of --events, --telemetry, --kg")
    for p in written:
        print(p)
    return EXIT_OK


# --- parser ----------------------------------------------------------------------

def _config_defaults(path) -> dict[str, str]:
    values = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise CliError(f"{path}:{lineno}: expected key=value")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eventkg", description="Eventuality knowledge graph toolkit")
    p.add_argument("--version", action="version",
                   version=f"eventkg {__version__} (patterns v{PATTERN_SET_VERSION}, format v{FORMAT_SCHEMA_VERSION})")
    p.add_argument("--config", help="key=value defaults file; flags override it")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("extract", help="extract eventualities and training instances")
    s.add_argument("--input", nargs="+", required=True)
    s.add_argument("--out-events", required=True)
    s.add_argument("--out-instances", required=True)
    s.add_argument("--ud2", action="store_true", help="map UD v2 labels (obj, obl, nsubj:pass) to v1")
    s.add_argument("--clausal-labels", help="comma list of labels that mark a sentence as clausal")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("seed", help="label instances with seed connectives")
    s.add_argument("--instances", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_seed)

    s = sub.add_parser("bootstrap", help="self-train relation classifiers")
    s.add_argument("--instances", required=True)
    s.add_argument("--seeds", required=True)
    s.add_argument("--iterations", type=int, default=10)
    s.add_argument("--tau0", type=float, default=0.5)
    s.add_argument("--out", required=True)
    s.add_argument("--telemetry")
    s.add_argument("--checkpoint-dir")
    s.add_argument("--embeddings", help="pretrained vectors, one 'word v1 .. vd' per line")
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--epochs", type=int, default=5)
    s.add_argument("--lr", type=float, default=0.01)
    s.add_argument("--batch-size", type=int, default=16)
    s.add_argument("--dropout", type=float, default=0.2)
    s.add_argument("--d-e", type=int, default=32)
    s.add_argument("--d-h", type=int, default=32)
    s.add_argument("--ffn-hidden", type=int, default=64)
    s.add_argument("--negative-ratio", type=float, default=1.0)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_bootstrap)

    s = sub.add_parser("build", help="assemble and persist the graph")
    s.add_argument("--events", required=True)
    s.add_argument("--relations", nargs="+", required=True, help="instance files (all pairs and/or labelled)")
    s.add_argument("--out", required=True)
    s.add_argument("--core", action="store_true")
    s.add_argument("--min-freq", type=int, default=2)
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("query", help="eventuality or relation retrieval")
    s.add_argument("mode", choices=["tails", "rels"])
    s.add_argument("--kg", required=True)
    s.add_argument("--event", required=True)
    s.add_argument("--event2")
    s.add_argument("--relations")
    s.add_argument("--topk", type=int, default=10)
    s.add_argument("--reverse", action="store_true", help="rank heads for the given tail")
    s.add_argument("--exclude-cooccurrence", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("wsc", help="resolve pronoun questions against a graph")
    s.add_argument("--kg", required=True)
    s.add_argument("--questions", required=True)
    s.add_argument("--report", required=True)
    s.set_defaults(func=cmd_wsc)

    s = sub.add_parser("report", help="render figures and TSV summaries")
    s.add_argument("--events")
    s.add_argument("--telemetry")
    s.add_argument("--kg")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_report)
    return p


def _apply_config(parser: argparse.ArgumentParser, values: dict[str, str]) -> None:
    subs = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for sp in subs.choices.values():
        known = {}
        for action in sp._actions:
            if action.dest in values:
                v = values[action.dest]
                if isinstance(action, argparse._StoreTrueAction):
                    v = v.lower() in ("1", "true", "yes", "on")
                elif action.nargs in ("+", "*"):
                    v = v.split()
                known[action.dest] = v
        sp.set_defaults(**known)
        for action in sp._actions:
            if action.dest in known and action.required:
                action.required = False


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            _apply_config(parser, _config_defaults(known.config))
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        if getattr(args, "workers", 1) < 1:
            raise CliError("--workers must be >= 1")
        return args.func(args)
    except CliError as exc:
        print(f"eventkg: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
