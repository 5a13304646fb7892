"""Compact hand-written dependency parses for fixtures.

``sent("the/DET/2/det dog/NOUN/3/nsubj barks/VERB/0/root")`` builds a
DependencyGraph; each item is form/UPOS/head/deprel.
"""

from eventkg.conllu import DependencyGraph, Token, serialize_conllu


def sent(spec, sid="s"):
    tokens = []
    for i, item in enumerate(spec.split(), start=1):
        form, upos, head, rel = item.rsplit("/", 3)
        tokens.append(Token(i, form.lower(), upos, int(head), rel))
    g = DependencyGraph(sid, tokens)
    g.validate()
    return g


def to_conllu(specs):
    return serialize_conllu(sent(s, sid=str(i)) for i, s in enumerate(specs))


# One sentence per row of the pattern table, with its expected code and words.
PATTERN_EXAMPLES = [
    ("s-v", "the/DET/2/det dog/NOUN/3/nsubj barks/VERB/0/root", "dog barks"),
    ("s-v-o", "i/PRON/2/nsubj love/VERB/0/root you/PRON/2/dobj", "i love you"),
    ("s-v-a", "he/PRON/2/nsubj felt/VERB/0/root ill/ADJ/2/xcomp", "he felt ill"),
    ("s-v-o-o", "you/PRON/2/nsubj give/VERB/0/root me/PRON/2/iobj the/DET/5/det book/NOUN/2/dobj",
     "you give me book"),
    ("s-be-a", "the/DET/2/det dog/NOUN/4/nsubj is/AUX/4/cop cute/ADJ/0/root", "dog is cute"),
    ("s-v-be-a", "i/PRON/2/nsubj want/VERB/0/root to/PART/5/mark be/AUX/5/cop slim/ADJ/2/xcomp",
     "i want be slim"),
    ("s-v-be-o", "i/PRON/2/nsubj want/VERB/0/root to/PART/6/mark be/AUX/6/cop a/DET/6/det hero/NOUN/2/xcomp",
     "i want be hero"),
    ("s-v-v-o", "i/PRON/2/nsubj want/VERB/0/root to/PART/4/mark eat/VERB/2/xcomp the/DET/6/det apple/NOUN/4/dobj",
     "i want eat apple"),
    ("s-v-v", "i/PRON/2/nsubj want/VERB/0/root to/PART/4/mark go/VERB/2/xcomp", "i want go"),
    ("s-be-a-p-o", "it/PRON/3/nsubj 's/AUX/3/cop cheap/ADJ/0/root for/ADP/6/case the/DET/6/det quality/NOUN/3/nmod",
     "it 's cheap for quality"),
    ("s-v-p-o", "he/PRON/2/nsubj walks/VERB/0/root into/ADP/5/case the/DET/5/det room/NOUN/2/nmod",
     "he walks into room"),
    ("s-v-o-p-o", "he/PRON/2/nsubj plays/VERB/0/root soccer/NOUN/2/dobj with/ADP/5/case me/PRON/2/nmod",
     "he plays soccer with me"),
    ("spass-v", "the/DET/2/det bill/NOUN/4/nsubjpass is/AUX/4/auxpass paid/VERB/0/root", "bill is paid"),
    ("spass-v-p-o", "the/DET/2/det bill/NOUN/4/nsubjpass is/AUX/4/auxpass paid/VERB/0/root by/ADP/6/case me/PRON/4/nmod",
     "bill is paid by me"),
]


def flat_sentence(words, sid):
    """A parse where every word hangs off the first; enough for classifier input."""
    from eventkg.conllu import Token, DependencyGraph

    toks = [Token(i, w, "X", 0 if i == 1 else 1, "root" if i == 1 else "dep")
            for i, w in enumerate(words, start=1)]
    return DependencyGraph(sid, toks)


NOUNS = "man woman kid dog cat teacher driver cook farmer doctor nurse pilot singer baker".split()
VERBS = "eat take see find make read open close push pull carry hold drop lift".split()
OBJECTS = "apple book door box car bag cup key ball chair lamp phone coat hat".split()


def planted_corpus(seed=42, n_seed=100, n_planted=100, n_noise=200):
    """Seeds and connective-free look-alikes for two relations, plus unrelated noise.

    Result pairs carry ``foo``/``bar`` inside the eventualities, Contrast pairs
    carry ``baz``/``qux``. Returns (pool, seeds, truth) where truth maps the
    ident of each planted instance to its hidden type.
    """
    import random
    from eventkg.relations import RelationType, TrainingInstance

    rnd = random.Random(seed)
    pool, seeds, truth = [], [], {}
    kinds = [(RelationType.RESULT, "foo", "bar", "so"), (RelationType.CONTRAST, "baz", "qux", "but")]

    def ev(marker):
        return [rnd.choice(NOUNS), rnd.choice(VERBS), marker, rnd.choice(OBJECTS)]

    def make(idx, e1, e2, middle, labels):
        words = e1 + middle + e2
        sid = f"syn{idx}"
        n1 = len(e1)
        key = lambda ws: " ".join(ws) + "|1:dobj:3 1:nsubj:0 3:amod:2"
        return TrainingInstance(
            key(e1), key(e2), sid, (n1 + 1, n1 + 1 + len(middle)), set(labels),
            tuple(range(1, n1 + 1)), tuple(range(n1 + len(middle) + 1, len(words) + 1)),
            flat_sentence(words, sid))

    idx = 0
    for i in range(n_seed):
        rel, m1, m2, conn = kinds[i % 2]
        x = make(idx, ev(m1), ev(m2), [",", conn], {rel})
        idx += 1
        seeds.append(x)
        pool.append(x)
    for i in range(n_planted):
        rel, m1, m2, _ = kinds[i % 2]
        x = make(idx, ev(m1), ev(m2), [","], set())
        idx += 1
        truth[x.ident] = rel
        pool.append(x)
    for _ in range(n_noise):
        x = make(idx, ev(rnd.choice(OBJECTS)), ev(rnd.choice(NOUNS)), [","], set())
        idx += 1
        pool.append(x)
    return pool, seeds, truth


# Everyday-activity sentences with the counts used for the end-to-end corpus.
DAILY_TEMPLATES = [
    (40, "i/PRON/3/nsubj am/AUX/3/cop hungry/ADJ/0/root ,/PUNCT/3/punct so/ADV/7/advmod i/PRON/7/nsubj "
         "have/VERB/3/advcl lunch/NOUN/7/dobj ./PUNCT/3/punct"),
    (10, "i/PRON/3/nsubj am/AUX/3/cop hungry/ADJ/0/root ,/PUNCT/3/punct so/ADV/7/advmod i/PRON/7/nsubj "
         "eat/VERB/3/advcl anything/PRON/7/dobj ./PUNCT/3/punct"),
    (20, "i/PRON/3/nsubj am/AUX/3/cop hungry/ADJ/0/root ,/PUNCT/3/punct i/PRON/6/nsubj "
         "have/VERB/3/advcl lunch/NOUN/6/dobj ./PUNCT/3/punct"),
    (30, "i/PRON/2/nsubj make/VERB/0/root a/DET/4/det call/NOUN/2/dobj before/SCONJ/7/mark i/PRON/7/nsubj "
         "go/VERB/2/advcl ./PUNCT/2/punct"),
    (30, "i/PRON/2/nsubj sleep/VERB/0/root because/SCONJ/6/mark i/PRON/6/nsubj am/AUX/6/cop "
         "tired/ADJ/2/advcl ./PUNCT/2/punct"),
    (20, "i/PRON/2/nsubj rest/VERB/0/root on/ADP/5/case a/DET/5/det bench/NOUN/2/nmod because/SCONJ/9/mark "
         "i/PRON/9/nsubj am/AUX/9/cop tired/ADJ/2/advcl ./PUNCT/2/punct"),
    (20, "i/PRON/3/nsubj am/AUX/3/cop hungry/ADJ/0/root ,/PUNCT/3/punct meanwhile/ADV/8/advmod i/PRON/8/nsubj "
         "am/AUX/8/cop tired/ADJ/3/advcl ./PUNCT/3/punct"),
    (20, "i/PRON/2/nsubj have/VERB/0/root lunch/NOUN/2/dobj and/CCONJ/5/cc drink/VERB/2/conj water/NOUN/5/dobj "
         "./PUNCT/2/punct"),
    (10, "i/PRON/2/nsubj sleep/VERB/0/root ./PUNCT/2/punct"),
]


def daily_corpus():
    """About 200 parsed sentences as CoNLL-U text."""
    specs = [spec for n, spec in DAILY_TEMPLATES for _ in range(n)]
    return to_conllu(specs)


def node(name):
    """A one-word eventuality usable as a graph node."""
    from eventkg.eventuality import Eventuality

    return Eventuality((name,), ("VERB",), (), "s-v")


def random_graph(rnd, max_nodes=30, max_types=4, density=0.15):
    """Random typed weighted digraph; ``rnd`` is a random.Random."""
    from eventkg.relations import RelationType
    from eventkg.store import KnowledgeGraph

    g = KnowledgeGraph()
    n = rnd.randint(2, max_nodes)
    keys = [g.upsert_eventuality(node(f"n{i}"), rnd.randint(1, 5)) for i in range(n)]
    types = rnd.sample([t for t in RelationType], rnd.randint(1, max_types))
    for h in keys:
        for t in keys:
            if h != t and rnd.random() < density:
                for r in rnd.sample(types, rnd.randint(1, len(types))):
                    g.upsert_relation(h, t, r, float(rnd.randint(1, 9)) if rnd.random() < 0.7 else rnd.uniform(0.1, 5))
    return g, keys, types


def ev(text):
    """A word-sequence eventuality with no internal edges, keyed by its words."""
    from eventkg.eventuality import Eventuality

    words = tuple(text.split())
    return Eventuality(words, ("X",) * len(words), (), "s-v-o")


FISH = ("the/DET/2/det fish/NOUN/3/nsubj ate/VERB/0/root the/DET/5/det worm/NOUN/3/dobj ./PUNCT/3/punct")


def fish_question(qid, adjective, answer):
    """The fish/worm question pair: two sentences, candidates fish and worm."""
    from eventkg.conllu import serialize_conllu

    second = sent(f"it/PRON/3/nsubj was/AUX/3/cop {adjective}/ADJ/0/root ./PUNCT/3/punct", "b")
    return {"id": qid, "conllu": serialize_conllu([sent(FISH, "a"), second]),
            "n1": [0, 2], "n2": [0, 5], "pronoun": [1, 1], "answer": answer}


SUBJECTS = ["cat", "dog", "bird", "frog", "duck", "hen", "toad", "mole", "crow", "owl",
            "eel", "crab", "bass", "trout", "pike", "carp", "newt", "robin", "shrew", "lark"]


def fish_kg():
    """Supporting edges: 18 and 1 for hungry, 0 and 7 for tasty."""
    from eventkg.relations import RelationType
    from eventkg.store import KnowledgeGraph

    g = KnowledgeGraph()
    co = RelationType.CO_OCCURRENCE

    def link(a, b, weight=1.0):
        g.upsert_relation(g.upsert_eventuality(ev(a)), g.upsert_eventuality(ev(b)), co, weight)

    for s in SUBJECTS[:18]:
        link(f"{s} ate worm", f"{s} was hungry", weight=2.0)
    link("fish ate cat", "cat was hungry")
    for o in SUBJECTS[:7]:
        link(f"fish ate {o}", f"{o} was tasty")
    # near misses that must not count
    link("dog ate worm", "cat was hungry")
    link("dog ate bone", "dog was hungry")
    link("dog ate worm", "dog is hungry")
    return g
