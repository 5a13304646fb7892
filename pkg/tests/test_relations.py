import time

import pytest

from eventkg.extract import extract_eventualities
from eventkg.relations import (
    CATEGORY_OF, Category, RelationType as R, TrainingInstance, build_instances, co_occurrence_pairs,
    match_seed, relation_type, seed_rules, seed_sentence,
)
from helpers import sent


def connective_sentence(conn, sid="c"):
    """``i sleep <conn> i eat apple`` with the connective attached to ``eat``."""
    words = conn.split()
    n = len(words)
    eat = 3 + n + 1
    parts = ["i/PRON/2/nsubj", "sleep/VERB/0/root"]
    for j, w in enumerate(words):
        parts.append(f"{w}/SCONJ/{eat}/mark" if j == 0 else f"{w}/ADP/3/mwe")
    parts += [f"i/PRON/{eat}/nsubj", "eat/VERB/2/advcl", f"apple/NOUN/{eat}/dobj"]
    return sent(" ".join(parts), sid)


FIXTURE = [
    ("before", R.PRECEDENCE), ("till", R.PRECEDENCE), ("after", R.SUCCESSION),
    ("meanwhile", R.SYNCHRONOUS), ("at the same time", R.SYNCHRONOUS), ("because", R.REASON),
    ("so", R.RESULT), ("so that", R.RESULT), ("if", R.CONDITION), ("but", R.CONTRAST),
    ("on the other hand", R.CONTRAST), ("although", R.CONCESSION), ("and", R.CONJUNCTION),
    ("for example", R.INSTANTIATION), ("for instance", R.INSTANTIATION),
    ("in other words", R.RESTATEMENT), ("or", R.ALTERNATIVE), ("except", R.EXCEPTION),
    ("unless", R.ALTERNATIVE),
]


def test_twenty_sentence_seed_fixture():
    t0 = time.perf_counter()
    got = []
    for i, (conn, _) in enumerate(FIXTURE):
        xs = seed_sentence(connective_sentence(conn, str(i)), extract_eventualities(connective_sentence(conn, str(i))))
        assert len(xs) == 1
        got.append(xs[0].labels)
    trailing = sent("i/PRON/2/nsubj sleep/VERB/0/root ,/PUNCT/5/punct i/PRON/5/nsubj eat/VERB/2/advcl "
                    "apple/NOUN/5/dobj instead/ADV/5/advmod", "t")
    (x,) = seed_sentence(trailing, extract_eventualities(trailing))
    got.append(x.labels)
    expected = [{r} for _, r in FIXTURE] + [{R.CHOSEN_ALTERNATIVE}]
    assert got == expected
    covered = set().union(*expected)
    assert covered == set(R) - {R.CO_OCCURRENCE}
    assert time.perf_counter() - t0 < 1.0


def test_while_produces_nothing():
    g = connective_sentence("while")
    (x,) = seed_sentence(g, extract_eventualities(g))
    assert x.labels == set()
    assert not any(r.connective == ("while",) for r in seed_rules())


def test_running_examples():
    g = sent("i/PRON/3/nsubj am/AUX/3/cop hungry/ADJ/0/root ,/PUNCT/3/punct so/ADV/7/advmod "
             "i/PRON/7/nsubj eat/VERB/3/advcl anything/PRON/7/dobj")
    (x,) = seed_sentence(g, extract_eventualities(g))
    assert (x.e1_key.split("|")[0], x.e2_key.split("|")[0], x.labels) == ("i am hungry", "i eat anything", {R.RESULT})
    g = sent("i/PRON/2/nsubj make/VERB/0/root a/DET/4/det call/NOUN/2/dobj before/SCONJ/7/mark "
             "i/PRON/7/nsubj go/VERB/2/advcl")
    (x,) = seed_sentence(g, extract_eventualities(g))
    assert x.labels == {R.PRECEDENCE}


def test_comma_optional_and_case():
    with_comma = sent("i/PRON/2/nsubj sleep/VERB/0/root ,/PUNCT/6/punct then/ADV/6/advmod "
                      "i/PRON/6/nsubj eat/VERB/2/advcl")
    (x,) = seed_sentence(with_comma, extract_eventualities(with_comma))
    assert x.labels == {R.PRECEDENCE}
    (x,) = seed_sentence(connective_sentence("then"), extract_eventualities(connective_sentence("then")))
    assert x.labels == {R.PRECEDENCE}


def test_unanchored_connective_ignored():
    # "because" hangs off a third word outside both eventualities
    g = sent("i/PRON/2/nsubj sleep/VERB/0/root because/SCONJ/4/mark tired/ADJ/2/conj "
             "i/PRON/6/nsubj eat/VERB/2/advcl")
    (x,) = seed_sentence(g, extract_eventualities(g))
    assert x.labels == set()


def test_seed_rule_inventory():
    rules = {r.connective: r.relation for r in seed_rules()}
    assert rules[("so", "that")] is R.RESULT
    assert rules[("because",)] is R.REASON
    assert rules[("except",)] is R.EXCEPTION
    assert all(r.connective == tuple(w.lower() for w in r.connective) for r in seed_rules())


def test_categories():
    assert CATEGORY_OF[R.PRECEDENCE] is Category.TEMPORAL
    assert CATEGORY_OF[R.CONDITION] is Category.CONTINGENCY
    assert CATEGORY_OF[R.CONCESSION] is Category.COMPARISON
    assert CATEGORY_OF[R.EXCEPTION] is Category.EXPANSION
    assert CATEGORY_OF[R.CO_OCCURRENCE] is Category.CO_OCCURRENCE
    assert relation_type("co-occurrence") is R.CO_OCCURRENCE
    with pytest.raises(ValueError):
        relation_type("Because")


def _verbs(n):
    # n independent clauses chained by advcl off the first verb
    parts, idx = [], 1
    for k in range(n):
        parts.append(f"p{k}/PRON/{idx + 1}/nsubj")
        parts.append(f"v{k}/VERB/{0 if k == 0 else 2}/{'root' if k == 0 else 'advcl'}")
        idx += 2
    g = sent(" ".join(parts))
    return g, extract_eventualities(g)


@pytest.mark.parametrize("n,pairs", [(1, 0), (2, 1), (3, 3)])
def test_pair_cardinalities(n, pairs):
    g, es = _verbs(n)
    assert len(es) == n
    assert len(build_instances(g, es)) == pairs
    assert len(co_occurrence_pairs(es)) == pairs


def test_seeds_are_subset_of_pairs():
    g = connective_sentence("because")
    es = extract_eventualities(g)
    seeded = {(x.e1_key, x.e2_key) for x in seed_sentence(g, es) if x.labels}
    assert seeded <= set(co_occurrence_pairs(es))


def test_instance_validation_and_json():
    with pytest.raises(ValueError):
        TrainingInstance("a|", "a|", "s", (1, 1))
    with pytest.raises(ValueError):
        TrainingInstance("a|", "b|", "s", (1, 1), {R.CO_OCCURRENCE})
    g = connective_sentence("because")
    (x,) = seed_sentence(g, extract_eventualities(g))
    back = TrainingInstance.from_json(x.to_json())
    assert back == x and back.sentence.tokens == g.tokens
    assert match_seed(back, back.sentence) == {R.REASON}
