"""Dense brute-force evaluation of the retrieval probabilities.

Everything is computed from a weight tensor W[h, t, r] by explicit loops over
all nodes, independently of the adjacency indexes used by the library.
"""

import numpy as np

from eventkg.relations import RelationType


class DenseOracle:
    def __init__(self, g, include_cooccurrence=True):
        self.keys = sorted(g.eventualities)
        self.types = list(RelationType)
        # relation-probability denominators may leave Co_Occurrence out
        self.mask = np.array([include_cooccurrence or t is not RelationType.CO_OCCURRENCE for t in self.types], float)
        self.idx = {k: i for i, k in enumerate(self.keys)}
        self.tidx = {t: i for i, t in enumerate(self.types)}
        n = len(self.keys)
        self.W = np.zeros((n, n, len(self.types)))
        for e in g.edges():
            for t, w in e.weights.items():
                self.W[self.idx[e.head], self.idx[e.tail], self.tidx[t]] = w

    def _dict(self, vec):
        return {self.keys[i]: float(v) for i, v in enumerate(vec) if v > 0}

    def tail_1(self, h, r):
        row = self.W[self.idx[h], :, self.tidx[r]]
        s = row.sum()
        return row / s if s > 0 else np.zeros_like(row)

    def head_1(self, t, r):
        col = self.W[:, self.idx[t], self.tidx[r]]
        s = col.sum()
        return col / s if s > 0 else np.zeros_like(col)

    def tail_2(self, h, r1, r2):
        first = self.tail_1(h, r1)
        out = np.zeros(len(self.keys))
        for m, key in enumerate(self.keys):
            if first[m] > 0:
                out += first[m] * self.tail_1(key, r2)
        return out

    def head_2(self, t, r1, r2):
        last = self.head_1(t, r2)
        out = np.zeros(len(self.keys))
        for m, key in enumerate(self.keys):
            if last[m] > 0:
                out += last[m] * self.head_1(key, r1)
        return out

    def rel_1(self, h, t):
        v = self.W[self.idx[h], self.idx[t], :] * self.mask
        s = v.sum()
        return {self.types[i]: float(x / s) for i, x in enumerate(v) if x > 0} if s > 0 else {}

    def rel_given_head(self, h, r):
        block = self.W[self.idx[h]] * self.mask
        s = block.sum()
        return float(block[:, self.tidx[r]].sum() / s) if s > 0 else 0.0

    def rel_2(self, h, t, r1, r2):
        prior = self.rel_given_head(h, r1)
        first = self.tail_1(h, r1)
        total = 0.0
        for m, key in enumerate(self.keys):
            total += prior * first[m] * self.rel_1(key, t).get(r2, 0.0)
        return total


def dense_tables(g, include_cooccurrence=True):
    """All five quantities for every node/type combination as dense arrays.

    Returns (keys, types, P1, P2, REL1, RELH, REL2) with
    P1[h, t, r], P2[h, t, r1, r2], REL1[h, t, r], RELH[h, r], REL2[h, t, r1, r2].
    """
    o = DenseOracle(g, include_cooccurrence)
    W = o.W

    def safe(num, den):
        return np.divide(num, den, out=np.zeros_like(num), where=den > 0)

    P1 = safe(W, W.sum(axis=1, keepdims=True))
    P2 = np.einsum("hmr,mts->htrs", P1, P1)
    Wm = W * o.mask
    REL1 = safe(Wm, Wm.sum(axis=2, keepdims=True))
    tot = Wm.sum(axis=1)
    RELH = safe(tot, tot.sum(axis=1, keepdims=True))
    REL2 = np.einsum("hr,hmr,mts->htrs", RELH, P1, REL1)
    return o.keys, o.types, P1, P2, REL1, RELH, REL2
