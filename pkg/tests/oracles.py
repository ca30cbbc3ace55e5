"""Brute-force references, deliberately independent of tssort internals."""
import itertools
import math

import numpy as np


def closure_by_matmul(adj):
    """reach[i, j]: path of length >= 1, via repeated boolean products."""
    a = np.asarray(adj, dtype=bool).astype(int)
    d = a.shape[0]
    reach = a.copy()
    power = a.copy()
    for _ in range(d):
        power = ((power @ a) > 0).astype(int)
        reach = ((reach + power) > 0).astype(int)
    return reach.astype(bool)


def dfs_reach(adj):
    adj = np.asarray(adj, dtype=bool)
    d = adj.shape[0]
    reach = np.zeros((d, d), dtype=bool)
    for s in range(d):
        stack = [j for j in range(d) if adj[s, j]]
        seen = set()
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(j for j in range(d) if adj[v, j])
        for v in seen:
            reach[s, v] = True
    return reach


def sccs_from_reach(reach):
    d = reach.shape[0]
    comps = {}
    for i in range(d):
        key = frozenset([i] + [j for j in range(d) if reach[i, j] and reach[j, i]])
        comps[key] = True
    return {frozenset(c) for c in comps}


def admissible_oracle(adj):
    r = dfs_reach(adj)
    d = r.shape[0]
    return {(i, j) for i in range(d) for j in range(d) if i != j and r[i, j] and not r[j, i]}


def connected_oracle(adj):
    r = dfs_reach(adj)
    d = r.shape[0]
    return {(i, j) for i in range(d) for j in range(d) if i != j and r[i, j]}


def path_triples(adj):
    """All (i, j, length) realised by some directed path (DAG input)."""
    adj = np.asarray(adj, dtype=bool)
    d = adj.shape[0]
    triples = set()

    def walk(start, v, length):
        for j in range(d):
            if adj[v, j]:
                triples.add((start, j, length + 1))
                walk(start, j, length + 1)

    for s in range(d):
        walk(s, s, 0)
    return {t for t in triples if t[2] <= d - 1}


def incr(a, b):
    if math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9):
        return 0.5
    return 1.0 if a < b else 0.0


def pair_score(values, pairs):
    pairs = list(pairs)
    return sum(incr(values[i], values[j]) for i, j in pairs) / len(pairs)


def expm_taylor(a, terms=60):
    a = np.asarray(a, dtype=float)
    out = np.eye(a.shape[0])
    term = np.eye(a.shape[0])
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


def h_taylor(w):
    w = np.asarray(w, dtype=float)
    return float(np.trace(expm_taylor(w * w)) - w.shape[0])


def entrywise_counts(est, truth):
    tp = fp = fn = 0
    for idx in itertools.product(*(range(s) for s in np.shape(est))):
        e, t = bool(est[idx]), bool(truth[idx])
        tp += e and t
        fp += e and not t
        fn += t and not e
    return tp, fp, fn


def random_digraph(rng, d, p, self_loops=False):
    a = rng.random((d, d)) < p
    if not self_loops:
        np.fill_diagonal(a, False)
    return a


def random_dag(rng, d, p):
    a = np.tril(rng.random((d, d)) < p, k=-1)
    perm = rng.permutation(d)
    return a[np.ix_(perm, perm)]
