"""Brute-force reference computations, deliberately naive and independent
of the package code paths they check."""

from __future__ import annotations

import itertools

import numpy as np


def naive_ngrams(tokens, n):
    return [tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


def naive_rouge_n(cand, ref, n):
    """(precision, recall, f1) by enumerating n-grams into lists and
    matching them off one at a time."""
    c = naive_ngrams(cand, n)
    r = naive_ngrams(ref, n)
    pool = list(r)
    overlap = 0
    for g in c:
        if g in pool:
            pool.remove(g)
            overlap += 1
    p = overlap / len(c) if c else 0.0
    rec = overlap / len(r) if r else 0.0
    f = 2 * p * rec / (p + rec) if p + rec > 0 else 0.0
    return p, rec, f


def full_dp_lcs(a, b):
    table = np.zeros((len(a) + 1, len(b) + 1), dtype=int)
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                table[i, j] = table[i - 1, j - 1] + 1
            else:
                table[i, j] = max(table[i - 1, j], table[i, j - 1])
    return int(table[len(a), len(b)])


def naive_rouge_l(cand, ref):
    lcs = full_dp_lcs(cand, ref)
    p = lcs / len(cand) if cand else 0.0
    r = lcs / len(ref) if ref else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def rouge1_f1_of(sentence_tokens, indices, ref):
    cand = [t for i in sorted(indices) for t in sentence_tokens[i]]
    return naive_rouge_n(cand, ref, 1)[2]


def exhaustive_best_f1(sentence_tokens, ref, k):
    """Best ROUGE-1 F1 over every non-empty subset of at most ``k`` sentences."""
    best = 0.0
    n = len(sentence_tokens)
    for size in range(1, min(k, n) + 1):
        for combo in itertools.combinations(range(n), size):
            best = max(best, rouge1_f1_of(sentence_tokens, combo, ref))
    return best


def dense_power_iteration(token_lists, damping=0.85, threshold=0.0, tol=1e-12, max_iter=10000):
    """PageRank over the cosine graph using an explicit Google matrix."""
    n = len(token_lists)
    vocab = sorted({t for toks in token_lists for t in toks})
    vec = np.array([[toks.count(w) for w in vocab] for toks in token_lists], dtype=float)
    sim = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            ni, nj = np.sqrt(vec[i] @ vec[i]), np.sqrt(vec[j] @ vec[j])
            s = (vec[i] @ vec[j]) / (ni * nj) if ni > 0 and nj > 0 else 0.0
            sim[i, j] = s if s >= threshold else 0.0
    google = np.zeros((n, n))
    for i in range(n):
        row = sim[i].sum()
        for j in range(n):
            link = sim[i, j] / row if row > 0 else 1.0 / n
            google[i, j] = damping * link + (1 - damping) / n
    p = np.ones(n) / n
    for _ in range(max_iter):
        nxt = p @ google
        if np.abs(nxt - p).max() < tol:
            p = nxt
            break
        p = nxt
    return p / p.sum()
