"""Comparing signature sets: cosine similarity, optimal matching, ACS,
exposure distance and PAM consensus clustering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass(frozen=True)
class MatchResult:
    pairs: tuple[tuple[int, int], ...]
    per_pair_cosine: tuple[float, ...]
    acs: float

    @property
    def total(self) -> float:
        return float(sum(self.per_pair_cosine))


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("undefined cosine: zero vector")
    return float(a @ b / (na * nb))


def cosine_matrix(h_a, h_b) -> np.ndarray:
    """All pairwise cosine similarities between columns of ``h_a`` and ``h_b``."""
    h_a = np.asarray(h_a, dtype=np.float64)
    h_b = np.asarray(h_b, dtype=np.float64)
    if h_a.shape[0] != h_b.shape[0]:
        raise ValueError(f"signature sets differ in length: {h_a.shape[0]} vs {h_b.shape[0]}")
    na = np.linalg.norm(h_a, axis=0)
    nb = np.linalg.norm(h_b, axis=0)
    if np.any(na == 0) or np.any(nb == 0):
        raise ValueError("undefined cosine: zero signature column")
    return (h_a / na).T @ (h_b / nb)


def match_signatures(h_a, h_b) -> MatchResult:
    """Match every column of ``h_a`` to a distinct column of ``h_b`` so the
    summed cosine similarity is maximal (Hungarian algorithm on ``1 - cos``)."""
    h_a = np.asarray(h_a, dtype=np.float64)
    h_b = np.asarray(h_b, dtype=np.float64)
    if h_a.shape[1] > h_b.shape[1]:
        raise ValueError(f"first set has more signatures ({h_a.shape[1]}) than the second "
                         f"({h_b.shape[1]}); swap the arguments")
    sim = cosine_matrix(h_a, h_b)
    rows, cols = linear_sum_assignment(1.0 - sim)
    cos = tuple(float(sim[i, j]) for i, j in zip(rows, cols))
    pairs = tuple((int(i), int(j)) for i, j in zip(rows, cols))
    return MatchResult(pairs, cos, float(np.mean(cos)))


def acs(match: MatchResult) -> float:
    """Average cosine similarity over the matched pairs."""
    if not match.per_pair_cosine:
        raise ValueError("empty match")
    return float(np.mean(match.per_pair_cosine))


def exposure_distance(w_a, w_b, match: MatchResult) -> float:
    """Averaged Frobenius distance between ``w_a`` and the rows of ``w_b``
    rearranged by ``match``."""
    w_a = np.asarray(w_a, dtype=np.float64)
    w_b = np.asarray(w_b, dtype=np.float64)
    if w_a.shape[1] != w_b.shape[1]:
        raise ValueError(f"exposure matrices cover different samples: {w_a.shape} vs {w_b.shape}")
    if len(match.pairs) != w_a.shape[0]:
        raise ValueError(f"match has {len(match.pairs)} pairs for {w_a.shape[0]} exposure rows")
    ia = [i for i, _ in match.pairs]
    ib = [j for _, j in match.pairs]
    diff = w_a[ia] - w_b[ib]
    return float(np.linalg.norm(diff) / diff.size)


def cosine_distance_matrix(signatures) -> np.ndarray:
    x = np.column_stack([np.asarray(s, dtype=np.float64).ravel() for s in signatures])
    d = 1.0 - cosine_matrix(x, x)
    np.fill_diagonal(d, 0.0)
    return np.maximum(d, 0.0)


def _pam_cost(d: np.ndarray, medoids) -> float:
    return float(d[:, list(medoids)].min(axis=1).sum())


def pam(d, k: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Partitioning around medoids on a precomputed distance matrix.

    Greedy BUILD followed by best-improvement SWAP.  Ties go to the lowest
    index.  Returns sorted medoid indices, per-point cluster labels (index
    into the medoid array) and the total cost.
    """
    d = np.asarray(d, dtype=np.float64)
    n = d.shape[0]
    if k < 1 or k > n:
        raise ValueError(f"k={k} must be between 1 and the number of points ({n})")

    medoids = [int(np.argmin(d.sum(axis=0)))]
    nearest = d[:, medoids[0]].copy()
    while len(medoids) < k:
        gains = np.maximum(nearest[:, None] - d, 0.0).sum(axis=0)
        gains[medoids] = -np.inf
        best = int(np.argmax(gains))
        medoids.append(best)
        nearest = np.minimum(nearest, d[:, best])

    cost = _pam_cost(d, medoids)
    tol = 1e-12 * max(1.0, cost)
    while True:
        best_cost, best_swap = cost, None
        for mi in range(k):
            for o in range(n):
                if o in medoids:
                    continue
                trial = medoids[:mi] + [o] + medoids[mi + 1:]
                c = _pam_cost(d, trial)
                if c < best_cost - tol:
                    best_cost, best_swap = c, (mi, o)
        if best_swap is None:
            break
        medoids[best_swap[0]] = best_swap[1]
        cost = best_cost

    medoids = np.array(sorted(medoids))
    labels = np.argmin(d[:, medoids], axis=1)
    return medoids, labels, cost


def pam_consensus(signatures, k: int, seed: int = 0):
    """Cluster signatures with PAM under cosine distance.

    Returns ``(medoid_indices, assignments)``; the medoid signatures are the
    consensus set.  BUILD and SWAP are deterministic, so ``seed`` is only
    recorded for provenance.
    """
    signatures = list(signatures)
    if k > len(signatures):
        raise ValueError(f"k={k} exceeds the number of signatures ({len(signatures)})")
    medoids, labels, _ = pam(cosine_distance_matrix(signatures), k)
    return medoids, labels
