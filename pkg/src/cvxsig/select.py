"""Choosing the number of basis vectors.

Bootstrap test errors (with-replacement training draws, out-of-bag test
columns refit by NNLS), an iterative paired Wilcoxon stopping rule, the
weighted combination of the per-method choices, and Welch's t-test used
for comparing consistency distributions.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .aenmf import aenmf_fit
from .cnmf import cnmf_fit
from .core import FitConfig, Method, MutationCatalog, child_seed, make_rng
from .nmf import nmf_fit
from .refit import test_error

MODELS = (Method.NMF, Method.CNMF, Method.AENMF)
FITTERS = {Method.NMF: nmf_fit, Method.CNMF: cnmf_fit, Method.AENMF: aenmf_fit}
EXACT_MAX_N = 25


@dataclass
class BootstrapErrors:
    """Test errors ``values[i, K - 2, model]`` plus the splits that produced them."""

    values: np.ndarray
    k_max: int
    train_idx: list
    test_idx: list
    models: tuple = MODELS

    @property
    def nsims(self) -> int:
        return self.values.shape[0]

    @property
    def k_values(self) -> list[int]:
        return list(range(2, self.k_max + 1))

    def for_model(self, model) -> np.ndarray:
        return self.values[:, :, self.models.index(Method(model))]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["replicate", "k", "model", "test_error"])
            for i in range(self.nsims):
                for ki, k in enumerate(self.k_values):
                    for mi, model in enumerate(self.models):
                        out.writerow([i + 1, k, model.value, repr(float(self.values[i, ki, mi]))])

    @classmethod
    def from_csv(cls, path) -> "BootstrapErrors":
        rows = list(csv.DictReader(open(path, newline="")))
        nsims = max(int(r["replicate"]) for r in rows)
        k_max = max(int(r["k"]) for r in rows)
        values = np.full((nsims, k_max - 1, len(MODELS)), np.nan)
        for r in rows:
            mi = MODELS.index(Method(r["model"]))
            values[int(r["replicate"]) - 1, int(r["k"]) - 2, mi] = float(r["test_error"])
        return cls(values, k_max, [], [])


def draw_split(n: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` training indices with replacement; the never-drawn columns
    form the test set.  Redraws if every column was drawn."""
    rng = make_rng(seed)
    while True:
        train = rng.integers(0, n, size=n)
        test = np.setdiff1d(np.arange(n), train)
        if test.size:
            return train, test


def _replicate(v: np.ndarray, i: int, k_max: int, template: FitConfig, master_seed: int):
    train, test = draw_split(v.shape[1], child_seed(master_seed, 2 * i))
    fit_seed = int(child_seed(master_seed, 2 * i + 1).generate_state(1, np.uint64)[0])
    v_train, v_test = v[:, train], v[:, test]
    out = np.empty((k_max - 1, len(MODELS)))
    for ki, k in enumerate(range(2, k_max + 1)):
        config = replace(template, k=k, seed=fit_seed)
        for mi, model in enumerate(MODELS):
            fit = FITTERS[model](v_train, config)
            out[ki, mi] = test_error(fit.h, v_test)
    return train, test, out


def bootstrap_test_errors(catalog, k_max: int, nsims: int, config: FitConfig,
                          master_seed: int, threads: int = 1) -> BootstrapErrors:
    """Test error for every replicate, K in 2..k_max and model.

    All models and K values within a replicate share one train/test split and
    one initialization seed.  Replicates are independent and deterministic in
    ``(master_seed, replicate)``, so ``threads`` does not change the result.
    """
    v = catalog.matrix if isinstance(catalog, MutationCatalog) else np.asarray(catalog, dtype=np.float64)
    m, n = v.shape
    if n < 10:
        raise ValueError(f"need at least 10 samples for bootstrapping, got {n}")
    if k_max < 2:
        raise ValueError(f"k_max must be >= 2, got {k_max}")
    if k_max > m:
        raise ValueError(f"k_max={k_max} exceeds the number of features ({m})")
    if nsims < 1:
        raise ValueError(f"nsims must be >= 1, got {nsims}")

    def job(i):
        return _replicate(v, i, k_max, config, master_seed)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(job, range(nsims)))
    else:
        results = [job(i) for i in range(nsims)]
    values = np.stack([r[2] for r in results])
    return BootstrapErrors(values, k_max, [r[0] for r in results], [r[1] for r in results])


def _signed_rank(x, y):
    d = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
    d = d[d != 0]
    ranks = stats.rankdata(np.abs(d))  # mid-ranks for ties
    return d, ranks


def _exact_upper_tail(ranks: np.ndarray, t_plus: float) -> float:
    """P(T+ >= t_plus) under random signs, by dynamic programming over the
    doubled (hence integer) ranks."""
    r2 = np.rint(2 * ranks).astype(np.int64)
    counts = np.zeros(int(r2.sum()) + 1)
    counts[0] = 1.0
    for r in r2:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[:-r] if r else counts
        counts = counts + shifted
    t2 = int(round(2 * t_plus))
    return float(counts[t2:].sum() / counts.sum())


def wilcoxon_paired(x, y) -> float:
    """Two-sided paired Wilcoxon signed-rank p-value.

    Zero differences are dropped and tied magnitudes get mid-ranks.  Exact
    null distribution for up to 25 non-zero differences, otherwise the
    tie-corrected normal approximation with continuity correction.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    d, ranks = _signed_rank(x, y)
    n = d.size
    if n == 0:
        return 1.0
    t_plus = float(ranks[d > 0].sum())
    mean = ranks.sum() / 2
    if n <= EXACT_MAX_N:
        # the null is symmetric about its mean, so doubling the smaller tail
        # is the same as P(|T - mean| >= |t - mean|)
        t_hi = max(t_plus, 2 * mean - t_plus)
        return min(1.0, 2 * _exact_upper_tail(ranks, t_hi))
    _, tie_counts = np.unique(ranks, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24 - np.sum(tie_counts ** 3 - tie_counts) / 48
    z = max(abs(t_plus - mean) - 0.5, 0.0) / math.sqrt(var)
    return min(1.0, float(2 * stats.norm.sf(z)))


def choose_k(errors, p_val: float = 0.05, k_min: int = 2) -> int:
    """First K whose errors are not significantly different from K + 1's.

    ``errors`` is nsims x (number of K values) with columns K = k_min, ...
    If every consecutive test is significant the largest K is returned.
    """
    errors = np.asarray(errors, dtype=np.float64)
    if errors.shape[0] < 5:
        raise ValueError(f"need at least 5 replicates, got {errors.shape[0]}")
    k_max = k_min + errors.shape[1] - 1
    for j in range(errors.shape[1] - 1):
        if wilcoxon_paired(errors[:, j], errors[:, j + 1]) >= p_val:
            return k_min + j
    return k_max


def combine_k(k_nmf: int, k_cnmf: int, k_aenmf: int) -> int:
    """``round((K_NMF + K_CNMF / 2 + K_AENMF / 2) / 2)`` with halves rounded up."""
    for k in (k_nmf, k_cnmf, k_aenmf):
        if k < 2:
            raise ValueError(f"every K must be >= 2, got {k}")
    # exact integer arithmetic: value = (2a + b + c) / 4
    return (2 * k_nmf + k_cnmf + k_aenmf + 2) // 4


def t_test_two_sample(x, y) -> float:
    """Two-sided Welch t-test p-value for equal means."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size < 2 or y.size < 2:
        raise ValueError(f"both samples need at least 2 values, got {x.size} and {y.size}")
    if np.var(x) == 0 and np.var(y) == 0:
        return 1.0 if x.mean() == y.mean() else 0.0
    return float(stats.ttest_ind(x, y, equal_var=False).pvalue)


def choose_all(boot: BootstrapErrors, p_val: float = 0.05) -> dict:
    """Per-method choices and their combination."""
    ks = {model.value: choose_k(boot.for_model(model), p_val) for model in boot.models}
    ks["all"] = combine_k(ks["nmf"], ks["cnmf"], ks["aenmf"])
    return ks


__all__ = ["BootstrapErrors", "bootstrap_test_errors", "draw_split", "wilcoxon_paired",
           "choose_k", "combine_k", "t_test_two_sample", "choose_all"]
