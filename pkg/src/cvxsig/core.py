"""Shared matrix types, fit configuration, seeded randomness and the Frobenius loss.

All matrices are numpy float64 arrays oriented features-by-samples (M x N).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

# guards every multiplicative-update denominator
EPS_DENOM = 1e-16


class Method(str, enum.Enum):
    NMF = "nmf"
    CNMF = "cnmf"
    AENMF = "aenmf"


class NonNegScheme(str, enum.Enum):
    """How AE-NMF keeps its weights non-negative.

    ``PG`` / ``ABS`` act on the stored weights after every optimizer step
    (projection onto the orthant / absolute value).  ``FP_PG`` / ``FP_ABS``
    apply ReLU / absolute value inside the forward pass instead.
    """

    PG = "PG"
    FP_PG = "FP_PG"
    ABS = "ABS"
    FP_ABS = "FP_ABS"


def as_nonneg(a, name: str = "matrix") -> np.ndarray:
    """Validate and return ``a`` as a 2-d, finite, non-negative float64 array."""
    arr = np.array(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and column, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    if np.any(arr < 0):
        i, j = np.argwhere(arr < 0)[0]
        raise ValueError(f"{name} has negative entry {arr[i, j]!r} at ({i}, {j})")
    return arr


@dataclass(frozen=True)
class MutationCatalog:
    """Mutation counts, features x samples, with row and column labels."""

    matrix: np.ndarray
    feature_labels: tuple[str, ...]
    sample_ids: tuple[str, ...]

    def __post_init__(self):
        mat = as_nonneg(self.matrix, "catalog")
        if not np.array_equal(mat, np.round(mat)):
            raise ValueError("catalog entries must be integer counts")
        labels = tuple(str(s) for s in self.feature_labels)
        ids = tuple(str(s) for s in self.sample_ids)
        if len(labels) != mat.shape[0]:
            raise ValueError(f"{len(labels)} feature labels for {mat.shape[0]} rows")
        if len(ids) != mat.shape[1]:
            raise ValueError(f"{len(ids)} sample ids for {mat.shape[1]} columns")
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate feature labels")
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate sample ids")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "feature_labels", labels)
        object.__setattr__(self, "sample_ids", ids)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @classmethod
    def from_matrix(cls, matrix, feature_labels: Optional[Sequence[str]] = None,
                    sample_ids: Optional[Sequence[str]] = None) -> "MutationCatalog":
        m, n = np.shape(matrix)
        if feature_labels is None:
            feature_labels = [f"f{i + 1}" for i in range(m)]
        if sample_ids is None:
            sample_ids = [f"s{j + 1}" for j in range(n)]
        return cls(np.asarray(matrix, dtype=np.float64), tuple(feature_labels), tuple(sample_ids))

    def select_samples(self, idx) -> "MutationCatalog":
        """Columns ``idx`` as a new catalog; repeated indices get suffixed ids."""
        idx = np.asarray(idx, dtype=int)
        seen: dict[str, int] = {}
        ids = []
        for j in idx:
            sid = self.sample_ids[j]
            c = seen.get(sid, 0)
            seen[sid] = c + 1
            ids.append(sid if c == 0 else f"{sid}#{c}")
        return MutationCatalog(self.matrix[:, idx], self.feature_labels, tuple(ids))


@dataclass(frozen=True)
class FitConfig:
    k: int
    max_iters: int = 500_000
    rel_tol: float = 1e-10
    seed: int = 0
    learning_rate: float = 1e-4
    nonneg_scheme: NonNegScheme = NonNegScheme.FP_ABS

    def __post_init__(self):
        object.__setattr__(self, "nonneg_scheme", NonNegScheme(self.nonneg_scheme))
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")

    def check_shape(self, m: int, n: int) -> None:
        if self.k > min(m, n):
            raise ValueError(f"k={self.k} exceeds min(M, N) = {min(m, n)} for a {m}x{n} matrix")


@dataclass
class FactorModel:
    """A fitted factorization ``V ~ h @ w``.

    For convex methods ``h = V @ W1`` and ``w = W2``; the (effective) mixing
    matrix ``W1`` is kept in ``w1``.  ``best_iter`` indexes the loss-trace
    entry belonging to the returned factors when that is not the last one.
    """

    method: Method
    h: np.ndarray
    w: np.ndarray
    loss_trace: np.ndarray
    converged: bool
    iters_run: int
    w1: Optional[np.ndarray] = None
    best_iter: Optional[int] = None
    extra: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.h.shape[1]

    @property
    def final_loss(self) -> float:
        """Training loss of the returned factors."""
        i = -1 if self.best_iter is None else self.best_iter
        return float(self.loss_trace[i])

    @property
    def n_params(self) -> int:
        """Number of estimated parameters in the factor matrices."""
        if self.method is Method.NMF:
            return self.h.size + self.w.size
        return 2 * self.w.size

    def reconstruction(self) -> np.ndarray:
        return self.h @ self.w


def frobenius_loss(v, v_hat) -> float:
    """Average Frobenius distance ``||V - V_hat||_F / (M * N)``."""
    v = np.asarray(v, dtype=np.float64)
    v_hat = np.asarray(v_hat, dtype=np.float64)
    if v.shape != v_hat.shape:
        raise ValueError(f"shape mismatch: {v.shape} vs {v_hat.shape}")
    return float(np.linalg.norm(v - v_hat) / v.size)


def child_seed(master_seed: int, stream: int) -> np.random.SeedSequence:
    """Independent, reproducible seed for sub-stream ``stream`` of ``master_seed``."""
    return np.random.SeedSequence(int(master_seed), spawn_key=(int(stream),))


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator; ``seed`` is an int or a SeedSequence."""
    return np.random.Generator(np.random.PCG64(seed))


def init_uniform(rows: int, cols: int, seed) -> np.ndarray:
    """Matrix of i.i.d. uniform [0, 1) entries, a pure function of its arguments."""
    if rows < 1 or cols < 1:
        raise ValueError(f"rows and cols must be >= 1, got ({rows}, {cols})")
    return make_rng(seed).random((rows, cols))


def check_fit_input(v, config: FitConfig) -> np.ndarray:
    v = as_nonneg(v, "V")
    if not np.any(v > 0):
        raise ValueError("degenerate input: V has no positive entry")
    config.check_shape(*v.shape)
    return v


def iterate_to_tolerance(step: Callable[[], float], initial_loss: float,
                         config: FitConfig) -> tuple[np.ndarray, bool, int]:
    """Call ``step`` (which returns the new loss) until the relative loss change
    drops below ``config.rel_tol`` or ``config.max_iters`` is reached.

    Returns the loss trace (initial loss first), the convergence flag and the
    number of iterations run.
    """
    trace = np.empty(config.max_iters + 1)
    trace[0] = initial_loss
    prev = initial_loss
    converged = False
    it = 0
    for it in range(1, config.max_iters + 1):
        loss = step()
        trace[it] = loss
        if it > 1 and (prev == 0.0 or abs(loss - prev) / prev < config.rel_tol):
            converged = True
            break
        prev = loss
    return trace[: it + 1].copy(), converged, it
