"""PCA of flattened conceptors through the sample Gram matrix.

With ``n`` samples of dimension ``D = N**2`` and ``n << D`` the centered
``n x n`` Gram matrix has the same nonzero spectrum as the ``D x D``
covariance. The flattened matrices are never stacked in full: the Gram
matrix and the components are accumulated over blocks of matrix rows.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

ZERO_VARIANCE_RTOL = 1e-12


@dataclass
class PcaResult:
    components: np.ndarray                # (k, D) unit directions
    explained_variance_ratio: np.ndarray  # (k,)
    projections: np.ndarray               # (n, k) sample coordinates
    mean: np.ndarray                      # (D,)
    total_variance: float

    def project(self, C) -> np.ndarray:
        f = np.asarray(getattr(C, "matrix", C), dtype=np.float64).ravel()
        return self.components @ (f - self.mean)


def _matrices(conceptors) -> list:
    if hasattr(conceptors, "conceptors"):
        conceptors = conceptors.conceptors
    return [np.asarray(getattr(C, "matrix", C), dtype=np.float64) for C in conceptors]


def pca_conceptors(conceptors: Sequence, k: int = 3, block_rows: int = 64) -> PcaResult:
    """Top-``k`` principal directions of a set of same-shaped matrices."""
    mats = _matrices(conceptors)
    n = len(mats)
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < k + 1:
        raise ValueError(f"k={k} needs at least {k + 1} conceptors, got {n}")
    shape = mats[0].shape
    if any(M.shape != shape for M in mats):
        raise ValueError("conceptors have mixed shapes")
    rows = shape[0]
    D = mats[0].size

    G = np.zeros((n, n))
    mean = np.empty(D)
    for r0 in range(0, rows, block_rows):
        F = np.stack([M[r0:r0 + block_rows].ravel() for M in mats])
        mu = F.mean(axis=0)
        mean[r0 * shape[1]:r0 * shape[1] + mu.size] = mu
        F -= mu
        G += F @ F.T
    G = 0.5 * (G + G.T)

    w, U = np.linalg.eigh(G)
    w, U = w[::-1], U[:, ::-1]
    total = float(np.trace(G))
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if total <= 0.0 or scale <= 0.0 or total <= ZERO_VARIANCE_RTOL * np.mean([np.sum(M * M) for M in mats]):
        raise ValueError("conceptors have zero variance; explained-variance ratios are undefined")
    wk = np.clip(w[:k], 0.0, None)
    inv = np.divide(1.0, np.sqrt(wk), out=np.zeros(k), where=wk > ZERO_VARIANCE_RTOL * scale)

    comps = np.empty((k, D))
    for r0 in range(0, rows, block_rows):
        F = np.stack([M[r0:r0 + block_rows].ravel() for M in mats])
        lo = r0 * shape[1]
        F -= mean[lo:lo + F.shape[1]]
        comps[:, lo:lo + F.shape[1]] = (U[:, :k].T @ F) * inv[:, None]

    return PcaResult(comps, wk / total, U[:, :k] * np.sqrt(wk), mean, total)
