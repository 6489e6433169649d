"""Conceptor algebra on symmetric PSD matrices with spectrum in [0, 1).

All operations are pure. Results are symmetrized, and the Boolean
operations clamp input eigenvalues into ``[EPS, 1 - EPS]`` so that the
inverses they need exist.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

logger = logging.getLogger(__name__)

EPS = 1e-12


def _sym(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.T)


@dataclass(frozen=True, eq=False)
class Conceptor:
    matrix: np.ndarray
    aperture: float = 10.0
    tag: Optional[float] = None
    source_len: int = 0
    valid: bool = True
    # operand of the negation that produced this conceptor, if any
    _complement: Optional["Conceptor"] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def spectrum(self) -> np.ndarray:
        return spectrum(self)

    def with_tag(self, tag: Optional[float]) -> "Conceptor":
        return replace(self, tag=tag)

    def __invert__(self):
        return negate(self)

    def __and__(self, other):
        return and_(self, other)

    def __or__(self, other):
        return or_(self, other)

    def __repr__(self):
        return (f"Conceptor(n={self.n}, aperture={self.aperture:g}, tag={self.tag}, "
                f"source_len={self.source_len}, valid={self.valid})")


def _mat(C) -> np.ndarray:
    return np.asarray(getattr(C, "matrix", C), dtype=np.float64)


def _check_pair(C, B):
    if _mat(C).shape != _mat(B).shape:
        raise ValueError(f"conceptor shapes differ: {_mat(C).shape} vs {_mat(B).shape}")


def _eig_clamped(C):
    w, U = np.linalg.eigh(_sym(_mat(C)))
    if w.size and (w[0] < EPS or w[-1] > 1.0 - EPS):
        logger.debug("clamping conceptor spectrum [%g, %g] into [%g, %g]", w[0], w[-1], EPS, 1 - EPS)
    return np.clip(w, EPS, 1.0 - EPS), U


def _from_eig(w: np.ndarray, U: np.ndarray) -> np.ndarray:
    return _sym((U * w) @ U.T)


def correlation(X: np.ndarray, normalize: bool = False) -> np.ndarray:
    """``R = X X^T`` for states stored as columns, optionally divided by L."""
    X = np.asarray(X, dtype=np.float64)
    R = X @ X.T
    if normalize:
        R /= X.shape[1]
    return R


def conceptor_from_states(X: np.ndarray, aperture: float = 10.0, tag: Optional[float] = None,
                          normalize_r: bool = False) -> Conceptor:
    """``C = R (R + I/a)^-1`` with ``R = X X^T`` and states as columns of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] < 1:
        raise ValueError("need at least one state")
    if not aperture > 0:
        raise ValueError("aperture must be > 0")
    R = correlation(X, normalize_r)
    A = R.copy()
    A[np.diag_indices_from(A)] += 1.0 / aperture
    # R, A symmetric: R A^-1 = (A^-1 R)^T
    C = np.linalg.solve(A, R).T
    return Conceptor(_sym(C), float(aperture), tag, X.shape[1])


def aperture_adapt(C: Conceptor, gamma: float) -> Conceptor:
    """``phi(C, gamma) = C (C + gamma^-2 (I - C))^-1``.

    The regularizer ``I/a`` scales by ``gamma^-2``, so the recorded aperture
    ``a`` is multiplied by ``gamma**2``.
    """
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    if gamma == 1.0:
        return replace(C, matrix=C.matrix.copy())
    w, U = np.linalg.eigh(_sym(C.matrix))
    w = np.clip(w, 0.0, 1.0 - EPS)
    g2 = gamma ** -2
    w_new = w / (w + g2 * (1.0 - w))
    return replace(C, matrix=_from_eig(w_new, U), aperture=C.aperture * gamma ** 2,
                   _complement=None)


def negate(C: Conceptor) -> Conceptor:
    """``not C = I - C``.

    Negating a negation hands back the original operand, so the involution
    is exact rather than exact up to rounding.
    """
    if getattr(C, "_complement", None) is not None:
        return C._complement
    M = _mat(C)
    out = -M
    out[np.diag_indices_from(out)] += 1.0
    if not isinstance(C, Conceptor):
        C = Conceptor(M.copy())
    return Conceptor(out, C.aperture, None, C.source_len, True, C)


def _meta(C, B):
    return float(getattr(C, "aperture", 1.0)), int(getattr(C, "source_len", 0)) + int(getattr(B, "source_len", 0))


def and_beta(C, B, beta: float) -> Conceptor:
    """``(beta C^-1 + (1 - beta) B^-1)^-1``."""
    _check_pair(C, B)
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    wc, Uc = _eig_clamped(C)
    wb, Ub = _eig_clamped(B)
    S = beta * _from_eig(1.0 / wc, Uc) + (1.0 - beta) * _from_eig(1.0 / wb, Ub)
    ws, Us = np.linalg.eigh(S)
    ap, n = _meta(C, B)
    return Conceptor(_from_eig(1.0 / ws, Us), ap, None, n)


def or_beta(C, B, beta: float) -> Conceptor:
    """``(I + (beta C(I-C)^-1 + (1 - beta) B(I-B)^-1)^-1)^-1``."""
    _check_pair(C, B)
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    ap, n = _meta(C, B)
    if beta == 0.0:
        return Conceptor(_mat(B).copy(), ap, None, n)
    if beta == 1.0:
        return Conceptor(_mat(C).copy(), ap, None, n)
    return _or_weighted(C, B, beta, 1.0 - beta)


def _or_weighted(C, B, wc_weight: float, wb_weight: float) -> Conceptor:
    wc, Uc = _eig_clamped(C)
    wb, Ub = _eig_clamped(B)
    # C (I - C)^-1 = U diag(c / (1 - c)) U^T
    S = wc_weight * _from_eig(wc / (1.0 - wc), Uc) + wb_weight * _from_eig(wb / (1.0 - wb), Ub)
    ws, Us = np.linalg.eigh(S)
    ws = np.maximum(ws, 0.0)
    # (I + S^-1)^-1 = S (S + I)^-1
    ap, n = _meta(C, B)
    return Conceptor(_from_eig(ws / (1.0 + ws), Us), ap, None, n)


def and_(C, B) -> Conceptor:
    """``C and B = (C^-1 + B^-1 - I)^-1``."""
    _check_pair(C, B)
    wc, Uc = _eig_clamped(C)
    wb, Ub = _eig_clamped(B)
    S = _from_eig(1.0 / wc, Uc) + _from_eig(1.0 / wb, Ub)
    S[np.diag_indices_from(S)] -= 1.0
    ws, Us = np.linalg.eigh(S)
    ap, n = _meta(C, B)
    return Conceptor(_from_eig(1.0 / ws, Us), ap, None, n)


def or_(C, B) -> Conceptor:
    """``C or B = (I + (C(I-C)^-1 + B(I-B)^-1)^-1)^-1``."""
    _check_pair(C, B)
    return _or_weighted(C, B, 1.0, 1.0)


def or_many(conceptors) -> Conceptor:
    """Left fold of :func:`or_` (the operation is associative)."""
    conceptors = list(conceptors)
    if not conceptors:
        raise ValueError("need at least one conceptor")
    out = conceptors[0]
    for C in conceptors[1:]:
        out = or_(out, C)
    return out


def lincomb(C1, C2, lam: float) -> Conceptor:
    """``lam C1 + (1 - lam) C2``, unclamped.

    ``valid`` reports whether the result still has its spectrum in [0, 1);
    that always holds for ``lam`` in [0, 1] and may fail outside.
    """
    _check_pair(C1, C2)
    if lam == 1.0:
        M = _mat(C1).copy()
    elif lam == 0.0:
        M = _mat(C2).copy()
    else:
        M = lam * _mat(C1) + (1.0 - lam) * _mat(C2)
    w = np.linalg.eigvalsh(M)
    valid = bool(w[0] >= -1e-10 and w[-1] < 1.0 + 1e-10)
    ap = float(getattr(C1, "aperture", 1.0))
    return Conceptor(M, ap, None, 0, valid)


def distance(C1, C2) -> float:
    """Frobenius distance."""
    _check_pair(C1, C2)
    return float(np.linalg.norm(_mat(C1) - _mat(C2)))


def spectrum(C) -> np.ndarray:
    """Eigenvalues in descending order."""
    return np.linalg.eigvalsh(_sym(_mat(C)))[::-1]


def is_conceptor(C, tol: float = 1e-10) -> bool:
    M = _mat(C)
    if np.max(np.abs(M - M.T), initial=0.0) > tol:
        return False
    w = spectrum(M)
    return bool(w[-1] >= -tol and w[0] < 1.0 + tol)
