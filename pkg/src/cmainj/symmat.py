"""Dense symmetric-matrix support for the sampling covariance.

Provides the eigendecomposition used to form the matrix square root (for
sampling) and inverse square root (for whitening steps and Mahalanobis
norms), with eigenvalues floored to keep the inverse root finite under
near-degeneracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DecompositionFailure, InvalidMatrix, StaleDecomposition

# Relative eigenvalue floor: eigenvalues below EPS_FLOOR_REL * max(eigenvalue)
# are clamped up, never rejected.
EPS_FLOOR_REL = 1e-14


def symmetrize(a: np.ndarray) -> np.ndarray:
    """(A + A^T)/2, guarding against floating-point drift off symmetry."""
    return (a + a.T) / 2.0


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigendecomposition of a covariance matrix with cached root factors.

    eigenvalues are ascending and floored at ``EPS_FLOOR_REL * max``;
    ``root`` and ``invroot`` are the symmetric matrices B diag(d^±1/2) B^T.
    ``source_stamp`` records the iteration index of the matrix decomposed.
    """

    eigenvalues: np.ndarray
    basis: np.ndarray
    source_stamp: int
    root: np.ndarray
    invroot: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    def condition_number(self) -> float:
        return float(self.eigenvalues[-1] / self.eigenvalues[0])


def decompose(c: np.ndarray, stamp: int = 0) -> EigenDecomposition:
    """Factor a symmetric positive (semi)definite matrix.

    Raises InvalidMatrix for non-finite input and DecompositionFailure when
    the eigensolver fails or no positive eigenvalue exists.
    """
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise InvalidMatrix("matrix contains non-finite entries")
    try:
        vals, basis = np.linalg.eigh(symmetrize(c))
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailure(str(exc)) from exc
    if vals[-1] <= 0.0:
        raise DecompositionFailure("no positive eigenvalue; not a covariance matrix")
    vals = np.maximum(vals, EPS_FLOOR_REL * vals[-1])
    sq = np.sqrt(vals)
    root = (basis * sq) @ basis.T
    invroot = (basis / sq) @ basis.T
    return EigenDecomposition(
        eigenvalues=vals,
        basis=basis,
        source_stamp=stamp,
        root=symmetrize(root),
        invroot=symmetrize(invroot),
    )


def apply_root(
    dec: EigenDecomposition,
    z: np.ndarray,
    power: float,
    expect_stamp: int | None = None,
) -> np.ndarray:
    """Apply C^power (power in {+1/2, -1/2}) to a vector.

    When ``expect_stamp`` is given, a mismatch with the decomposition's
    source stamp raises StaleDecomposition (strict mode).
    """
    if power not in (0.5, -0.5):
        raise ValueError(f"power must be +0.5 or -0.5, got {power}")
    if expect_stamp is not None and expect_stamp != dec.source_stamp:
        raise StaleDecomposition(
            f"decomposition stamped {dec.source_stamp}, expected {expect_stamp}"
        )
    z = np.asarray(z, dtype=float)
    if z.shape != (dec.n,):
        raise ValueError(f"vector of length {dec.n} expected, got shape {z.shape}")
    mat = dec.root if power == 0.5 else dec.invroot
    return mat @ z


def mahalanobis_norm(dec: EigenDecomposition, y: np.ndarray) -> float:
    """||C^{-1/2} y||, the step length in the sampling metric."""
    return float(np.linalg.norm(apply_root(dec, y, -0.5)))


def mahalanobis_norms(dec: EigenDecomposition, ys: np.ndarray) -> np.ndarray:
    """Row-wise Mahalanobis norms for a batch of steps (hot path)."""
    return _kernels.mahalanobis_norms(dec.invroot, np.ascontiguousarray(ys, dtype=float))
