"""
Dense Hermitian linear algebra: positivity, spectral decomposition and
joint diagonalization of commuting families.

Matrices are plain complex ``numpy`` arrays. The norm used everywhere is the
spectral (operator) norm.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import NotCommutative, ValidationError

HERMITIAN_TOL = 1e-9
EIG_TOL = 1e-9
PROJ_TOL = 1e-9
JOINT_TOL = 1e-8
CLUSTER_TOL = 1e-8
RECON_TOL = 1e-7

# Fixed seed for the random linear combination used in joint diagonalization,
# so results are reproducible run to run.
_COMBINATION_SEED = 20121


def opnorm(M) -> float:
    """Spectral norm (largest singular value)."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def as_hermitian(M, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``M`` as a complex square array, checking Hermiticity.

    Raises
    ------
    ValidationError
        If ``M`` is not square or some ``|M[i, j] - conj(M[j, i])|`` exceeds
        ``tol``. The message names the worst entry pair.
    """
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {A.shape}")
    dev = np.abs(A - A.conj().T)
    worst = float(dev.max())
    if worst > tol:
        i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
        raise ValidationError(
            f"matrix is not Hermitian: entries ({i}, {j}) and ({j}, {i}) differ by {worst:.3e}"
        )
    return A


def hermitian_defect(M) -> float:
    A = np.asarray(M, dtype=complex)
    return float(np.abs(A - A.conj().T).max())


def _hermitize(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.conj().T)


def is_positive_semidefinite(M, tol: float = EIG_TOL) -> bool:
    """True iff the smallest eigenvalue of the Hermitian ``M`` is ``>= -tol``."""
    A = as_hermitian(M)
    return bool(np.linalg.eigvalsh(_hermitize(A))[0] >= -tol)


def is_effect(M, tol: float = EIG_TOL) -> bool:
    """True iff all eigenvalues of ``M`` lie in ``[-tol, 1 + tol]``."""
    w = np.linalg.eigvalsh(_hermitize(as_hermitian(M)))
    return bool(w[0] >= -tol and w[-1] <= 1 + tol)


def commutator_norm(A, B) -> float:
    """Spectral norm of ``AB - BA``."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape:
        raise ValidationError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return opnorm(A @ B - B @ A)


def max_commutator(mats) -> tuple[tuple[int, int] | None, float]:
    """Worst pair and its commutator norm over a family of matrices."""
    worst_pair, worst = None, 0.0
    for i, j in combinations(range(len(mats)), 2):
        c = commutator_norm(mats[i], mats[j])
        if worst_pair is None or c > worst:
            worst_pair, worst = (i, j), c
    return worst_pair, worst


def _cluster(values: np.ndarray, tol: float) -> list[np.ndarray]:
    """Split ascending ``values`` into index groups wherever a gap exceeds ``tol``."""
    if len(values) == 0:
        return []
    breaks = np.nonzero(np.diff(values) > tol)[0] + 1
    return np.split(np.arange(len(values)), breaks)


@dataclass(frozen=True)
class SpectralDecomp:
    """Distinct eigenvalues (ascending) and the matching eigenprojectors."""

    eigenvalues: np.ndarray
    projectors: tuple

    @property
    def ranks(self) -> list[int]:
        return [int(round(np.trace(P).real)) for P in self.projectors]

    def reconstruct(self) -> np.ndarray:
        return sum(lam * P for lam, P in zip(self.eigenvalues, self.projectors))


def spectral_decompose(M, cluster_tol: float = CLUSTER_TOL) -> SpectralDecomp:
    """Spectral decomposition with eigenvalues closer than ``cluster_tol`` merged.

    Each cluster is represented by the mean of its member eigenvalues.
    """
    A = _hermitize(as_hermitian(M))
    w, V = np.linalg.eigh(A)
    eigenvalues, projectors = [], []
    for idx in _cluster(w, cluster_tol):
        Vk = V[:, idx]
        eigenvalues.append(float(w[idx].mean()))
        projectors.append(Vk @ Vk.conj().T)
    return SpectralDecomp(np.array(eigenvalues), tuple(projectors))


@dataclass(frozen=True)
class JointBlock:
    """A common eigenspace of a commuting family.

    ``basis`` is an isometry whose columns span the block, ``values[i]`` is
    the eigenvalue of the i-th input matrix on it.
    """

    basis: np.ndarray
    values: np.ndarray

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    @property
    def rank(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class JointEigenstructure:
    blocks: tuple

    @property
    def projectors(self) -> list[np.ndarray]:
        return [b.projector for b in self.blocks]

    @property
    def values(self) -> np.ndarray:
        """Array of shape ``(n_blocks, n_effects)``."""
        return np.array([b.values for b in self.blocks])

    def reconstruct(self, i: int) -> np.ndarray:
        return sum(b.values[i] * b.projector for b in self.blocks)


def _split(basis: np.ndarray, M: np.ndarray, cluster_tol: float) -> list[np.ndarray]:
    """Split the subspace spanned by ``basis`` into eigenspaces of ``M`` restricted to it."""
    if basis.shape[1] == 1:
        return [basis]
    C = _hermitize(basis.conj().T @ M @ basis)
    w, U = np.linalg.eigh(C)
    return [basis @ U[:, idx] for idx in _cluster(w, cluster_tol)]


def jointly_diagonalize(
    effects,
    joint_tol: float = JOINT_TOL,
    cluster_tol: float = CLUSTER_TOL,
) -> JointEigenstructure:
    """Common eigenspaces of a commuting family of Hermitian matrices.

    The space is first split by the eigenspaces of a random real linear
    combination of the family, then each block is refined by splitting on
    every member in turn. Finally blocks whose value vectors agree to within
    ``cluster_tol`` in every coordinate are merged, so the result is the
    coarsest partition on which every member is scalar.

    Raises
    ------
    NotCommutative
        If some pair has commutator norm above ``joint_tol``.
    """
    mats = [_hermitize(as_hermitian(F)) for F in effects]
    if not mats:
        raise ValidationError("need at least one matrix")
    d = mats[0].shape[0]
    if any(F.shape != (d, d) for F in mats):
        raise ValidationError("all matrices must have the same dimension")
    pair, worst = max_commutator(mats)
    if pair is not None and worst > joint_tol:
        raise NotCommutative(pair, worst)

    rng = np.random.default_rng(_COMBINATION_SEED)
    coeffs = rng.uniform(0.5, 1.5, size=len(mats))
    combo = sum(c * F for c, F in zip(coeffs, mats))
    # The combination mixes scales; a tighter tolerance keeps distinct blocks apart,
    # and any over-splitting is undone by the merge step below.
    bases = _split(np.eye(d, dtype=complex), combo, cluster_tol * 1e-2)
    for F in mats:
        bases = [part for B in bases for part in _split(B, F, cluster_tol)]

    values = [
        np.array([np.trace(B.conj().T @ F @ B).real / B.shape[1] for F in mats])
        for B in bases
    ]

    merged_bases, merged_values = [], []
    for B, v in zip(bases, values):
        for k, u in enumerate(merged_values):
            if np.max(np.abs(u - v)) <= cluster_tol:
                merged_bases[k] = np.hstack([merged_bases[k], B])
                r_old = merged_bases[k].shape[1] - B.shape[1]
                merged_values[k] = (u * r_old + v * B.shape[1]) / merged_bases[k].shape[1]
                break
        else:
            merged_bases.append(B)
            merged_values.append(v)

    blocks = tuple(JointBlock(B, v) for B, v in zip(merged_bases, merged_values))
    return JointEigenstructure(blocks)
