"""
Markov kernels between a sharp version and a discrete POVM.

A :class:`KernelTable` holds ``mu[k, j]``, the probability of outcome ``x_j``
given the sharp value ``lambda_k``. With finitely many sharp values every
null set is empty, so weak and strong Markov kernels coincide and a single
table type serves for both.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import linalg
from .errors import NotAFunctionOfA, ValidationError
from .povm import DiscretePOVM, ValidationReport
from .sharp import SharpVersion, _block_constant

ENTRY_TOL = 1e-9
ROW_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class KernelTable:
    sharp_values: np.ndarray
    labels: tuple
    entries: np.ndarray

    def __post_init__(self):
        sv = np.asarray(self.sharp_values, dtype=float)
        mu = np.asarray(self.entries, dtype=float)
        labels = tuple(self.labels)
        if mu.shape != (len(sv), len(labels)):
            raise ValidationError(
                f"entries must have shape ({len(sv)}, {len(labels)}), got {mu.shape}"
            )
        object.__setattr__(self, "sharp_values", sv)
        object.__setattr__(self, "entries", mu)
        object.__setattr__(self, "labels", labels)

    def measure(self, k: int, subset) -> float:
        """``mu_D(lambda_k)`` for a set of outcome labels ``D``."""
        idx = [self.labels.index(x) for x in subset]
        return float(self.entries[k, idx].sum())


def extract_kernel(P: DiscretePOVM, S: SharpVersion, tol: float = linalg.JOINT_TOL) -> KernelTable:
    """Kernel ``mu`` with ``F({x_j}) = sum_k mu[k, j] E_k``.

    Entries are trace averages ``tr(E_k F_j) / tr(E_k)``.

    Raises
    ------
    NotAFunctionOfA
        If some ``||F_j E_k - mu[k, j] E_k||`` exceeds ``tol``.
    """
    if S.dim != P.dim:
        raise ValidationError(f"dimension mismatch: POVM {P.dim}, sharp version {S.dim}")
    mu = np.empty((len(S), len(P)))
    for k, E in enumerate(S.projectors):
        for j, F in enumerate(P.effects):
            c, residual = _block_constant(F, E)
            if residual > tol:
                raise NotAFunctionOfA(k, j, residual)
            mu[k, j] = c
    return KernelTable(S.eigenvalues, P.labels, mu)


def validate_markov_kernel(
    T: KernelTable,
    entry_tol: float = ENTRY_TOL,
    row_tol: float = ROW_TOL,
    n_unions: int = 32,
    seed: int = 0,
) -> ValidationReport:
    """Check entry range, row normalization and additivity over disjoint unions.

    Additivity is tested on ``n_unions`` random pairs of disjoint label sets
    per row, comparing ``mu_{A u B}`` with ``mu_A + mu_B``.
    """
    mu = T.entries
    problems = []
    range_violations = [
        (int(k), int(j), float(mu[k, j]))
        for k, j in zip(*np.nonzero((mu < -entry_tol) | (mu > 1 + entry_tol)))
    ]
    for k, j, v in range_violations:
        problems.append(f"entry ({k}, {j}) = {v:.6g} outside [0, 1]")
    row_defects = np.abs(mu.sum(axis=1) - 1.0)
    for k in np.nonzero(row_defects > row_tol)[0]:
        problems.append(f"row {k} sums to {mu[k].sum():.12g}")

    rng = np.random.default_rng(seed)
    m = mu.shape[1]
    additivity = 0.0
    if m:
        for _ in range(n_unions):
            tag = rng.integers(0, 3, size=m)  # 0: in A, 1: in B, 2: neither
            A, B = tag == 0, tag == 1
            union = mu[:, A | B].sum(axis=1)
            additivity = max(additivity, float(np.abs(union - mu[:, A].sum(axis=1) - mu[:, B].sum(axis=1)).max(initial=0.0)))
    if additivity > row_tol:
        problems.append(f"additivity defect {additivity:.3e}")

    details = {
        "range_violations": range_violations,
        "row_sum_defects": row_defects.tolist(),
        "max_row_sum_defect": float(row_defects.max(initial=0.0)),
        "additivity_defect": additivity,
    }
    return ValidationReport(not problems, details, problems)


def smear(S: SharpVersion, T: KernelTable) -> DiscretePOVM:
    """POVM with ``F({x_j}) = sum_k mu[k, j] E_k``."""
    if len(T.sharp_values) != len(S) or not np.allclose(T.sharp_values, S.eigenvalues, rtol=0, atol=1e-12):
        raise ValidationError("kernel sharp values do not match the sharp version eigenvalues")
    E = np.array(S.projectors)
    effects = np.einsum("kj,kab->jab", T.entries, E)
    return DiscretePOVM.from_effects(effects, T.labels)


def separates_points(T: KernelTable, tol: float = 1e-8):
    """Return ``(separates, colliding_pairs)``.

    Rows ``k`` and ``k'`` collide when ``max_j |mu[k, j] - mu[k', j]| <= tol``.
    """
    collisions = [
        (k, k2)
        for k, k2 in combinations(range(len(T.sharp_values)), 2)
        if np.max(np.abs(T.entries[k] - T.entries[k2]), initial=0.0) <= tol
    ]
    return not collisions, collisions
