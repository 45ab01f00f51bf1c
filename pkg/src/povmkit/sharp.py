"""
Sharp versions of commutative POVMs.

A sharp version of a commutative POVM ``F`` is a self-adjoint ``A`` whose
spectral projections are exactly the common eigenspaces of the effects of
``F``. In finite dimension ``A`` is ``sum_k lambda_k E_k`` where the ``E_k``
are the joint eigenprojectors and the ``lambda_k`` are any injective labels
in ``[0, 1]``.

Two labelings are provided:

``"ternary"``
    Each block's value vector ``(t_1, ..., t_m)`` is expanded in binary to
    ``depth`` digits, the digit strings are interleaved across effects
    (first digit of every effect, then the second digit of every effect, ...)
    and the resulting 0/1 sequence ``x_1 x_2 ...`` is sent to
    ``sum_j x_j / 3**j``. Because the digits are only 0 or 1 this map is
    injective on digit strings; distinct blocks whose truncated expansions
    coincide trigger the index fallback.
``"index"``
    Blocks sorted lexicographically by value vector receive ``k / (n + 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .errors import DegenerateBlocks, NotCommutative, ValidationError
from .povm import DiscretePOVM

DEFAULT_DEPTH = 16
LABELINGS = ("ternary", "index")


@dataclass(frozen=True, eq=False)
class SharpVersion:
    """A PVM with injective eigenvalue labels in [0, 1]."""

    eigenvalues: np.ndarray
    projectors: tuple
    labeling: str = "index"
    fallback_used: bool = False

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if len(ev) != len(self.projectors):
            raise ValidationError("one eigenvalue per projector is required")
        if np.any(np.diff(ev) <= 0):
            raise ValidationError("eigenvalues must be strictly increasing")
        projs = tuple(np.asarray(E, dtype=complex) for E in self.projectors)
        object.__setattr__(self, "eigenvalues", ev)
        object.__setattr__(self, "projectors", projs)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @property
    def operator(self) -> np.ndarray:
        return sum(lam * E for lam, E in zip(self.eigenvalues, self.projectors))

    def __len__(self):
        return len(self.projectors)


def check_sharp_version(S: SharpVersion, tol: float = linalg.PROJ_TOL) -> list[str]:
    """Problems with the PVM and spectrum invariants of ``S`` (empty if none)."""
    problems = []
    d = S.dim
    for k, E in enumerate(S.projectors):
        if linalg.opnorm(E @ E - E) > tol:
            problems.append(f"projector {k} is not idempotent")
        if linalg.hermitian_defect(E) > tol:
            problems.append(f"projector {k} is not Hermitian")
    for k in range(len(S)):
        for k2 in range(k + 1, len(S)):
            if linalg.opnorm(S.projectors[k] @ S.projectors[k2]) > tol:
                problems.append(f"projectors {k} and {k2} are not orthogonal")
    if linalg.opnorm(sum(S.projectors) - np.eye(d)) > tol:
        problems.append("projectors do not sum to the identity")
    if len(S) and (S.eigenvalues[0] < 0 or S.eigenvalues[-1] > 1):
        problems.append("spectrum is not contained in [0, 1]")
    return problems


def binary_digits(t: float, depth: int) -> str:
    """First ``depth`` binary digits of ``t`` in [0, 1], rounded to nearest.

    ``1`` is written as all ones, its infinite expansion ``0.111...``.
    """
    t = min(max(float(t), 0.0), 1.0)
    n = min(round(t * 2**depth), 2**depth - 1)
    return format(n, f"0{depth}b")


def ternary_label(values, depth: int = DEFAULT_DEPTH) -> Fraction:
    """Interleave the binary digits of ``values`` and read them in base 3."""
    strings = [binary_digits(t, depth) for t in values]
    total = Fraction(0)
    j = 0
    for pos in range(depth):
        for s in strings:
            j += 1
            if s[pos] == "1":
                total += Fraction(1, 3**j)
    return total


def _index_labels(n: int) -> list[float]:
    return [k / (n + 1) for k in range(1, n + 1)]


def build_sharp_version(
    P: DiscretePOVM,
    labeling: str = "ternary",
    depth: int = DEFAULT_DEPTH,
    joint_tol: float = linalg.JOINT_TOL,
    cluster_tol: float = linalg.CLUSTER_TOL,
) -> SharpVersion:
    """Sharp version of a commutative POVM.

    Raises
    ------
    NotCommutative
        If the effects of ``P`` do not commute within ``joint_tol``.
    DegenerateBlocks
        If the joint eigendecomposition produced two blocks with equal
        value vectors.
    """
    if labeling not in LABELINGS:
        raise ValidationError(f"labeling must be one of {LABELINGS}, got {labeling!r}")
    structure = linalg.jointly_diagonalize(P.effects, joint_tol, cluster_tol)
    blocks = list(structure.blocks)
    for a in range(len(blocks)):
        for b in range(a + 1, len(blocks)):
            if np.max(np.abs(blocks[a].values - blocks[b].values)) <= cluster_tol:
                raise DegenerateBlocks(f"blocks {a} and {b} share a value vector")

    blocks.sort(key=lambda b: tuple(b.values))
    n = len(blocks)
    fallback = False
    if labeling == "ternary":
        exact = [ternary_label(b.values, depth) for b in blocks]
        labels = [float(x) for x in exact]
        gaps = np.diff(sorted(labels))
        if len(set(exact)) < n or (n > 1 and gaps.min() <= cluster_tol):
            fallback = True
            labels = _index_labels(n)
    else:
        labels = _index_labels(n)

    order = np.argsort(labels)
    return SharpVersion(
        eigenvalues=np.array(labels)[order],
        projectors=tuple(blocks[k].projector for k in order),
        labeling=labeling,
        fallback_used=fallback,
    )


def _block_constant(F: np.ndarray, E: np.ndarray) -> tuple[float, float]:
    """Trace average of ``F`` on the range of ``E`` and the residual ``||FE - cE||``."""
    c = float(np.trace(E @ F).real / np.trace(E).real)
    return c, linalg.opnorm(F @ E - c * E)


def verify_generating_equality(
    P: DiscretePOVM,
    S: SharpVersion,
    tol: float = linalg.JOINT_TOL,
    cluster_tol: float = linalg.CLUSTER_TOL,
) -> bool:
    """Finite-dimensional check that ``P`` and ``S`` generate the same algebra.

    Every effect must be scalar on every eigenprojector of ``S`` (so each
    effect is a function of the operator), and the joint eigenstructure of
    ``P`` must have as many blocks as ``S`` has projectors (so the operator
    is a function of the effects).
    """
    if S.dim != P.dim:
        return False
    for E in S.projectors:
        for F in P.effects:
            if _block_constant(F, E)[1] > tol:
                return False
    try:
        structure = linalg.jointly_diagonalize(P.effects, tol, cluster_tol)
    except NotCommutative:
        return False
    return len(structure.blocks) == len(S)


def sharp_versions_equivalent(S1: SharpVersion, S2: SharpVersion, tol: float = 1e-8) -> bool:
    """True iff the two eigenprojector families coincide up to relabeling."""
    if S1.dim != S2.dim or len(S1) != len(S2):
        return False
    used = set()
    for E in S1.projectors:
        hits = [k for k, E2 in enumerate(S2.projectors) if linalg.opnorm(E - E2) <= tol]
        if len(hits) != 1 or hits[0] in used:
            return False
        used.add(hits[0])
    return True
