"""
Discrete POVMs over a finite outcome space.

On a finite outcome space every subset is measurable, so a POVM is fixed by
its values on singletons and ``F(D)`` is the finite sum of those values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import ValidationError

NORM_TOL = 1e-9
SPECTRUM_TOL = 1e-10


@dataclass(frozen=True)
class OutcomeSpace:
    """Ordered distinct outcome labels, optionally with real positions."""

    labels: tuple
    positions: tuple | None = None

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(set(labels)) != len(labels):
            raise ValidationError("outcome labels must be distinct")
        if self.positions is not None:
            pos = tuple(float(p) for p in self.positions)
            if len(pos) != len(labels):
                raise ValidationError("one position per label is required")
            if any(b <= a for a, b in zip(pos, pos[1:])):
                raise ValidationError("positions must be strictly increasing")
            object.__setattr__(self, "positions", pos)

    def __len__(self):
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValidationError(f"unknown outcome label {label!r}") from None


@dataclass(frozen=True, eq=False)
class DiscretePOVM:
    """One effect ``F({x})`` per outcome label.

    Construction only checks shapes and Hermiticity; use :func:`validate_povm`
    for positivity and normalization.
    """

    space: OutcomeSpace
    effects: np.ndarray

    def __post_init__(self):
        E = np.asarray(self.effects, dtype=complex)
        if E.ndim != 3 or E.shape[1] != E.shape[2]:
            raise ValidationError(f"effects must have shape (m, d, d), got {E.shape}")
        if E.shape[0] != len(self.space):
            raise ValidationError(
                f"{len(self.space)} labels but {E.shape[0]} effects"
            )
        for F in E:
            linalg.as_hermitian(F)
        E.setflags(write=False)
        object.__setattr__(self, "effects", E)

    @classmethod
    def from_effects(cls, effects, labels=None, positions=None) -> "DiscretePOVM":
        effects = np.asarray(effects, dtype=complex)
        if labels is None:
            labels = [f"x{j}" for j in range(len(effects))]
        return cls(OutcomeSpace(tuple(labels), positions), effects)

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    @property
    def labels(self) -> tuple:
        return self.space.labels

    def __len__(self):
        return self.effects.shape[0]

    def relabeled(self, order: Sequence[int]) -> "DiscretePOVM":
        """Same POVM with outcomes listed in the given index order."""
        order = list(order)
        return DiscretePOVM.from_effects(
            self.effects[order], [self.labels[j] for j in order]
        )


@dataclass
class ValidationReport:
    """Outcome of a report-style validation: a verdict plus the raw numbers."""

    passed: bool
    details: dict = field(default_factory=dict)
    problems: list = field(default_factory=list)

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        return {"passed": self.passed, **self.details, "problems": list(self.problems)}


def validate_povm(
    P: DiscretePOVM,
    eig_tol: float = linalg.EIG_TOL,
    norm_tol: float = NORM_TOL,
    hermitian_tol: float = linalg.HERMITIAN_TOL,
) -> ValidationReport:
    """Check positivity, Hermiticity and normalization of every effect."""
    min_eigs, herm = [], []
    problems = []
    for label, F in zip(P.labels, P.effects):
        herm.append(linalg.hermitian_defect(F))
        w = np.linalg.eigvalsh(0.5 * (F + F.conj().T))
        min_eigs.append(float(w[0]))
        if w[0] < -eig_tol:
            problems.append(f"effect {label!r} has negative eigenvalue {w[0]:.3e}")
        if herm[-1] > hermitian_tol:
            problems.append(f"effect {label!r} is not Hermitian (defect {herm[-1]:.3e})")
    defect = linalg.opnorm(P.effects.sum(axis=0) - np.eye(P.dim))
    if defect > norm_tol:
        problems.append(f"effects sum to identity only within {defect:.3e}")
    details = {
        "min_eigenvalues": min_eigs,
        "normalization_defect": defect,
        "hermiticity_defects": herm,
    }
    return ValidationReport(not problems, details, problems)


def effect_of(P: DiscretePOVM, subset: Iterable) -> np.ndarray:
    """``F(D) = sum of F({x})`` over labels ``x`` in ``subset``."""
    idx = sorted({P.space.index(x) for x in subset})
    if not idx:
        return np.zeros((P.dim, P.dim), dtype=complex)
    return P.effects[idx].sum(axis=0)


def is_commutative(P: DiscretePOVM, tol: float = linalg.JOINT_TOL):
    """Return ``(commutes, worst_pair, max_commutator_norm)``.

    Only singleton effects are compared; sums of commuting matrices commute.
    ``worst_pair`` holds outcome labels, or ``None`` for a single outcome.
    """
    pair, worst = linalg.max_commutator(list(P.effects))
    labels = None if pair is None else (P.labels[pair[0]], P.labels[pair[1]])
    return worst <= tol, labels, worst


def povm_spectrum(P: DiscretePOVM, tol: float = SPECTRUM_TOL) -> list:
    """Labels whose singleton effect has spectral norm above ``tol``."""
    return [x for x, F in zip(P.labels, P.effects) if linalg.opnorm(F) > tol]


def is_pvm(P: DiscretePOVM, tol: float = linalg.PROJ_TOL) -> bool:
    """True iff every effect is an orthogonal projection."""
    return all(linalg.opnorm(F @ F - F) <= tol for F in P.effects)


# ---------------------------------------------------------------- generators


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    Z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_commutative_povm(
    rng: np.random.Generator,
    dim: int,
    n_outcomes: int,
    n_blocks: int | None = None,
) -> DiscretePOVM:
    """Random commutative POVM: diagonal effects conjugated by one random unitary.

    Basis vectors are grouped into ``n_blocks`` groups that share their
    diagonal values, so joint eigenspaces of rank above one occur.
    """
    if n_blocks is None:
        n_blocks = int(rng.integers(1, dim + 1))
    if not 1 <= n_blocks <= dim:
        raise ValueError("n_blocks must lie in [1, dim]")
    assign = np.concatenate([np.arange(n_blocks), rng.integers(0, n_blocks, dim - n_blocks)])
    rng.shuffle(assign)
    rows = rng.dirichlet(np.ones(n_outcomes), size=n_blocks)
    diag = rows[assign]  # (dim, n_outcomes)
    U = random_unitary(rng, dim)
    effects = np.array([U @ np.diag(diag[:, j]) @ U.conj().T for j in range(n_outcomes)])
    effects = 0.5 * (effects + effects.conj().transpose(0, 2, 1))
    return DiscretePOVM.from_effects(effects)


def random_pvm(rng: np.random.Generator, dim: int) -> DiscretePOVM:
    """Eigenprojectors of a random Hermitian matrix, as a POVM."""
    Z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    sd = linalg.spectral_decompose(Z + Z.conj().T)
    return DiscretePOVM.from_effects(np.array(sd.projectors))
