"""
Unsharp position observables on a discretized line.

``L^2`` of the position domain is represented by amplitudes on a uniform
grid with weight ``h``, so the position operator is diagonal and an
unsharp position observable ``Q^f(D) = sum_j mu_D(x_j) |x_j><x_j|`` is a
diagonal matrix.
"""

from __future__ import annotations

import math

import numpy as np

from .continuity import QUAD_TOL, ConvolutionKernel, kernel_value
from .errors import ValidationError
from .intervals import IntervalSet, RealGrid
from .povm import DiscretePOVM

TAIL_TOL = 1e-12
STATE_TOL = 1e-6


class UnsharpPosition:
    """Smearing of the grid position PVM by a convolution kernel."""

    def __init__(self, kernel: ConvolutionKernel, domain: RealGrid):
        self.kernel = kernel
        self.domain = domain

    @property
    def dim(self) -> int:
        return self.domain.n

    def diagonal(self, delta: IntervalSet) -> np.ndarray:
        """Entries ``mu_D(x_j)`` of the diagonal effect ``Q^f(D)``."""
        return kernel_value(self.kernel, delta, self.domain.points)

    def effect_of(self, delta: IntervalSet) -> np.ndarray:
        return np.diag(self.diagonal(delta))

    def norm(self, delta: IntervalSet) -> float:
        return float(self.diagonal(delta).max())

    def expectation(self, delta: IntervalSet, psi) -> float:
        return expectation(self, delta, psi)

    def outcome_hull(self) -> tuple[float, float]:
        """Interval outside which every ``mu_D`` vanishes on the domain."""
        lo, hi = self.kernel.support_hull()
        return (self.domain.start - hi, self.domain.stop - lo)

    def discretize(self, outcomes: RealGrid) -> DiscretePOVM:
        """Discrete POVM with one outcome per point of ``outcomes``.

        Cell edges sit at midpoints between outcome points; the first and
        last cells extend to infinity, so the effects sum to the identity.
        """
        pts = outcomes.points
        edges = np.concatenate([[-math.inf], 0.5 * (pts[1:] + pts[:-1]), [math.inf]])
        effects = np.array([
            np.diag(self.diagonal(IntervalSet.interval(a, b))).astype(complex)
            for a, b in zip(edges[:-1], edges[1:])
        ])
        return DiscretePOVM.from_effects(effects, [float(p) for p in pts], positions=pts)


def build_unsharp_position(f: ConvolutionKernel, domain: RealGrid, quad_tol: float = QUAD_TOL) -> UnsharpPosition:
    """Unsharp position observable with density ``f`` on ``domain``.

    Raises
    ------
    ValidationError
        If ``f`` does not integrate to one within ``quad_tol``.
    """
    if f.normalization_defect() > quad_tol:
        raise ValidationError(f"density integrates to {f.mass:.9g}, not 1")
    return UnsharpPosition(f, domain)


def gaussian_tail_mass(l: float, lo: float, hi: float) -> float:
    """Mass of a centered normal with deviation ``l`` outside ``[lo, hi]``."""
    s = l * math.sqrt(2)
    return 0.5 * math.erfc(-lo / s) + 0.5 * math.erfc(hi / s)


def optimal_gaussian_kernel(l: float, grid: RealGrid) -> ConvolutionKernel:
    """Normal density with standard deviation ``l`` sampled on ``grid``.

    Raises
    ------
    ValidationError
        If ``l <= 0`` or the grid leaves more than ``1e-12`` of the mass
        outside its span.
    """
    if not l > 0:
        raise ValidationError("l must be positive")
    tail = gaussian_tail_mass(l, grid.start, grid.stop)
    if tail > TAIL_TOL:
        raise ValidationError(f"grid too narrow: tail mass {tail:.3e} outside [{grid.start}, {grid.stop}]")
    M = 1.0 / (l * math.sqrt(2 * math.pi))
    values = M * np.exp(-grid.points**2 / (2 * l * l))
    return ConvolutionKernel(grid, values, sup_bound=M, smooth=True)


def phase_space_marginal(f_state, grid: RealGrid, domain: RealGrid | None = None, tol: float = STATE_TOL) -> UnsharpPosition:
    """Position marginal of the covariant phase-space observable with window ``f_state``.

    The marginal is the unsharp position observable with density
    ``|f_state|**2``. ``domain`` defaults to ``grid``.

    Raises
    ------
    ValidationError
        If ``|f_state|**2`` does not integrate to one within ``tol``.
    """
    amp = np.asarray(f_state, dtype=complex)
    if amp.shape != (grid.n,):
        raise ValidationError(f"expected {grid.n} amplitudes, got shape {amp.shape}")
    dens = np.abs(amp) ** 2
    K = ConvolutionKernel(grid, dens, smooth=True)
    if K.normalization_defect() > tol:
        raise ValidationError(f"state is not normalized (norm squared {K.mass:.9g})")
    return UnsharpPosition(K, domain if domain is not None else grid)


def expectation(P: UnsharpPosition, delta: IntervalSet, psi, tol: float = STATE_TOL) -> float:
    """``<psi, Q^f(D) psi> = sum_j mu_D(x_j) |psi_j|^2 h``.

    Raises
    ------
    ValidationError
        If ``sum_j |psi_j|^2 h`` differs from one by more than ``tol``.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (P.dim,):
        raise ValidationError(f"expected {P.dim} amplitudes, got shape {psi.shape}")
    w = np.abs(psi) ** 2 * P.domain.step
    if abs(w.sum() - 1.0) > tol:
        raise ValidationError(f"psi is not normalized (norm squared {w.sum():.9g})")
    return float(np.dot(P.diagonal(delta), w))
