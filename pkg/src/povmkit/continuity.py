"""
Continuity diagnostics for smearings with convolution kernels on the line.

A density ``f`` defines the Markov kernel ``mu_D(x) = int_D f(x - y) dy``.
``f`` is stored as samples on a uniform grid and integrated as its piecewise
linear interpolant (the composite trapezoid rule), with partial cells
integrated exactly. Outside the grid ``f`` is zero. Because every
``mu_D`` is computed from one cumulative integral, values are exactly
additive over disjoint unions.

Continuity cannot be decided from samples, so the tests here report the
measured quantities (slopes, jumps, norm sequences) next to each verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .errors import ValidationError
from .intervals import IntervalSet, RealGrid, ShrinkingFamily
from .povm import DiscretePOVM, SPECTRUM_TOL, povm_spectrum

QUAD_TOL = 1e-6
UC_TOL = 1e-6
FELLER_TOL = 1e-5
AC_TOL = 1e-9
MAX_JUMP = 0.1


@dataclass(frozen=True, eq=False)
class ConvolutionKernel:
    """Sampled probability density ``f`` with sup bound ``sup_bound``.

    ``smooth`` tags whether ``f`` is continuous; a ``False`` tag marks a
    merely Borel density for which Lipschitz claims are not expected.
    """

    grid: RealGrid
    values: np.ndarray
    sup_bound: float | None = None
    smooth: bool = True

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise ValidationError(f"expected {self.grid.n} density samples, got shape {v.shape}")
        if np.any(v < 0):
            raise ValidationError("density must be nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.sup_bound is None:
            object.__setattr__(self, "sup_bound", float(v.max()))

    @cached_property
    def _cumulative(self) -> np.ndarray:
        v, h = self.values, self.grid.step
        return np.concatenate([[0.0], np.cumsum(0.5 * h * (v[1:] + v[:-1]))])

    @property
    def mass(self) -> float:
        return float(self._cumulative[-1])

    def normalization_defect(self) -> float:
        return abs(self.mass - 1.0)

    def cdf(self, z) -> np.ndarray:
        """``int_{-inf}^{z} f``, exact for the piecewise linear interpolant."""
        z = np.asarray(z, dtype=float)
        g, v, C = self.grid, self.values, self._cumulative
        t = (z - g.start) / g.step
        i = np.clip(np.floor(np.nan_to_num(t, posinf=g.n, neginf=-1)), 0, g.n - 2).astype(int)
        dz = np.clip(z - (g.start + i * g.step), 0.0, g.step)
        slope = (v[i + 1] - v[i]) / g.step
        out = C[i] + v[i] * dz + 0.5 * slope * dz * dz
        out = np.where(t <= 0, 0.0, out)
        return np.where(t >= g.n - 1, C[-1], out)

    def support_hull(self) -> tuple[float, float]:
        nz = np.nonzero(self.values > 0)[0]
        if len(nz) == 0:
            return (0.0, 0.0)
        # the interpolant is positive up to one step beyond the last nonzero sample
        lo = max(nz[0] - 1, 0)
        hi = min(nz[-1] + 1, self.grid.n - 1)
        return (self.grid.start + lo * self.grid.step, self.grid.start + hi * self.grid.step)

    def density(self, z) -> np.ndarray:
        return np.interp(z, self.grid.points, self.values, left=0.0, right=0.0)

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.to_dict(),
            "density": self.values.tolist(),
            "sup_bound": self.sup_bound,
            "smooth": self.smooth,
        }


def kernel_value(K: ConvolutionKernel, delta: IntervalSet, x) -> np.ndarray | float:
    """``mu_D(x) = int_D f(x - y) dy``, clamped to ``[0, 1]``.

    ``x`` may be a scalar or an array.
    """
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.shape)
    # y in [a, b) corresponds to x - y in (x - b, x - a]
    for a, b in delta:
        total += K.cdf(x - a) - K.cdf(x - b)
    total = np.clip(total, 0.0, 1.0)
    return total if total.ndim else float(total)


def continuity_modulus(K: ConvolutionKernel, delta: IntervalSet, G: RealGrid) -> tuple[float, float]:
    """``(empirical_lipschitz, max_jump)`` of ``x -> mu_D(x)`` over adjacent points of ``G``."""
    jumps = np.abs(np.diff(kernel_value(K, delta, G.points)))
    max_jump = float(jumps.max())
    return max_jump / G.step, max_jump


class GridPOVM:
    """A discrete POVM whose outcomes sit at real positions.

    ``F(D)`` sums the atoms whose position lies in ``D``.
    """

    def __init__(self, povm: DiscretePOVM):
        if povm.space.positions is None:
            raise ValidationError("a grid POVM needs outcome positions")
        self.povm = povm
        self.positions = np.array(povm.space.positions)

    def effect_of(self, delta: IntervalSet) -> np.ndarray:
        mask = delta.contains(self.positions)
        if not mask.any():
            return np.zeros((self.povm.dim, self.povm.dim), dtype=complex)
        return self.povm.effects[mask].sum(axis=0)

    def norm(self, delta: IntervalSet) -> float:
        return linalg.opnorm(self.effect_of(delta))


@dataclass
class UniformContinuityResult:
    norms: list
    converging: bool
    stall_index: int | None

    def to_dict(self) -> dict:
        return {"norms": self.norms, "verdict": "converging" if self.converging else "non-converging",
                "converging": self.converging, "stall_index": self.stall_index}


def uniform_continuity_test(F, family: ShrinkingFamily | Sequence[IntervalSet], uc_tol: float = UC_TOL) -> UniformContinuityResult:
    """Norms ``||F(D_i)||`` along a decreasing family.

    ``F`` is anything with a ``norm(IntervalSet)`` method. The verdict is
    converging iff the last norm is at most ``uc_tol``. ``stall_index`` is
    the largest ``i`` at which the norm, still above ``uc_tol``, failed to
    decrease.
    """
    if not isinstance(family, ShrinkingFamily):
        family = ShrinkingFamily(tuple(family))
    norms = [float(F.norm(D)) for D in family]
    stall = None
    for i in range(1, len(norms)):
        if norms[i] > uc_tol and norms[i] >= norms[i - 1]:
            stall = i
    return UniformContinuityResult(norms, bool(norms) and norms[-1] <= uc_tol, stall)


@dataclass
class FellerResult:
    points: list
    values: list
    target: float
    errors: list
    converged: bool

    def to_dict(self) -> dict:
        return dict(vars(self))


def feller_integral(K: ConvolutionKernel, g: Callable, lam) -> np.ndarray | float:
    """``G(lambda) = int g(y) f(lambda - y) dy`` by trapezoid on the kernel grid."""
    lam = np.asarray(lam, dtype=float)
    z = K.grid.points
    w = np.full(z.shape, K.grid.step)
    w[[0, -1]] *= 0.5
    vals = np.array([np.sum(w * K.values * g(l - z)) for l in np.atleast_1d(lam)])
    return vals.reshape(lam.shape) if lam.ndim else float(vals[0])


def feller_test(K: ConvolutionKernel, g: Callable, seq: Sequence[float], lam: float, feller_tol: float = FELLER_TOL) -> FellerResult:
    """Evaluate ``G`` along ``seq -> lam``; converged iff the last error is within ``feller_tol``."""
    values = np.atleast_1d(feller_integral(K, g, np.asarray(seq, dtype=float)))
    target = float(feller_integral(K, g, lam))
    errors = np.abs(values - target)
    return FellerResult(
        list(map(float, seq)), values.tolist(), target, errors.tolist(),
        bool(len(errors) and errors[-1] <= feller_tol),
    )


@dataclass
class StrongFellerResult:
    max_jumps: list
    slopes: list
    max_jump: float
    empirical_constant: float
    passes: bool

    def to_dict(self) -> dict:
        return dict(vars(self))


def strong_feller_test(K: ConvolutionKernel, family: Sequence[IntervalSet], G: RealGrid, max_jump: float = MAX_JUMP) -> StrongFellerResult:
    """Largest adjacent jump of ``mu_D`` over ``G`` for every ``D`` in ``family``.

    Every jump is at most ``c * h`` for the reported ``c`` (the largest
    difference quotient). The family passes iff no jump exceeds
    ``max_jump``; for a density of bounded variation ``V`` jumps never
    exceed ``V * h``, while a spike about one step wide moves a fixed
    fraction of the mass across a single step.
    """
    jumps, slopes = [], []
    for D in family:
        c, jump = continuity_modulus(K, D, G)
        jumps.append(jump)
        slopes.append(c)
    c = max(slopes, default=0.0)
    return StrongFellerResult(jumps, slopes, max_jump, c, max(jumps, default=0.0) <= max_jump)


@dataclass
class Norm1Result:
    obstruction: bool
    witnesses: list
    atom_norms: dict
    uniform_continuity: bool
    norm1_violations: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "has_norm1_obstruction": self.obstruction,
            "witnesses": self.witnesses,
            "atom_norms": {str(k): v for k, v in self.atom_norms.items()},
            "uniform_continuity": self.uniform_continuity,
            "norm1_violations": self.norm1_violations,
        }


def norm1_test(
    F,
    uniform_continuity: bool,
    tol: float = 1e-6,
    points=None,
    initial_radius: float = 0.05,
    halvings: int = 24,
    spectrum_tol: float = SPECTRUM_TOL,
) -> Norm1Result:
    """Look for points of the spectrum whose atom ``F({x})`` vanishes.

    For a :class:`DiscretePOVM` the atoms are the effects themselves. For
    anything with a ``norm(IntervalSet)`` method, ``||F({x})||`` is
    estimated from ``||F([x - r, x + r))||`` as ``r`` is halved, with a
    linear extrapolation of the last two radii to ``r = 0``; ``x`` counts as
    a spectral point while the norm at the smallest radius exceeds
    ``spectrum_tol``. ``points`` lists the candidate outcomes.

    An obstruction is reported when ``uniform_continuity`` holds and some
    spectral point has atom norm at most ``tol``. Atoms with norm strictly
    between ``tol`` and ``1 - tol`` are listed as direct norm-1 violations.
    """
    atom_norms = {}
    if isinstance(F, DiscretePOVM):
        spectrum = povm_spectrum(F, spectrum_tol)
        for x, E in zip(F.labels, F.effects):
            if x in spectrum:
                atom_norms[x] = linalg.opnorm(E)
    else:
        if points is None:
            raise ValidationError("candidate points are required for a continuum POVM")
        for x in np.asarray(points, dtype=float):
            radii = initial_radius / 2.0 ** np.arange(halvings + 1)
            seq = [F.norm(IntervalSet.interval(x - r, x + r)) for r in radii]
            if seq[-1] <= spectrum_tol:
                continue
            atom_norms[float(x)] = max(0.0, 2 * seq[-1] - seq[-2])
    witnesses = [x for x, a in atom_norms.items() if a <= tol]
    violations = [x for x, a in atom_norms.items() if tol < a < 1 - tol]
    return Norm1Result(bool(uniform_continuity and witnesses), witnesses, atom_norms,
                       bool(uniform_continuity), violations)


@dataclass(frozen=True)
class WeightedLebesgue:
    """``nu(D) = weight * Leb(D n window)``; no window means the whole line."""

    weight: float = 1.0
    window: tuple | None = None

    def __call__(self, delta: IntervalSet) -> float:
        if self.window is not None:
            delta = delta & IntervalSet.interval(*self.window)
        return self.weight * delta.measure()


@dataclass
class AbsoluteContinuityResult:
    holds: bool
    worst_ratio: float
    failures: list

    def to_dict(self) -> dict:
        return dict(vars(self))


def absolute_continuity_check(F, nu: Callable[[IntervalSet], float], c: float, family: Sequence[IntervalSet], ac_tol: float = AC_TOL) -> AbsoluteContinuityResult:
    """Check ``||F(D)|| <= c * nu(D)`` over ``family``."""
    worst = 0.0
    failures = []
    for i, D in enumerate(family):
        n, v = float(F.norm(D)), float(nu(D))
        if v < 0:
            raise ValidationError("nu must be nonnegative")
        if n > c * v + ac_tol:
            failures.append(i)
        if v > 0:
            worst = max(worst, n / v)
        elif n > ac_tol:
            worst = math.inf
    return AbsoluteContinuityResult(not failures, worst, failures)


@dataclass
class DiniResult:
    is_monotone: bool
    pointwise_to_zero: bool
    sup_norms: list
    uniform: bool

    def to_dict(self) -> dict:
        return dict(vars(self))


def dini_uniform_convergence(f_seq, tol: float = 1e-2, monotone_tol: float = 1e-12) -> DiniResult:
    """Check the hypotheses and conclusion of Dini's theorem on sampled functions.

    ``f_seq`` has one row per function, all sampled on the same compact grid.
    Uniform convergence is claimed only when the sequence is nonincreasing,
    its last member is within ``tol`` of zero at every point, and its sup
    norm is within ``tol``.
    """
    f = np.asarray(f_seq, dtype=float)
    if f.ndim != 2 or len(f) < 1:
        raise ValidationError("expected a 2-D array of sampled functions")
    monotone = bool(np.all(np.diff(f, axis=0) <= monotone_tol))
    pointwise = bool(np.all(np.abs(f[-1]) <= tol))
    sup = np.abs(f).max(axis=1)
    uniform = monotone and pointwise and bool(sup[-1] <= tol)
    return DiniResult(monotone, pointwise, sup.tolist(), uniform)
