"""End-to-end acceptance checks, one test per criterion."""

import math
import time

import numpy as np
import pytest

from povmkit.continuity import (
    ConvolutionKernel,
    WeightedLebesgue,
    absolute_continuity_check,
    dini_uniform_convergence,
    feller_integral,
    feller_test,
    kernel_value,
    norm1_test,
    uniform_continuity_test,
)
from povmkit.errors import NotAFunctionOfA
from povmkit.intervals import IntervalSet, RealGrid, random_interval_set
from povmkit.kernel import extract_kernel, separates_points, smear, validate_markov_kernel
from povmkit.linalg import opnorm
from povmkit.observables import build_unsharp_position, optimal_gaussian_kernel
from povmkit.povm import is_commutative, random_pvm
from povmkit.sharp import build_sharp_version, sharp_versions_equivalent, verify_generating_equality

from conftest import perturbed_noncommutative, random_fixture, record_acceptance

H = 1e-3
SEED = 20240501


@pytest.fixture(scope="module")
def commutative_fixtures():
    rng = np.random.default_rng(SEED)
    return [random_fixture(rng) for _ in range(500)]


@pytest.fixture(scope="module")
def noncommutative_fixtures():
    rng = np.random.default_rng(SEED + 1)
    return [perturbed_noncommutative(rng) for _ in range(200)]


def gaussian(l):
    return optimal_gaussian_kernel(l, RealGrid.from_range(-40 * l, 40 * l, H))


def example_observable():
    """Triangular density on [0, 1] (sup 2) observed on the domain [0, 1]."""
    g = RealGrid.from_range(0, 1, H)
    K = ConvolutionKernel(g, 2 - 4 * np.abs(g.points - 0.5), sup_bound=2.0)
    return build_unsharp_position(K, RealGrid.from_range(0, 1, 0.01))


def test_acceptance_1_smearing_equivalence(commutative_fixtures, noncommutative_fixtures):
    t0 = time.perf_counter()
    worst, bad = 0.0, []
    for i, P in enumerate(commutative_fixtures):
        S = build_sharp_version(P)
        T = extract_kernel(P, S)
        if not validate_markov_kernel(T).passed:
            bad.append(i)
            continue
        R = smear(S, T)
        err = max(opnorm(a - b) for a, b in zip(R.effects, P.effects))
        worst = max(worst, err)
        if err > 1e-9:
            bad.append(i)
    rejected = 0
    for P in noncommutative_fixtures:
        if not is_commutative(P)[0]:
            rejected += 1
            continue
        try:
            extract_kernel(P, build_sharp_version(P))
        except NotAFunctionOfA:
            rejected += 1
    elapsed = time.perf_counter() - t0
    ok = not bad and rejected == 200 and elapsed < 60
    record_acceptance(1, ok, f"{500 - len(bad)}/500 round-trips (worst {worst:.1e}), "
                             f"{rejected}/200 non-commutative rejected, {elapsed:.1f}s")
    assert ok


def test_acceptance_2_labeling_uniqueness(commutative_fixtures):
    same = sum(
        sharp_versions_equivalent(build_sharp_version(P, "index"), build_sharp_version(P, "ternary"))
        for P in commutative_fixtures
    )
    record_acceptance(2, same == 500, f"{same}/500 index/ternary pairs equivalent")
    assert same == 500


def test_acceptance_3_separation(commutative_fixtures):
    generating, separating = 0, 0
    for P in commutative_fixtures:
        S = build_sharp_version(P)
        if verify_generating_equality(P, S):
            generating += 1
            separating += separates_points(extract_kernel(P, S))[0]
    ok = generating == 500 and separating == 500
    record_acceptance(3, ok, f"{generating}/500 generating, {separating} separate points")
    assert ok


def test_acceptance_4_gaussian_lipschitz():
    rng = np.random.default_rng(SEED + 4)
    worst = -math.inf
    for l in (0.5, 1.0, 2.0):
        K = gaussian(l)
        bound = math.sqrt(2) / (l * math.sqrt(math.pi))
        for _ in range(100):
            D = random_interval_set(rng, -10 * l, 10 * l)
            x, x2 = rng.uniform(-10 * l, 10 * l, size=2)
            diff = abs(kernel_value(K, D, x) - kernel_value(K, D, x2))
            worst = max(worst, diff - bound * abs(x - x2))
    ok = worst <= 1e-5
    record_acceptance(4, ok, f"max excess over sqrt(2)/(l sqrt(pi))|x-x'| is {worst:.2e}")
    assert ok


def test_acceptance_5_gaussian_not_uniformly_continuous():
    l = 1.0
    K = gaussian(l)
    Q = build_unsharp_position(K, K.grid)
    family = [IntervalSet.interval(-math.inf, -i * l) for i in range(1, 31)]
    res = uniform_continuity_test(Q, family)
    ok = min(res.norms) >= 1 - 1e-6 and not res.converging
    record_acceptance(5, ok, f"min norm {min(res.norms):.9f}, converging={res.converging}")
    assert ok


def test_acceptance_6_example_absolute_and_uniform_continuity():
    rng = np.random.default_rng(SEED + 6)
    Q = example_observable()
    nu = WeightedLebesgue(Q.kernel.sup_bound, (-1.0, 1.0))
    sets = [random_interval_set(rng, -2, 2) for _ in range(200)]
    ac = absolute_continuity_check(Q, nu, 1.0, sets)
    families = {
        "[-2^-i, 0)": [IntervalSet.interval(-(2.0**-i), 0) for i in range(1, 41)],
        "[0.5, 0.5 + 2^-i)": [IntervalSet.interval(0.5, 0.5 + 2.0**-i) for i in range(1, 41)],
        "[2, 2 + 1/i)": [IntervalSet.interval(2, 2 + 1 / i) for i in range(1, 41)],
    }
    uc = {name: uniform_continuity_test(Q, fam) for name, fam in families.items()}
    last = max(r.norms[-1] for r in uc.values())
    ok = ac.holds and all(r.converging for r in uc.values()) and last < 1e-6
    record_acceptance(6, ok, f"abs continuity on 200 sets (worst ratio {ac.worst_ratio:.3f}), "
                             f"shrinking families end at {last:.1e}")
    assert ok


def test_acceptance_7_norm1_obstruction():
    Q = example_observable()
    family = [IntervalSet.interval(-(2.0**-i), 0) for i in range(1, 41)]
    uc = uniform_continuity_test(Q, family).converging
    res = norm1_test(Q, uc, points=np.linspace(-0.9, 0.9, 19))
    rng = np.random.default_rng(SEED + 7)
    pvm_flags = [norm1_test(random_pvm(rng, int(d)), True).obstruction for d in rng.integers(1, 9, size=50)]
    ok = res.obstruction and max(res.atom_norms.values()) <= 1e-6 and not any(pvm_flags)
    record_acceptance(7, ok, f"unsharp obstruction={res.obstruction} "
                             f"(max atom {max(res.atom_norms.values()):.1e}), "
                             f"{sum(pvm_flags)}/50 PVMs flagged")
    assert ok


def test_acceptance_8_closed_form_oracles():
    rng = np.random.default_rng(SEED + 8)
    l = 1.0
    K = gaussian(l)
    s = l * math.sqrt(2)
    worst = 0.0
    for _ in range(1000):
        a, b = np.sort(rng.uniform(-15, 15, size=2))
        x = rng.uniform(-15, 15)
        exact = 0.5 * (math.erf((x - a) / s) - math.erf((x - b) / s))
        worst = max(worst, abs(kernel_value(K, IntervalSet.interval(a, b), x) - exact))
    lams = rng.uniform(-5, 5, size=50)
    feller_err = float(np.max(np.abs(feller_integral(K, np.cos, lams) - math.exp(-l * l / 2) * np.cos(lams))))
    lam = 0.3
    conv = feller_test(K, np.cos, lam + 2.0 ** -np.arange(30), lam).converged
    ok = worst <= 1e-6 and feller_err <= 1e-5 and conv
    record_acceptance(8, ok, f"erf max error {worst:.1e}, Feller cos max error {feller_err:.1e}")
    assert ok


def test_acceptance_9_dini_verdicts():
    inside = dini_uniform_convergence([np.linspace(0, 0.9, 91) ** n for n in range(1, 61)])
    closed = dini_uniform_convergence([np.linspace(0, 1, 101) ** n for n in range(1, 61)])
    lam = np.linspace(0, 1, 1001)
    spike = dini_uniform_convergence([np.maximum(0, 1 - n * np.abs(lam - 1 / n)) for n in range(1, 61)])
    ok = (
        (inside.is_monotone, inside.pointwise_to_zero, inside.uniform) == (True, True, True)
        and not closed.pointwise_to_zero and not closed.uniform
        and not spike.is_monotone and not spike.uniform
    )
    record_acceptance(9, ok, "geometric inside: uniform; closed interval: no pointwise limit; "
                             "moving spike: not monotone")
    assert ok
