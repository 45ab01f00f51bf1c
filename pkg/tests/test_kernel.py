import numpy as np
import pytest

from povmkit.errors import NotAFunctionOfA, ValidationError
from povmkit.kernel import KernelTable, extract_kernel, separates_points, smear, validate_markov_kernel
from povmkit.linalg import opnorm, spectral_decompose
from povmkit.povm import DiscretePOVM, is_commutative, random_pvm, validate_povm
from povmkit.sharp import SharpVersion, build_sharp_version, verify_generating_equality

from conftest import noncommuting_povm, perturbed_noncommutative, random_fixture


def test_pvm_kernel_is_indicator(rng):
    P = random_pvm(rng, 5)
    S = build_sharp_version(P)
    T = extract_kernel(P, S)
    np.testing.assert_allclose(np.sort(T.entries, axis=1)[:, -1], 1.0, atol=1e-10)
    assert set(np.round(T.entries, 10).ravel()) <= {0.0, 1.0}


def test_qubit_rows(qubit_povm):
    S = build_sharp_version(qubit_povm, "index")
    T = extract_kernel(qubit_povm, S)
    assert sorted(map(tuple, T.entries.round(12))) == [(0.2, 0.8), (0.7, 0.3)]


def test_random_extraction_and_brute_force_reconstruction(rng):
    from povmkit.povm import random_commutative_povm

    P = random_commutative_povm(rng, 6, 5)
    S = build_sharp_version(P)
    T = extract_kernel(P, S)
    assert validate_markov_kernel(T).passed
    for j, F in enumerate(P.effects):
        brute = sum(T.entries[k, j] * E for k, E in enumerate(S.projectors))
        assert opnorm(brute - F) <= 1e-9


def test_extract_rejects_incompatible_sharp_version():
    P = noncommuting_povm()
    sd = spectral_decompose(P.effects[0])
    S = SharpVersion(np.array([0.25, 0.75]), sd.projectors)
    with pytest.raises(NotAFunctionOfA) as err:
        extract_kernel(P, S)
    assert err.value.residual > 1e-3


def test_validate_good_rows():
    T = KernelTable([0.2, 0.8], ["a", "b"], [[0.7, 0.3], [0.2, 0.8]])
    assert validate_markov_kernel(T).passed


def test_validate_row_sum_defect():
    T = KernelTable([0.5], ["a", "b"], [[0.7, 0.4]])
    rep = validate_markov_kernel(T)
    assert not rep.passed
    assert rep.details["max_row_sum_defect"] == pytest.approx(0.1)


def test_validate_range_violation():
    T = KernelTable([0.5], ["a", "b"], [[-0.05, 1.05]])
    rep = validate_markov_kernel(T)
    assert not rep.passed
    assert rep.details["range_violations"][0][:2] == (0, 0)


def test_shape_mismatch():
    with pytest.raises(ValidationError):
        KernelTable([0.5, 0.6], ["a"], [[1.0]])


def test_smear_identity_kernel(rng):
    P = random_pvm(rng, 4)
    S = build_sharp_version(P, "index")
    n = len(S)
    Q = smear(S, KernelTable(S.eigenvalues, [f"y{k}" for k in range(n)], np.eye(n)))
    for F, E in zip(Q.effects, S.projectors):
        np.testing.assert_allclose(F, E, atol=1e-15)


def test_smear_constant_rows(rng):
    P = random_pvm(rng, 4)
    S = build_sharp_version(P, "index")
    p = np.array([0.1, 0.6, 0.3])
    Q = smear(S, KernelTable(S.eigenvalues, ["a", "b", "c"], np.tile(p, (len(S), 1))))
    for pj, F in zip(p, Q.effects):
        np.testing.assert_allclose(F, pj * np.eye(4), atol=1e-12)


def test_smear_inverts_extraction_example(qubit_povm):
    S = build_sharp_version(qubit_povm, "index")
    Q = smear(S, extract_kernel(qubit_povm, S))
    np.testing.assert_allclose(Q.effects, qubit_povm.effects, atol=1e-15)


def test_smear_label_mismatch(qubit_povm):
    S = build_sharp_version(qubit_povm, "index")
    with pytest.raises(ValidationError):
        smear(S, KernelTable([0.1, 0.2], ["a", "b"], [[1, 0], [0, 1]]))


def test_separates():
    T = KernelTable([0.2, 0.8], ["a", "b"], [[0.7, 0.3], [0.2, 0.8]])
    assert separates_points(T) == (True, [])
    T = KernelTable([0.2, 0.8], ["a", "b"], [[0.7, 0.3], [0.7, 0.3]])
    assert separates_points(T) == (False, [(0, 1)])


def test_round_trip_povm(rng):
    for _ in range(200):
        P = random_fixture(rng)
        S = build_sharp_version(P)
        Q = smear(S, extract_kernel(P, S))
        assert max(opnorm(a - b) for a, b in zip(P.effects, Q.effects)) <= 1e-9
        assert validate_povm(Q).passed


def test_round_trip_kernel(rng):
    for _ in range(200):
        d = int(rng.integers(1, 9))
        S = build_sharp_version(random_pvm(rng, d), "index")
        m = int(rng.integers(1, 8))
        T = KernelTable(S.eigenvalues, [f"y{j}" for j in range(m)], rng.dirichlet(np.ones(m), size=len(S)))
        T2 = extract_kernel(smear(S, T), S)
        np.testing.assert_allclose(T2.entries, T.entries, rtol=0, atol=1e-10)


def test_extraction_iff_commutative(rng):
    for _ in range(100):
        P = random_fixture(rng)
        assert is_commutative(P)[0]
        extract_kernel(P, build_sharp_version(P))
    for _ in range(50):
        Q = perturbed_noncommutative(rng)
        assert not is_commutative(Q)[0]
        # any sharp version built from one effect cannot absorb the others
        sd = spectral_decompose(Q.effects[0])
        S = SharpVersion(np.arange(1, len(sd.projectors) + 1) / (len(sd.projectors) + 1), sd.projectors)
        with pytest.raises(NotAFunctionOfA):
            extract_kernel(Q, S)


def test_separation_follows_generating_equality(rng):
    for _ in range(100):
        P = random_fixture(rng)
        S = build_sharp_version(P)
        assert verify_generating_equality(P, S)
        assert separates_points(extract_kernel(P, S))[0]


def test_overresolved_sharp_version_reports_collisions():
    P = DiscretePOVM.from_effects([np.diag([0.7, 0.7, 0.2]), np.diag([0.3, 0.3, 0.8])])
    S = SharpVersion([0.2, 0.5, 0.8], tuple(np.diag(e) for e in np.eye(3)))
    T = extract_kernel(P, S)
    ok, collisions = separates_points(T)
    assert not ok and collisions == [(0, 1)]
