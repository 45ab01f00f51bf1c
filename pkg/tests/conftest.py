import numpy as np
import pytest

from povmkit.povm import DiscretePOVM, random_commutative_povm, random_unitary

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def qubit_povm():
    return DiscretePOVM.from_effects([np.diag([0.7, 0.2]), np.diag([0.3, 0.8])], ["x1", "x2"])


def noncommuting_povm():
    """0.5|0><0|, 0.5|+><+| and the remainder."""
    ket0 = np.array([1, 0], dtype=complex)
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    A = 0.5 * np.outer(ket0, ket0.conj())
    B = 0.5 * np.outer(plus, plus.conj())
    return DiscretePOVM.from_effects([A, B, I2 - A - B], ["a", "b", "c"])


def random_fixture(rng, max_dim=8, max_outcomes=12):
    dim = int(rng.integers(1, max_dim + 1))
    m = int(rng.integers(1, max_outcomes + 1))
    return random_commutative_povm(rng, dim, m)


def perturbed_noncommutative(rng, min_norm=1e-3):
    """Convex mixture of two commutative POVMs diagonal in different bases."""
    from povmkit.povm import is_commutative

    while True:
        dim = int(rng.integers(2, 9))
        m = int(rng.integers(2, 13))
        P = random_commutative_povm(rng, dim, m)
        G = random_commutative_povm(rng, dim, m, n_blocks=dim)
        U = random_unitary(rng, dim)
        G_rot = U @ G.effects @ U.conj().T
        s = rng.uniform(0.05, 0.5)
        effects = (1 - s) * P.effects + s * G_rot
        effects = 0.5 * (effects + effects.conj().transpose(0, 2, 1))
        Q = DiscretePOVM.from_effects(effects)
        if is_commutative(Q)[2] >= min_norm:
            return Q


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def record_acceptance(n: int, passed: bool, detail: str) -> None:
    line = f"acceptance {n}: {'PASS' if passed else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
