import numpy as np
import pytest

import sideinfo as si


@pytest.fixture
def witness_joint() -> si.Joint:
    """The 3x2 joint whose {x1, x2} merge raises C for zero-one and Brier losses."""
    return si.validate_joint([[0.0, 0.25], [0.0, 0.25], [0.5, 0.0]])


def random_joint(rng: np.random.Generator, n: int, m: int) -> si.Joint:
    return si.Joint(rng.dirichlet(np.ones(n * m)).reshape(n, m))


def random_joint3(rng: np.random.Generator, n: int, m: int, w: int) -> si.Joint:
    return si.Joint(rng.dirichlet(np.ones(n * m * w)).reshape(n, m, w))


def copy_process() -> si.MarkovJointProcess:
    """X iid uniform bits, Y_i = X_i."""
    row = np.array([0.5, 0.0, 0.0, 0.5])
    return si.MarkovJointProcess(2, 2, row.copy(), np.tile(row, (4, 1)))


def delayed_copy_process() -> si.MarkovJointProcess:
    """X iid uniform bits, Y_i = X_{i-1} (Y_1 independent uniform)."""
    k = np.zeros((4, 4))
    for x in range(2):
        for y in range(2):
            for xp in range(2):
                k[x * 2 + y, xp * 2 + x] = 0.5
    return si.MarkovJointProcess(2, 2, np.full(4, 0.25), k)


def x_from_y_process() -> si.MarkovJointProcess:
    """Y iid uniform bits, X_i = Y_{i-1} (X_1 independent uniform)."""
    k = np.zeros((4, 4))
    for x in range(2):
        for y in range(2):
            for yp in range(2):
                k[x * 2 + y, y * 2 + yp] = 0.5
    return si.MarkovJointProcess(2, 2, np.full(4, 0.25), k)


def independent_process() -> si.MarkovJointProcess:
    """X and Y independent iid uniform bits."""
    return si.MarkovJointProcess(2, 2, np.full(4, 0.25), np.tile(np.full(4, 0.25), (4, 1)))


def random_stationary_markov(seed: int, conc: float | None = None) -> si.MarkovJointProcess:
    """A seeded random 2x2 joint Markov model started in its stationary law."""
    rng = np.random.default_rng(seed)
    alpha = conc if conc is not None else rng.uniform(0.5, 3.0)
    kernel = rng.dirichlet(np.ones(4) * alpha, size=4)
    base = si.MarkovJointProcess(2, 2, np.full(4, 0.25), kernel)
    pi = base.stationary()
    return si.MarkovJointProcess(2, 2, pi, kernel)
