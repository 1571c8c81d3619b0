import numpy as np
import pytest

from dualgame import game

OMEGA = np.exp(2j * np.pi / 3)
S3 = np.sqrt(3.0)
S2 = np.sqrt(2.0)

# Literal transcriptions used as independent references in the tests.
TRINE = np.array([[1, 0], [-1 / 2, S3 / 2], [-1 / 2, -S3 / 2]], dtype=complex)
ANTI_TRINE = np.array([[0, 1], [-S3 / 2, -1 / 2], [S3 / 2, -1 / 2]], dtype=complex)
SIMPLEX = np.array(
    [
        [0, 0, 1],
        [2 * S2 / 3, 0, -1 / 3],
        [-S2 / 3, np.sqrt(2 / 3), -1 / 3],
        [-S2 / 3, -np.sqrt(2 / 3), -1 / 3],
    ],
    dtype=complex,
)
U_BASIS = np.array([[OMEGA ** (s * j) for j in range(3)] for s in (0, 1, -1)]) / S3
V_BASIS = np.array([[1j ** (j * k) for k in range(4)] for j in range(4)]) / 2


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


@pytest.fixture
def trine3():
    return game.trine3()


@pytest.fixture
def sixpair4():
    return game.sixpair4()


@pytest.fixture
def twopair4():
    return game.twopair4()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
