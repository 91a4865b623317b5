import pytest

from groupcodes.core.intmat import IntMatrix, hermite_basis


def _planar_subgroups(M):
    """Every subgroup of Z_M^2 of order M, as its row Hermite basis (independent of the enumerator)."""
    out = []
    for h2 in range(1, M + 1):
        if M % h2:
            continue
        h1 = M // h2
        for x in range(h2):
            H = IntMatrix.from_rows([[h1, x], [0, h2]])
            with_m = hermite_basis([[h1, x], [0, h2], [M, 0], [0, M]], 2)
            if with_m == H:
                out.append(H)
    return out


@pytest.fixture
def planar_subgroups():
    return _planar_subgroups
