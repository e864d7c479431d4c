import pytest

from qeep import TruncationMode, build_filterbank, choose_truncation


@pytest.fixture(scope="session")
def bank_appc():
    """The 201 x 566 table used by the reference experiments (eps = 0.005)."""
    return build_filterbank(0.005, 566)


@pytest.fixture(scope="session")
def bank_quarter_strict():
    """eps = 0.25 at its strict truncation order (N = 414)."""
    n = choose_truncation(0.25, TruncationMode.STRICT)
    return build_filterbank(0.25, n)


@pytest.fixture(scope="session")
def bank_mid_strict():
    """eps = 0.05 at its strict truncation order (N = 4469)."""
    n = choose_truncation(0.05, TruncationMode.STRICT)
    return build_filterbank(0.05, n)
