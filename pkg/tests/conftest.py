import mpmath
import pytest

from qsum.arith import make_context


@pytest.fixture(scope="session")
def ctx():
    return make_context(50)


@pytest.fixture(scope="session")
def ctx20():
    return make_context(20)


@pytest.fixture(scope="session")
def ctx60():
    return make_context(60)


@pytest.fixture
def hp():
    """Run the test body at 70 digits so asserted literals are not rounded."""
    with mpmath.workdps(70):
        yield
