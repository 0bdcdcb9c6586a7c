import pytest
from hypothesis import HealthCheck, settings, strategies as st

from artifact.padic import PrecisionContext

settings.register_profile(
    "artifact", deadline=None, max_examples=40, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("artifact")

CTX3 = PrecisionContext(3, 12)
CTX5 = PrecisionContext(5, 12)


@pytest.fixture
def ctx():
    return CTX3


@pytest.fixture
def ctx5():
    return CTX5


small_ints = st.integers(min_value=-(3**6), max_value=3**6)
units3 = small_ints.filter(lambda k: k % 3 != 0)


@st.composite
def escalars(draw, ctx=CTX3, allow_zero=True):
    a, b = draw(small_ints), draw(small_ints)
    if not allow_zero and a == 0 and b == 0:
        a = 1
    return ctx.E(a, b)


@st.composite
def fscalars(draw, ctx=CTX3, allow_zero=True):
    k = draw(small_ints)
    if not allow_zero and k == 0:
        k = 1
    v = draw(st.integers(-3, 3))
    return ctx.F(k) * ctx.F(ctx.p) ** v


@st.composite
def int_matrices(draw, ctx=CTX3, n=2):
    return [[(draw(small_ints), draw(small_ints)) for _ in range(n)] for _ in range(n)]


# acceptance verdicts, echoed at the end of the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
