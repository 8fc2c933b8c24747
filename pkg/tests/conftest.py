import math

import numpy as np
import pytest

from fcschain.parametrization import ParameterVector, build_pair
from fcschain.fcs import solve_invariant_state
from fcschain.reference import optimum_params

B2_OPT = (0.427079, 0.571859)
SQRT2_M1 = math.sqrt(2) - 1


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def b2_optimum():
    params = ParameterVector(2, [B2_OPT[0]], [B2_OPT[1]])
    pair = build_pair(params)
    return params, pair, solve_invariant_state(pair)


@pytest.fixture(scope="session")
def stored_optima():
    out = {}
    for b in range(2, 8):
        params = optimum_params(b)
        pair = build_pair(params)
        out[b] = (params, pair, solve_invariant_state(pair))
    return out


# (criterion number, passed, detail) appended by test_acceptance.py
ACCEPTANCE = []


def record_criterion(number, passed, detail):
    ACCEPTANCE.append((number, bool(passed), detail))
    print(f"CRITERION {number}: {'PASS' if passed else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE, key=lambda t: t[0]):
        terminalreporter.write_line(f"CRITERION {number}: {'PASS' if passed else 'FAIL'} {detail}")
