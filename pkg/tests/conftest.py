import math
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from toeplitz_kms.exact import ExactScalar, ThetaMatrix  # noqa: E402

GOLDEN_RATIO_QUARTER = (math.sqrt(5) - 1) / 4


@pytest.fixture
def half_block():
    """2x2 block with entry 1/2."""
    return ThetaMatrix.from_upper(2, {(0, 1): Fraction(1, 2)})


@pytest.fixture
def example_theta():
    """4x4 matrix whose only nonzero entry is an irrational theta in the lower corner."""
    return ThetaMatrix.from_upper(4, {(2, 3): ExactScalar(0, {"theta": 1})}, {"theta": GOLDEN_RATIO_QUARTER})


@pytest.fixture
def mixed_theta():
    return ThetaMatrix.from_upper(
        4,
        {(0, 1): Fraction(1, 3), (0, 2): Fraction(1, 4), (1, 3): Fraction(2, 7), (2, 3): Fraction(1, 2),
         (0, 3): ExactScalar(0, {"t": 1})},
        {"t": math.sqrt(2)},
    )


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
