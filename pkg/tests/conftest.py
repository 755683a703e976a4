"""Shared towers and Bose frames; building them once per session keeps the suite fast."""

import pytest

from src.bose import build_frame
from src.fields import build_tower


@pytest.fixture(scope="session")
def tower2():
    """GF(2) ⊂ GF(8) ⊂ GF(64) with τ³ = τ + 1."""
    return build_tower(2, 1, (1, 1, 0))


@pytest.fixture(scope="session")
def tower3():
    """GF(3) ⊂ GF(27) ⊂ GF(729) with τ³ = τ + 2."""
    return build_tower(3, 1, (2, 1, 0))


@pytest.fixture(scope="session")
def frame2(tower2):
    return build_frame(tower2)


@pytest.fixture(scope="session")
def frame3(tower3):
    return build_frame(tower3)
