"""
tests/conftest.py — Shared instances.

  i_path       1 → 2 → 3 → 4, pair (1, 4), p = 1
  diamond      1 → {2, 3} → 4, pair (1, 4), p = 2
  diamond_p1   same graph, p = 1 (NO: two disjoint paths)
  two_sources  sources 1 and 2 share the middle vertex 3
"""

import pytest

from app.services.dag_core import build_instance


@pytest.fixture
def i_path():
    return build_instance([1, 2, 3, 4], [(1, 2), (2, 3), (3, 4)], [(1, 4)], 1)


@pytest.fixture
def diamond():
    return build_instance([1, 2, 3, 4], [(1, 2), (1, 3), (2, 4), (3, 4)], [(1, 4)], 2)


@pytest.fixture
def diamond_p1():
    return build_instance([1, 2, 3, 4], [(1, 2), (1, 3), (2, 4), (3, 4)], [(1, 4)], 1)


@pytest.fixture
def two_sources():
    # 1 → 3 → 4 → 5, 2 → 3, 4 → 6; pairs (1, 5) and (2, 6)
    return build_instance(
        [1, 2, 3, 4, 5, 6],
        [(1, 3), (2, 3), (3, 4), (4, 5), (4, 6)],
        [(1, 5), (2, 6)],
        1,
    )
