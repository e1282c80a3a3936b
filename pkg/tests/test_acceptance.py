"""Acceptance gate: every numbered criterion, one pass/fail line each.

Each test runs one criterion from lagstab.acceptance at its stated
tolerance and prints the canonical result line.  A failing criterion is a
failing test — no tolerance is relaxed here.
"""

import pytest

from lagstab.acceptance import ALL_CRITERIA

_NAMES = {
    1: "e0-closed-form-spectra",
    2: "explicit-solution-oracle",
    3: "degeneracy-anchor",
    4: "slopes-at-origin",
    5: "index-anchors",
    6: "route-agreement",
    7: "equal-mass-spectrum",
    8: "morse-monotonicity",
    9: "iteration-identity",
    10: "restricted-kernel",
    11: "symmetry-identities",
    12: "hyperbolic-boundary",
    13: "count-to-beta-map",
    14: "region-classes",
    15: "index-jump-certificate",
}


@pytest.mark.parametrize(
    "cid", range(1, len(ALL_CRITERIA) + 1),
    ids=[f"{k:02d}-{_NAMES[k]}" for k in range(1, len(ALL_CRITERIA) + 1)],
)
def test_criterion(cid):
    result = ALL_CRITERIA[cid - 1]()
    print(result.text_line())
    assert result.passed, result.text_line()
