"""Runs each acceptance criterion at its pinned tolerance and prints one line per criterion."""

import pytest

from wtlab.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", [n for n, _, _ in CRITERIA], ids=lambda n: f"criterion_{n:02d}")
def test_criterion(number, capsys):
    crit = run_criterion(number)
    with capsys.disabled():
        print("\n" + crit.line())
        for ch in crit.checks:
            print("    " + ch.line())
    assert crit.passed, crit.line()
