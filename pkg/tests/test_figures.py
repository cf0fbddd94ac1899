"""Chart regressions beyond the acceptance set: Figures 1, 2 and the general-k chart."""
import pytest

from motext.verify.figures import figure1, figure2, figure6

pytestmark = pytest.mark.slow


def test_figure1_dots_and_markers():
    rep = figure1()
    assert rep.passed, rep.summary()


def test_figure2_dots_and_markers():
    rep = figure2()
    assert rep.passed, rep.summary()


def test_general_k_labelled_cells():
    rep = figure6()
    assert rep.passed, rep.summary()
