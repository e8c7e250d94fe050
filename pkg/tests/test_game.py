import numpy as np
import pytest
from hypothesis import given, strategies as st

import redistnet as rn
from redistnet.game import GameClass, GameParams, Strategy

C, D = Strategy.COOPERATE, Strategy.DEFECT


def test_params_derived_entries():
    g = GameParams(1.5)
    assert (g.reward, g.punishment, g.sucker) == (1.0, 0.0, -0.5)
    assert g.is_pd_regime()
    assert not GameParams(0.9).is_pd_regime()


def test_payoff_entries():
    g = GameParams(1.5)
    assert rn.payoff(C, C, g) == 1.0
    assert rn.payoff(D, C, g) == 1.5
    assert rn.payoff(C, D, g) == -0.5
    assert rn.payoff(D, D, g) == 0.0


def test_payoff_matrix_indexing():
    m = rn.payoff_matrix(GameParams(1.5))
    assert m[D, C] == 1.5 and m[C, D] == -0.5 and m[C, C] == 1.0 and m[D, D] == 0.0


def test_redistributed_matrix_worked_example():
    m = rn.redistributed_matrix(GameParams(1.5), alpha=0.5, theta=0.5)
    assert m[D, C] == pytest.approx(1.0)
    assert m[C, D] == pytest.approx(0.0)


def test_redistributed_matrix_no_tax_is_original():
    g = GameParams(1.7)
    assert np.array_equal(rn.redistributed_matrix(g, 0.0, 0.5), rn.payoff_matrix(g))


def test_redistributed_matrix_full_surplus_transfer():
    m = rn.redistributed_matrix(GameParams(1.5), alpha=1.0, theta=1.0)
    assert m[D, C] == pytest.approx(1.0)
    assert m[C, D] == pytest.approx(0.0)


def test_redistributed_matrix_no_surplus_below_threshold():
    g = GameParams(1.3)
    assert np.array_equal(rn.redistributed_matrix(g, 0.9, 2.0), rn.payoff_matrix(g))


def test_redistributed_matrix_validation():
    with pytest.raises(ValueError):
        rn.redistributed_matrix(GameParams(1.5), 1.2, 0.5)
    with pytest.raises(ValueError):
        rn.redistributed_matrix(GameParams(1.5), 0.5, -0.1)


@given(
    t=st.floats(1.0, 2.0, exclude_min=True),
    alpha=st.floats(0.0, 1.0),
    theta=st.floats(0.0, 2.0),
)
def test_redistribution_keeps_diagonal(t, alpha, theta):
    m = rn.redistributed_matrix(GameParams(t), alpha, theta)
    assert m[C, C] == 1.0
    assert m[D, D] == 0.0
    # transfers cancel: the off-diagonal entries always sum to 1
    assert m[D, C] + m[C, D] == pytest.approx(1.0)


def test_redistributed_matrix_linear_in_alpha():
    g = GameParams(1.8)
    theta = 0.6
    slope = g.temptation - theta
    for a in (0.0, 0.3, 0.7, 1.0):
        m = rn.redistributed_matrix(g, a, theta)
        assert m[D, C] == pytest.approx(1.8 - a * slope)
        assert m[C, D] == pytest.approx(1.0 - 1.8 + a * slope)


# --- critical taxation ---------------------------------------------------------

def test_critical_alpha_values():
    assert rn.critical_alpha(2.0, 1.0) == pytest.approx(1.0)
    assert rn.critical_alpha(1.0, 0.5) == 0.0
    assert rn.critical_alpha(1.5, 0.0) == pytest.approx(1.0 / 3.0)


def test_critical_alpha_no_surplus():
    assert rn.critical_alpha(1.5, 1.5) is None
    assert rn.critical_alpha(1.5, 2.0) is None


def test_critical_alpha_rows_skip_undefined():
    rows = rn.critical_alpha_rows([0.0, 1.5], [1.2, 1.8])
    assert {(r["theta"], r["T"]) for r in rows} == {(0.0, 1.2), (0.0, 1.8), (1.5, 1.8)}
    for r in rows:
        assert r["alpha_star"] == pytest.approx((r["T"] - 1) / (r["T"] - r["theta"]))


# --- classification -------------------------------------------------------------

def matrix_from_order(r, s, t, p):
    return np.array([[p, t], [s, r]])


def test_classify_named_orderings():
    assert rn.classify(matrix_from_order(1, -0.5, 1.5, 0)) is GameClass.PRISONERS_DILEMMA
    assert rn.classify(matrix_from_order(3, 0, 2, 1)) is GameClass.STAG_HUNT
    assert rn.classify(matrix_from_order(2, 1, 3, 0)) is GameClass.SNOWDRIFT
    assert rn.classify(matrix_from_order(3, 1, 2, 0)) is GameClass.HARMONY
    assert rn.classify(matrix_from_order(3, 2, 1, 0)) is GameClass.HARMONY
    assert rn.classify(matrix_from_order(1, 0, 3, 2)) is GameClass.DEADLOCK


def test_classify_ties_are_degenerate():
    assert rn.classify(matrix_from_order(1, 1, 1, 1)) is GameClass.DEGENERATE
    assert rn.classify(matrix_from_order(1, 0, 1, 0.5)) is GameClass.DEGENERATE


def test_classify_below_critical_stays_pd():
    # alpha* = (1.5-1)/(1.5-1.0) = 1.0, so alpha=0.9 keeps the dilemma
    m = rn.redistributed_matrix(GameParams(1.5), alpha=0.9, theta=1.0)
    assert rn.classify(m) is GameClass.PRISONERS_DILEMMA


def test_classify_at_exact_critical_is_degenerate():
    m = rn.redistributed_matrix(GameParams(1.5), alpha=0.5, theta=0.5)
    assert rn.classify(m) is GameClass.DEGENERATE


@given(
    vals=st.tuples(
        st.floats(-5, 5, allow_nan=False),
        st.floats(-5, 5, allow_nan=False),
        st.floats(-5, 5, allow_nan=False),
        st.floats(-5, 5, allow_nan=False),
    )
)
def test_classify_total(vals):
    assert rn.classify(matrix_from_order(*vals)) in GameClass


def test_critical_alpha_is_the_classification_boundary():
    # the analytic content of the two-player result: PD below alpha*, harmony
    # game above, across the (T, theta) plane
    for t in np.linspace(1.02, 2.0, 25):
        for theta in (0.0, 0.25, 0.5, 0.75, 0.99):
            a_star = rn.critical_alpha(float(t), theta)
            assert a_star is not None
            for a in np.linspace(0.0, 1.0, 100):
                if abs(a - a_star) < 1e-9:
                    continue
                cls = rn.classify(rn.redistributed_matrix(GameParams(float(t)), float(a), theta))
                if a < a_star:
                    assert cls is GameClass.PRISONERS_DILEMMA
                elif a_star < a:
                    assert cls is GameClass.HARMONY
