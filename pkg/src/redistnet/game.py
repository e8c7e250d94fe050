"""The one-shot two-player game and its transformation under redistribution.

The dilemma is parameterized by the temptation payoff T alone: reward R = 1,
punishment P = 0, sucker's payoff S = 1 - T.  Taxing the surplus above a
threshold and handing it to the opponent reshapes the payoff matrix; above
the critical taxation level the prisoner's dilemma turns into a harmony
game.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class Strategy(enum.IntEnum):
    DEFECT = 0
    COOPERATE = 1


class GameClass(enum.Enum):
    PRISONERS_DILEMMA = "prisoners_dilemma"
    STAG_HUNT = "stag_hunt"
    SNOWDRIFT = "snowdrift"
    HARMONY = "harmony"
    DEADLOCK = "deadlock"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class GameParams:
    """Payoff entries derived from the temptation value.

    The dilemma regime is 1 < T <= 2; values outside it are accepted so the
    classification machinery can be exercised on the full family.
    """

    temptation: float

    @property
    def reward(self) -> float:
        return 1.0

    @property
    def punishment(self) -> float:
        return 0.0

    @property
    def sucker(self) -> float:
        return 1.0 - self.temptation

    def is_pd_regime(self) -> bool:
        return 1.0 < self.temptation <= 2.0


def payoff(my_strategy: Strategy, their_strategy: Strategy, params: GameParams) -> float:
    """Row player's payoff: (C,C)->R, (C,D)->S, (D,C)->T, (D,D)->P."""
    if my_strategy == Strategy.COOPERATE:
        return params.reward if their_strategy == Strategy.COOPERATE else params.sucker
    return params.temptation if their_strategy == Strategy.COOPERATE else params.punishment


def payoff_matrix(params: GameParams) -> np.ndarray:
    """2x2 matrix indexed [my_strategy, their_strategy] with D=0, C=1."""
    return np.array(
        [
            [params.punishment, params.temptation],
            [params.sucker, params.reward],
        ],
        dtype=np.float64,
    )


def redistributed_matrix(params: GameParams, alpha: float, theta: float) -> np.ndarray:
    """Two-player matrix after taxing the surplus above theta at rate alpha.

    Only the mixed outcomes change: the defector facing a cooperator loses
    alpha*(T - theta) and the cooperator receives it.  When theta >= T there
    is no surplus and the matrix is the untaxed one.  Same [my, their]
    indexing as :func:`payoff_matrix`.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    if theta < 0.0:
        raise ValueError("theta must be >= 0")
    t = params.temptation
    transfer = alpha * (t - theta) if t > theta else 0.0
    return np.array(
        [
            [0.0, t - transfer],
            [1.0 - t + transfer, 1.0],
        ],
        dtype=np.float64,
    )


def critical_alpha(temptation: float, theta: float) -> float | None:
    """Minimum taxation that changes the nature of the game: (T-1)/(T-theta).

    Returns None when theta >= T (no surplus exists, so no taxation level
    can reshape the matrix).
    """
    if theta >= temptation:
        return None
    return (temptation - 1.0) / (temptation - theta)


def classify(matrix: np.ndarray) -> GameClass:
    """Classify a 2x2 payoff matrix by the strict ordering of (R, S, T, P).

    Any tie maps to DEGENERATE.  Harmony covers both cooperation-dominant
    strict orderings (R > T > S > P and R > S > T > P): mutual cooperation
    strictly best, mutual defection strictly worst.  Strict orderings outside
    the named taxonomy also map to DEGENERATE.
    """
    m = np.asarray(matrix, dtype=np.float64)
    p, t = m[0, 0], m[0, 1]
    s, r = m[1, 0], m[1, 1]
    values = (r, s, t, p)
    if len({float(v) for v in values}) < 4:
        return GameClass.DEGENERATE
    if t > r > p > s:
        return GameClass.PRISONERS_DILEMMA
    if r > t > p > s:
        return GameClass.STAG_HUNT
    if t > r > s > p:
        return GameClass.SNOWDRIFT
    if t > p > r > s:
        return GameClass.DEADLOCK
    if r > max(t, s) and p < min(t, s):
        return GameClass.HARMONY
    return GameClass.DEGENERATE


def critical_alpha_rows(thetas, temptations) -> list[dict]:
    """Rows (theta, T, alpha_star) for the critical-taxation curves.

    Grid points with theta >= T have no critical value and are skipped.
    """
    rows = []
    for theta in thetas:
        for t in temptations:
            a_star = critical_alpha(float(t), float(theta))
            if a_star is None:
                continue
            rows.append({"theta": float(theta), "T": float(t), "alpha_star": a_star})
    return rows
