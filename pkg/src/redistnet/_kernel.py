"""Compiled inner loop of the imitation dynamics.

The loop state (strategies, payoff cache, cooperator count, RNG state) lives
in plain arrays and integers so the whole replicate runs without touching the
interpreter.  The RNG is PCG-XSH-RR 32, kept bit-compatible with
:class:`redistnet.rng.Pcg32`; the pure-Python ``dynamics.step`` consumes the
same stream in the same order, which the tests exploit to check the two
implementations against each other exactly.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

U64 = np.uint64

_PCG_MULT = U64(6364136223846793005)
_MASK32 = U64(0xFFFFFFFF)


@njit(inline="always")
def _pcg_next(state, inc):
    # All arithmetic stays in uint64 with explicit 32-bit masks; numba
    # promotes narrower ints, so uint32 intermediates would keep high bits.
    old = state
    state = old * _PCG_MULT + inc
    xorshifted = (((old >> U64(18)) ^ old) >> U64(27)) & _MASK32
    rot = old >> U64(59)
    out = ((xorshifted >> rot) | (xorshifted << ((U64(32) - rot) & U64(31)))) & _MASK32
    return state, out


@njit(inline="always")
def _contribution(pi, floors, rates):
    for k in range(floors.shape[0] - 1, -1, -1):
        if pi > floors[k]:
            return rates[k] * (pi - floors[k])
    return 0.0


@njit(inline="always")
def _fitness(i, payoffs, contrib_indptr, contrib_indices, inv_set_size, floors, rates):
    f = payoffs[i] - _contribution(payoffs[i], floors, rates)
    for t in range(contrib_indptr[i], contrib_indptr[i + 1]):
        j = contrib_indices[t]
        f += _contribution(payoffs[j], floors, rates) * inv_set_size[j]
    return f


@njit(cache=True, nogil=True)
def run_loop(
    strategies,
    payoffs,
    coop_count,
    adj_indptr,
    adj_indices,
    contrib_indptr,
    contrib_indices,
    inv_set_size,
    floors,
    rates,
    pay_m,
    beta,
    max_steps,
    state,
    inc,
):
    """Run up to ``max_steps`` asynchronous imitation steps in place.

    Returns (coop_count, steps_taken, rng_state).  Stops early on fixation.
    ``pay_m`` is the 2x2 payoff matrix indexed [my_strategy, their_strategy].
    """
    n = strategies.shape[0]
    steps = 0
    while steps < max_steps and 0 < coop_count < n:
        steps += 1
        state, r = _pcg_next(state, inc)
        i = np.int64(r) % n
        zi = adj_indptr[i + 1] - adj_indptr[i]
        state, r = _pcg_next(state, inc)
        j = adj_indices[adj_indptr[i] + np.int64(r) % zi]
        si = strategies[i]
        sj = strategies[j]
        if si == sj:
            continue
        fi = _fitness(i, payoffs, contrib_indptr, contrib_indices, inv_set_size, floors, rates)
        fj = _fitness(j, payoffs, contrib_indptr, contrib_indices, inv_set_size, floors, rates)
        x = beta * (fj - fi)
        if x >= 0.0:
            p = 1.0 / (1.0 + math.exp(-x))
        else:
            e = math.exp(x)
            p = e / (1.0 + e)
        state, r = _pcg_next(state, inc)
        if np.float64(r) / 4294967296.0 < p:
            strategies[i] = sj
            new_pi = 0.0
            for t in range(adj_indptr[i], adj_indptr[i + 1]):
                k = adj_indices[t]
                sk = strategies[k]
                payoffs[k] += pay_m[sk, sj] - pay_m[sk, si]
                new_pi += pay_m[sj, sk]
            payoffs[i] = new_pi
            coop_count += 1 if sj == 1 else -1
    return coop_count, steps, state
