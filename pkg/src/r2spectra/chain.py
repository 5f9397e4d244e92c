"""Positive chain sequences and their parameter sequences.

A chain sequence is indexed as in the recurrence: ``cs.value(n)`` is lambda_{n+1}
for n >= 1.  A parameter sequence m_1, m_2, ... satisfies
(1 - m_n) m_{n+1} = lambda_{n+1}; ``ParamSeq[n]`` returns m_n (1-based).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NotAChainSequenceError
from .recurrence import RecurrenceFamily

BOUNDARY_TOL = 1e-8


@dataclass(frozen=True)
class ChainSeq:
    fn: Callable[[int], float]
    label: str = "chain"
    length: int | None = None  # number of defined values when finite

    @classmethod
    def from_values(cls, values: Sequence[float], label: str = "chain") -> "ChainSeq":
        vals = tuple(float(v) for v in values)

        def fn(n):
            if not 1 <= n <= len(vals):
                raise IndexError(f"chain value {n} outside 1..{len(vals)}")
            return vals[n - 1]

        return cls(fn, label, len(vals))

    @classmethod
    def from_family(cls, fam: RecurrenceFamily) -> "ChainSeq":
        """The lambdas a family uses from its second step on."""
        return cls(lambda n: float(np.real(fam.lam_step(n))), f"chain({fam.name})")

    @classmethod
    def constant(cls, v: float) -> "ChainSeq":
        return cls(lambda n: v, f"const({v:g})")

    def value(self, n: int) -> float:
        if n < 1:
            raise IndexError("chain values are indexed from n = 1")
        return self.fn(n)

    def values(self, N: int) -> np.ndarray:
        return np.array([self.value(n) for n in range(1, N + 1)])


@dataclass(frozen=True)
class ParamSeq:
    values: np.ndarray  # values[i] = m_{i+1}
    kind: str = "general"
    meta: dict = field(default_factory=dict)

    def __getitem__(self, n: int) -> float:
        if n < 1:
            raise IndexError("parameters are indexed from n = 1")
        return float(self.values[n - 1])

    def __len__(self):
        return len(self.values)

    @classmethod
    def from_function(cls, fn: Callable[[int], float], N: int, kind: str = "general") -> "ParamSeq":
        return cls(np.array([fn(n) for n in range(1, N + 1)], dtype=float), kind)

    def chain(self, label: str = "chain") -> ChainSeq:
        """The chain sequence this parameter sequence realizes (finite)."""
        m = self.values
        return ChainSeq.from_values((1 - m[:-1]) * m[1:], label)

    def identity_residual(self, cs: ChainSeq) -> float:
        m = self.values
        lam = cs.values(len(m) - 1)
        return float(np.max(np.abs((1 - m[:-1]) * m[1:] - lam))) if len(m) > 1 else 0.0


def minimal_params(cs: ChainSeq, N: int) -> ParamSeq:
    """l_1 = 0, l_{n+1} = lambda_{n+1} / (1 - l_n); returns l_1..l_N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    out = np.zeros(N)
    for n in range(1, N):
        l = cs.value(n) / (1.0 - out[n - 1])
        if not 0.0 < l < 1.0:
            raise NotAChainSequenceError(
                f"{cs.label}: minimal parameter l_{n + 1} = {float(l)!r} not in (0, 1)", index=n + 1)
        out[n] = l
    return ParamSeq(out, "minimal")


def _backward(cs: ChainSeq, N: int, H: int, seed: float) -> np.ndarray:
    top = N + H
    m = seed
    out = np.empty(top)
    out[top - 1] = m
    for n in range(top - 1, 0, -1):
        # (1 - m_n) m_{n+1} = lambda_{n+1}
        m = 1.0 - cs.value(n) / m
        if not -BOUNDARY_TOL <= m < 1.0 or (n > 1 and m <= 0):
            raise NotAChainSequenceError(
                f"{cs.label}: backward parameter m_{n} = {float(m)!r} left [0, 1)", index=n)
        out[n - 1] = max(m, 0.0)
    return out[:N]


def tail_fixed_point(lam: float) -> float:
    """Larger fixed point of m -> 1 - lam/m, or 1 - 1e-12 when there is none."""
    disc = 1.0 - 4.0 * lam
    return 0.5 * (1.0 + math.sqrt(disc)) if disc >= 0 else 1.0 - 1e-12


def maximal_params_approx(cs: ChainSeq, N: int, horizon: int | None = None,
                          seed: float | None = None) -> ParamSeq:
    """Maximal parameters M_1..M_N by backward iteration from index N + horizon.

    The default seed is the larger fixed point of the map m -> 1 - lambda/m at
    the seeding index, which makes the error decay geometrically for chains
    with a limit below 1/4 and removes the slow algebraic approach at 1/4.
    The reported ``tolerance`` is the change when the horizon is doubled.
    """
    H = horizon if horizon is not None else max(N + 20, 400)
    if H < N + 20:
        raise ValueError("horizon must be at least N + 20")
    s = seed if seed is not None else tail_fixed_point(cs.value(N + H))
    vals = _backward(cs, N, H, s)
    s2 = seed if seed is not None else tail_fixed_point(cs.value(N + 2 * H))
    vals2 = _backward(cs, N, 2 * H, s2)
    tol = float(np.max(np.abs(vals - vals2)))
    return ParamSeq(vals, "maximal-approx", {"horizon": H, "seed": s, "tolerance": tol})


def complementary(cs: ChainSeq, N: int) -> ChainSeq:
    """d_{n+1} = (1 - k_n) k_{n+1} with k_1 = 0, k_n = 1 - l_n; values d_2..d_{N+1}."""
    l = minimal_params(cs, N + 1).values
    k = 1.0 - l
    k[0] = 0.0
    return ChainSeq.from_values((1 - k[:-1]) * k[1:], f"complementary({cs.label})")


def complementary_params(cs: ChainSeq, N: int) -> ParamSeq:
    """k_1 = 0, k_n = 1 - l_n: the minimal parameters of the complementary chain."""
    l = minimal_params(cs, N).values
    k = 1.0 - l
    k[0] = 0.0
    return ParamSeq(k, "minimal")


def codilate(cs: ChainSeq, k: int, nu: float, check: int = 200) -> ChainSeq:
    """Scale chain value k (that is lambda_{k+1}) by nu and re-validate.

    The check runs the minimal-parameter iteration over ``check`` values (or the
    full finite length).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not nu > 0:
        raise ValueError("nu must be positive")
    fn = cs.fn

    def dilated(n):
        return nu * fn(n) if n == k else fn(n)

    out = ChainSeq(dilated, f"{cs.label}*nu{k}", cs.length)
    horizon = min(check, cs.length + 1) if cs.length is not None else check
    try:
        minimal_params(out, max(horizon, k + 2) if cs.length is None else horizon)
    except NotAChainSequenceError as e:
        raise NotAChainSequenceError(f"co-dilation nu={nu} at {k} breaks the chain: {e}", index=e.index) from e
    return out


@dataclass(frozen=True)
class WallReport:
    verdict: str  # diverges_likely | converges_likely | inconclusive
    S: list  # (n, S_n) checkpoints; S_n may be inf when the terms overflow
    slope: float
    term_exponent: float
    increment: float


def wall_terms_log(ps: ParamSeq, N: int) -> np.ndarray:
    """log of prod_{j=2..n} m_j / (1 - m_j) for n = 2..N."""
    m = ps.values[1:N]
    if len(m) < N - 1:
        raise ValueError(f"need {N} parameters, have {len(ps)}")
    return np.cumsum(np.log(m) - np.log1p(-m))


def wall_heuristic(ps: ParamSeq, N: int = 100_000) -> WallReport:
    """Evidence on whether sum_{n>=2} prod_{j=2..n} m_j/(1-m_j) diverges.

    Fits log S_n against log n over the last decade: slope > 0.1 reads as
    divergence.  Convergence is claimed when the relative increment is below
    1e-12, or when the slope is flat and the terms decay faster than n^-1.1.
    """
    logt = wall_terms_log(ps, N)
    logS = np.logaddexp.accumulate(logt)
    n = np.arange(2, N + 1)
    tail = n >= max(2, N // 10)
    ln = np.log(n[tail])
    slope = float(np.polyfit(ln, logS[tail], 1)[0])
    term_exp = float(np.polyfit(ln, logt[tail], 1)[0])
    increment = float(np.exp(logt[-1] - logS[-1]))
    if slope > 0.1:
        verdict = "diverges_likely"
    elif increment < 1e-12 or term_exp < -1.1:
        verdict = "converges_likely"
    else:
        verdict = "inconclusive"
    checkpoints = [c for c in (10, 100, 1_000, 10_000, 100_000, 1_000_000) if c <= N]
    if not checkpoints or checkpoints[-1] != N:
        checkpoints.append(N)
    S = [(c, float(np.exp(logS[c - 2])) if logS[c - 2] < 700 else math.inf) for c in checkpoints]
    return WallReport(verdict, S, slope, term_exp, increment)


def wall_first_maximal(ps_min: ParamSeq, N: int) -> float:
    """M_1 = 1 / (1 + L) with L = sum_{n>=2} prod_{j=2..n} l_j/(1-l_j), truncated at N.

    A divergent sum (single parameter sequence) gives M_1 = l_1 = 0.
    """
    logt = wall_terms_log(ps_min, N)
    L = float(np.exp(np.logaddexp.reduce(logt))) if len(logt) else 0.0
    return 1.0 / (1.0 + L) if math.isfinite(L) else 0.0
