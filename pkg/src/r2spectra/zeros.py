"""Zeros: root finding, interlacing, monotonicity and the logarithmic energy."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InfiniteEnergyError, InvariantViolationError, RootFindingError
from .perturbation import PerturbationSpec, perturb_direct, s_k
from .poly import Poly
from .recurrence import RecurrenceFamily, generate_first

MAX_SWEEPS = 200
POLISH_STEPS = 5
STEP_TOL = 1e-14
REAL_TOL = 1e-8
COMMON_TOL = 1e-7
EPS = np.finfo(float).eps


@dataclass(frozen=True)
class RootSet:
    complex_roots: np.ndarray
    real_zeros: np.ndarray
    tol_real: float = REAL_TOL
    sweeps: int = 0

    @property
    def all_real(self) -> bool:
        return len(self.real_zeros) == len(self.complex_roots)

    def min_gap(self) -> float:
        z = self.real_zeros
        return float(np.min(np.diff(z))) if len(z) > 1 else math.inf


def _taylor_at(c: np.ndarray, center: complex) -> np.ndarray:
    """Coefficients of p(center + t) in t, by repeated synthetic division."""
    work = list(c.astype(complex))
    out = []
    while work:
        acc = 0j
        quot = []
        for a in reversed(work):
            acc = acc * center + a
            quot.append(acc)
        out.append(quot.pop())  # remainder is p^(j)(center)/j!
        work = quot[::-1]
    return np.array(out)


def _initial_guesses(c: np.ndarray) -> np.ndarray:
    """Points on a circle around the root centroid.

    The radius is twice the Fujiwara-type bound max |b_{n-j}/b_n|^(1/j) of the
    polynomial re-expanded at the centroid; the angle offset breaks the symmetry
    of real polynomials.
    """
    n = len(c) - 1
    center = -c[n - 1] / (n * c[n])
    b = _taylor_at(c, center)
    ratios = [abs(b[n - j] / b[n]) ** (1.0 / j) for j in range(1, n + 1) if b[n - j] != 0]
    radius = max(max(ratios) if ratios else 1.0, 1e-8 * (1 + abs(center)))
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    return center + radius * np.exp(1j * angles)


def _horner_with_bound(c: np.ndarray, z: complex) -> tuple[complex, complex, float]:
    """p(z), p'(z) and sum |c_j| |z|^j (the rounding scale of p(z))."""
    p = c[-1]
    dp = 0j
    b = abs(c[-1])
    az = abs(z)
    for a in c[-2::-1]:
        dp = dp * z + p
        p = p * z + a
        b = b * az + abs(a)
    return p, dp, b


def all_roots(p: Poly, tol_real: float = REAL_TOL) -> RootSet:
    """All roots by Aberth-Ehrlich simultaneous iteration plus Newton polishing."""
    c = np.asarray(p.coeffs, complex)
    n = len(c) - 1
    if n < 1:
        raise ValueError("need a polynomial of degree >= 1")
    if n == 1:
        z = np.array([-c[0] / c[1]])
        return _classify(z, tol_real, 0)
    z = _initial_guesses(c)
    done = np.zeros(n, bool)
    sweeps = 0
    for sweeps in range(1, MAX_SWEEPS + 1):
        for k in range(n):
            if done[k]:
                continue
            pk, dpk, bound = _horner_with_bound(c, z[k])
            if abs(pk) <= 4 * n * EPS * bound:
                done[k] = True
                continue
            ratio = pk / dpk if dpk != 0 else pk
            diff = z[k] - np.delete(z, k)
            sigma = np.sum(1.0 / diff) if np.all(diff != 0) else 0.0
            step = ratio / (1 - ratio * sigma)
            z[k] -= step
            if abs(step) <= STEP_TOL * (1 + abs(z[k])):
                done[k] = True
        if done.all():
            break
    for k in range(n):
        for _ in range(POLISH_STEPS):
            pk, dpk, bound = _horner_with_bound(c, z[k])
            if dpk == 0 or abs(pk) <= EPS * bound:
                break
            step = pk / dpk
            if not abs(step) < 0.1 * (1 + abs(z[k])):
                break  # Newton is not in its basin near a cluster; keep the Aberth value
            z[k] -= step
    resid = np.array([abs(_horner_with_bound(c, zk)[0]) for zk in z])
    allowed = 1e-8 * (1 + abs(c[-1]) * np.abs(z) ** n)
    if not done.all() and np.any(resid > allowed):
        raise RootFindingError(f"Aberth iteration did not converge in {MAX_SWEEPS} sweeps", residuals=resid)
    if np.any(resid > allowed):
        raise RootFindingError("root residual above certificate bound", residuals=resid)
    return _classify(z, tol_real, sweeps)


def _classify(z: np.ndarray, tol_real: float, sweeps: int) -> RootSet:
    order = np.lexsort((z.imag, z.real))
    z = z[order]
    real = np.sort(z.real[np.abs(z.imag) <= tol_real * (1 + np.abs(z.real))])
    return RootSet(z, real, tol_real, sweeps)


def zeros_of(fam: RecurrenceFamily, spec: PerturbationSpec | None, n: int) -> RootSet:
    """Roots of P_n, perturbed when ``spec`` is given.

    Unperturbed special families must give real simple zeros; anything else is
    reported as an invariant violation.
    """
    if spec is None or not spec.entries:
        P = generate_first(fam, n)[n]
    else:
        P = perturb_direct(fam, spec, n)[0][n]
    rs = all_roots(P)
    if (spec is None or not spec.entries) and fam.special:
        if not rs.all_real:
            raise InvariantViolationError(f"{fam.name}: P_{n} has non-real zeros")
        if rs.min_gap() <= 1e-9:
            raise InvariantViolationError(f"{fam.name}: P_{n} has a repeated zero (gap {rs.min_gap():.3e})")
    return rs


# ------------------------------------------------------------ interlacing

def _reals(x) -> np.ndarray:
    if isinstance(x, RootSet):
        return np.asarray(x.real_zeros, float)
    return np.sort(np.asarray(x, float))


def _match(a: np.ndarray, b: np.ndarray, tol: float) -> tuple[list, np.ndarray, np.ndarray]:
    """Greedy two-pointer matching of pairs within tol."""
    i = j = 0
    common, keep_a, keep_b = [], np.ones(len(a), bool), np.ones(len(b), bool)
    while i < len(a) and j < len(b):
        if abs(a[i] - b[j]) <= tol:
            common.append(0.5 * (a[i] + b[j]))
            keep_a[i] = keep_b[j] = False
            i += 1
            j += 1
        elif a[i] < b[j]:
            i += 1
        else:
            j += 1
    return common, a[keep_a], b[keep_b]


def common_zeros(A, B, tol: float = COMMON_TOL) -> list[float]:
    return _match(_reals(A), _reals(B), tol)[0]


@dataclass(frozen=True)
class InterlacingReport:
    verdict: str  # strict_interlace | interlace_with_common | fails
    common: list
    leading: str | None  # "A" or "B": whose smallest non-common zero comes first
    witness: tuple | None = None


def interlace(A, B, tol: float = COMMON_TOL) -> InterlacingReport:
    """Remove common zeros, then require strict alternation of what is left."""
    a, b = _reals(A), _reals(B)
    common, ra, rb = _match(a, b, tol)
    merged = sorted([(x, "A") for x in ra] + [(x, "B") for x in rb])
    leading = merged[0][1] if merged else None
    for (x1, s1), (x2, s2) in zip(merged, merged[1:]):
        if s1 == s2 or x2 - x1 <= 0:
            return InterlacingReport("fails", common, leading, (x1, x2))
    if abs(len(ra) - len(rb)) > 1:
        return InterlacingReport("fails", common, leading, None)
    verdict = "interlace_with_common" if common else "strict_interlace"
    return InterlacingReport(verdict, common, leading)


# ------------------------------------------------------------ monotonicity

@dataclass(frozen=True)
class MonotonicityReport:
    verdicts: list  # per zero index: increasing | decreasing | constant | mixed
    zeros: np.ndarray  # rows follow the ladder, columns the sorted zeros


def monotonicity(fam: RecurrenceFamily, k: int, mu_list: Sequence, n: int, tol: float = 1e-12
                 ) -> MonotonicityReport:
    """Sorted zeros of P_n along a ladder of co-recursive shifts.

    Each ladder entry is either a scalar mu applied at level k, or a tuple of
    shifts applied at levels k, k+1, ...
    """
    rows = []
    for entry in mu_list:
        mus = entry if isinstance(entry, (tuple, list)) else (entry,)
        spec = PerturbationSpec(tuple((k + i, m, 1.0) for i, m in enumerate(mus)))
        rs = zeros_of(fam, spec, n)
        if not rs.all_real:
            raise InvariantViolationError(f"non-real zeros along the ladder at {entry}")
        rows.append(rs.real_zeros)
    Z = np.array(rows)
    verdicts = []
    for j in range(Z.shape[1]):
        d = np.diff(Z[:, j])
        if np.all(np.abs(d) <= tol):
            verdicts.append("constant")
        elif np.all(d > tol):
            verdicts.append("increasing")
        elif np.all(d < -tol):
            verdicts.append("decreasing")
        else:
            verdicts.append("mixed")
    return MonotonicityReport(verdicts, Z)


# ----------------------------------------------------------------- energy

def electrostatic_energy(xs: Sequence[float], zeta_m: float, theta: float) -> float:
    """E = -sum_{j<i} ln|x_i - x_j| + (zeta_m/2) sum ln(x_j^2 + 1) - theta sum arctan x_j."""
    x = np.asarray(xs, float)
    diffs = np.abs(x[:, None] - x[None, :])[np.triu_indices(len(x), 1)]
    if np.any(diffs == 0):
        raise InfiniteEnergyError("coincident charges")
    return float(-np.sum(np.log(diffs)) + 0.5 * zeta_m * np.sum(np.log1p(x * x)) - theta * np.sum(np.arctan(x)))


def energy_gradient(xs: Sequence[float], zeta_m: float, theta: float) -> np.ndarray:
    x = np.asarray(xs, float)
    d = x[:, None] - x[None, :]
    np.fill_diagonal(d, np.inf)
    return -np.sum(1.0 / d, axis=1) + zeta_m * x / (1 + x * x) - theta / (1 + x * x)


def stationary_parameters(xs: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares (zeta_m, theta) making xs a critical point of E, and the
    relative gradient residual at that fit."""
    x = np.asarray(xs, float)
    d = x[:, None] - x[None, :]
    np.fill_diagonal(d, np.inf)
    rep = np.sum(1.0 / d, axis=1)
    A = np.column_stack([x / (1 + x * x), -1 / (1 + x * x)])
    sol, *_ = np.linalg.lstsq(A, rep, rcond=None)
    resid = float(np.linalg.norm(A @ sol - rep) / max(np.linalg.norm(rep), 1e-300))
    return float(sol[0]), float(sol[1]), resid


# ----------------------------------------------------------- observations

@dataclass(frozen=True)
class ObservationReport:
    holds: bool
    checked: int
    failures: list = field(default_factory=list)
    skipped: str | None = None


def _adjacent_runs(first: np.ndarray, other: np.ndarray):
    """Pairs of consecutive zeros of `first` with no zero of `other` strictly between."""
    for x1, x2 in zip(first, first[1:]):
        if not np.any((other > x1) & (other < x2)):
            yield x1, x2


def observation_codilation(fam: RecurrenceFamily, k: int, nu: float, n: int) -> ObservationReport:
    """Co-dilation at level k with 0 < nu < 1, read on the merged zero order:
    two zeros of P_n(nu) with no zero of P_n between them enclose a zero of P_s,
    and two zeros of P_n with no zero of P_n(nu) between them enclose a zero of
    P_{s-1} (s the recurrence step of level k).  Zeros shared by P_n and
    P_n(nu) are set aside first."""
    s = fam.level_to_step(k)
    P = generate_first(fam, n)
    pert = all_roots(perturb_direct(fam, PerturbationSpec.single(k, 0.0, nu), n)[0][n])
    base, zk = all_roots(P[n]), all_roots(P[s]) if s >= 1 else None
    zk1 = all_roots(P[s - 1]) if s >= 2 else None
    if not (pert.all_real and base.all_real):
        return ObservationReport(False, 0, skipped="non-real zeros")
    # shared zeros belong to both orderings, so adjacency is read on the rest
    _, pz, bz = _match(pert.real_zeros, base.real_zeros, COMMON_TOL)
    failures, checked = [], 0
    xk = zk.real_zeros if zk is not None else np.array([])
    xk1 = zk1.real_zeros if zk1 is not None else np.array([])
    for x1, x2 in _adjacent_runs(pz, bz):
        checked += 1
        if not np.any((xk > x1) & (xk < x2)):
            failures.append(("P_k", x1, x2))
    for x1, x2 in _adjacent_runs(bz, pz):
        checked += 1
        if not np.any((xk1 > x1) & (xk1 < x2)):
            failures.append(("P_k-1", x1, x2))
    return ObservationReport(not failures, checked, failures)


def observation_s_k(fam: RecurrenceFamily, k: int, mu: float, nu: float) -> ObservationReport:
    """Interlacing of the zeros of S_k with those of P_k and P_{k-1}.

    With c = (nu - 1)/mu > 0, on (x_{k,1}, inf) each interval (x_{k-1,j}, x_{k,j+1})
    should hold exactly one zero of S_k; with c < 0, on (-inf, x_{k,k}) each
    interval (x_{k,j}, x_{k-1,j}) should.  Cases where S_k has non-real zeros are
    skipped.
    """
    if mu == 0 or nu == 1:
        raise ValueError("need mu != 0 and nu != 1")
    s = fam.level_to_step(k)
    if s < 2:
        raise ValueError("need at least two zeros of P_{k-1}")
    P = generate_first(fam, s)
    S = all_roots(s_k(fam, k, mu, nu))
    if not S.all_real:
        return ObservationReport(False, 0, skipped="S_k has non-real zeros")
    xk, xk1, y = all_roots(P[s]).real_zeros, all_roots(P[s - 1]).real_zeros, S.real_zeros
    c = (nu - 1) / mu
    if c > 0:
        y = y[y > xk[0]]
        intervals = [(xk1[j], xk[j + 1]) for j in range(s - 1)]
    else:
        y = y[y < xk[-1]]
        intervals = [(xk[j], xk1[j]) for j in range(s - 1)]
    failures = []
    for lo, hi in intervals:
        cnt = int(np.sum((y > lo) & (y < hi)))
        if cnt != 1:
            failures.append((lo, hi, cnt))
    if sum(int(np.sum((y > lo) & (y < hi))) for lo, hi in intervals) != len(y):
        failures.append(("stray zeros", len(y)))
    return ObservationReport(not failures, len(intervals), failures)
