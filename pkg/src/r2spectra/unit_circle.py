"""From R_II recurrences on the line to orthogonal polynomials on the unit circle.

Sequences follow the shifted indexing: c_n (n >= 1) is the coefficient used to
build P_n from P_{n-1}, and the chain sequence is {lambda_{n+1}}_{n >= 1}.  For a
family in either convention, c_n = ``fam.c_step(n-1)`` and lambda_{n+1} =
``fam.lam_step(n)``.  Verblunsky arrays are 0-based: ``alpha[m]`` is alpha_m, so
the value usually written alpha_{n-1} sits at ``alpha[n-1]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .chain import ChainSeq, ParamSeq, minimal_params
from .errors import IdentityViolationError, InvalidFamilyError, InvalidVerblunskyError
from .poly import Poly
from .recurrence import RecurrenceFamily, generate_first

CoefSeq = Callable[[int], float] | Sequence[float] | np.ndarray


def _cfun(c: CoefSeq) -> Callable[[int], float]:
    """Callable n -> c_n (n >= 1); arrays are read as c[n-1] = c_n."""
    if callable(c):
        return c
    arr = np.asarray(c, dtype=float)
    return lambda n: float(arr[n - 1])


# ----------------------------------------------------------- Cayley maps

def xi_of_x(x):
    """xi = (x + i)/(x - i): real line to unit circle."""
    x = np.asarray(x, dtype=complex)
    return (x + 1j) / (x - 1j)


def x_of_xi(xi):
    """x = i (xi + 1)/(xi - 1): unit circle minus {1} to real line."""
    xi = np.asarray(xi, dtype=complex)
    return 1j * (xi + 1) / (xi - 1)


# --------------------------------------------------------------- tau / alpha

def tau_seq(c: CoefSeq, N: int) -> np.ndarray:
    """tau_0..tau_N with tau_0 = 1, tau_n = tau_{n-1} (1 - i c_n)/(1 + i c_n)."""
    cf = _cfun(c)
    out = np.empty(N + 1, complex)
    out[0] = 1.0
    for n in range(1, N + 1):
        cn = cf(n)
        out[n] = out[n - 1] * (1 - 1j * cn) / (1 + 1j * cn)
    return out


def _from_params(m: ParamSeq, c: CoefSeq, N: int) -> np.ndarray:
    cf = _cfun(c)
    if len(m) < N + 1:
        raise ValueError(f"need parameters up to index {N + 1}, have {len(m)}")
    tau = tau_seq(cf, N)
    out = np.empty(N, complex)
    for n in range(1, N + 1):
        c1 = cf(n + 1)
        out[n - 1] = -(1 - 2 * m[n + 1] - 1j * c1) / ((1 - 1j * c1) * tau[n])
    return out


def alpha_from(l: ParamSeq, c: CoefSeq, N: int) -> np.ndarray:
    """alpha_{n-1} = -(1/tau_n) (1 - 2 l_{n+1} - i c_{n+1})/(1 - i c_{n+1}), n = 1..N."""
    return _from_params(l, c, N)


def beta_complementary(l: ParamSeq, c: CoefSeq, N: int) -> np.ndarray:
    """The same map applied to k_1 = 0, k_n = 1 - l_n."""
    k = 1.0 - l.values
    k[0] = 0.0
    return _from_params(ParamSeq(k, "minimal"), c, N)


def family_inputs(fam: RecurrenceFamily, N: int) -> tuple[Callable[[int], float], ParamSeq]:
    """(c, l) in shifted indexing, with l_1..l_{N+1}."""
    if not fam.special:
        raise InvalidFamilyError(f"{fam.name}: the unit-circle map needs a = -i, b = i and real c")
    c = lambda n: float(np.real(fam.c_step(n - 1)))
    return c, minimal_params(ChainSeq.from_family(fam), N + 1)


@dataclass(frozen=True)
class VerblunskyData:
    alpha: np.ndarray  # alpha[m] = alpha_m
    tau: np.ndarray  # tau[n] = tau_n

    @classmethod
    def from_family(cls, fam: RecurrenceFamily, N: int) -> "VerblunskyData":
        c, l = family_inputs(fam, N)
        return cls(alpha_from(l, c, N), tau_seq(c, N))

    def check(self, slack: float = 1e-12) -> None:
        if np.any(np.abs(np.abs(self.tau) - 1) > slack):
            raise InvalidVerblunskyError("tau is not unimodular")
        if np.any(np.abs(self.alpha) >= 1 + slack):
            raise InvalidVerblunskyError("alpha outside the unit disc")


def gamma_from(fam: RecurrenceFamily, pert_fam: RecurrenceFamily, k: int, N: int
               ) -> tuple[np.ndarray, np.ndarray]:
    """Verblunsky coefficients of a family perturbed at one coefficient.

    ``pert_fam`` may differ from ``fam`` only in c and lambda at recurrence step k
    (shifted indices c_{k+1}, lambda_{k+1}).  Returns (gamma[0..N-1], eta[0..N])
    where eta_n = tau_n for n <= k and eta_n = r tau_n beyond, with
    r = ((1 - i a_{k+1})/(1 + i a_{k+1})) ((1 + i c_{k+1})/(1 - i c_{k+1})).
    gamma is expressed through the unperturbed alpha:

        gamma_{n-1} = (tau_n/eta_n) ((1 - i c_{n+1})/(1 - i a_{n+1}))
                      [alpha_{n-1} - (1/tau_n) (2(l_{n+1} - l'_{n+1}) + i(c_{n+1} - a_{n+1}))/(1 - i c_{n+1})]
    """
    c, l = family_inputs(fam, N)
    a, lp = family_inputs(pert_fam, N)
    for n in range(1, N + 2):
        if n != k + 1 and a(n) != c(n):
            raise ValueError(f"families differ in c at index {n}, expected only {k + 1}")
    tau = tau_seq(c, N)
    alpha = alpha_from(l, c, N)
    ak, ck = a(k + 1), c(k + 1)
    r = (1 - 1j * ak) / (1 + 1j * ak) * (1 + 1j * ck) / (1 - 1j * ck)
    eta = tau.copy()
    eta[k + 1:] *= r
    gamma = np.empty(N, complex)
    for n in range(1, N + 1):
        c1, a1 = c(n + 1), a(n + 1)
        corr = (2 * (l[n + 1] - lp[n + 1]) + 1j * (c1 - a1)) / (1 - 1j * c1) / tau[n]
        gamma[n - 1] = (tau[n] / eta[n]) * (1 - 1j * c1) / (1 - 1j * a1) * (alpha[n - 1] - corr)
    return gamma, eta


# ------------------------------------------------------------------ Szego

def szego(alpha: Sequence[complex], N: int) -> list[Poly]:
    """Monic phi_0..phi_N from phi_{n+1} = z phi_n - conj(alpha_n) phi_n^*."""
    alpha = np.asarray(alpha, dtype=complex)
    if len(alpha) < N:
        raise ValueError(f"need {N} Verblunsky coefficients, have {len(alpha)}")
    if np.any(np.abs(alpha[:N]) >= 1):
        bad = int(np.argmax(np.abs(alpha[:N]) >= 1))
        raise InvalidVerblunskyError(f"|alpha_{bad}| = {abs(alpha[bad]):.6g} is not < 1")
    phis = [Poly([1.0])]
    for n in range(N):
        p = phis[-1]
        phis.append(p.shift(1) - np.conj(alpha[n]) * p.reversed(n))
    return phis


def paraorthogonal(phi: Poly, tau: complex, n: int | None = None) -> Poly:
    """rho = z phi_{n-1} - tau phi_{n-1}^*, with phi of degree n-1."""
    if abs(abs(tau) - 1) > 1e-12:
        raise InvalidVerblunskyError("tau must be unimodular")
    deg = phi.degree if n is None else n - 1
    return phi.shift(1) - tau * phi.reversed(deg)


# --------------------------------------------------- P_n -> r_n -> phi_{n-1}

COND_LIMIT = 1e8
RESIDUAL_TOL = 1e-9


def _interp_nodes(n: int, rotation: float = 0.0) -> np.ndarray:
    # (n+1)-st roots of -1, optionally rotated; never equal to 1 for rotation in [0, pi/(n+1))
    j = np.arange(n + 1)
    return np.exp(1j * (np.pi * (2 * j + 1) / (n + 1) + rotation))


def _r_values(P: Poly, n: int, xi: np.ndarray) -> np.ndarray:
    # 2^n P(x)/(x - i)^n with x - i = 2i/(xi - 1)
    return P(x_of_xi(xi)) * ((xi - 1) / 1j) ** n


def r_from_p(P: Poly, n: int) -> Poly:
    """r_n(xi) = 2^n P_n(x)/(x - i)^n as a polynomial in xi, by interpolation."""
    if n == 0:
        return Poly([complex(P(0.0))])
    for rotation in (0.0, np.pi / (4 * (n + 1))):
        nodes = _interp_nodes(n, rotation)
        V = np.vander(nodes, n + 1, increasing=True)
        if np.linalg.cond(V) > COND_LIMIT:
            continue
        coeffs = np.linalg.solve(V, _r_values(P, n, nodes))
        r = Poly(coeffs)
        check = _interp_nodes(n, np.pi / (2 * (n + 1)))  # midway between the nodes
        ref = _r_values(P, n, check)
        resid = np.max(np.abs(r(check) - ref)) / max(1.0, np.max(np.abs(ref)))
        if resid > RESIDUAL_TOL:
            raise IdentityViolationError(f"r_{n} interpolation residual {resid:.3e}")
        return r
    raise IdentityViolationError(f"r_{n}: interpolation system ill-conditioned at every node set")


def phi_from_p(P_seq, l: ParamSeq, c: CoefSeq, n: int) -> Poly:
    """phi_{n-1} = (r_n - 2(1 - l_n) r_{n-1}) / ((xi - 1) prod_{j=1..n} (1 + i c_j))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cf = _cfun(c)
    num = r_from_p(P_seq[n], n) - 2 * (1 - l[n]) * r_from_p(P_seq[n - 1], n - 1)
    q, rem = num.deflate(1.0)
    if abs(rem) > RESIDUAL_TOL * max(1.0, num.norm()):
        raise IdentityViolationError(f"phi_{n - 1}: remainder {abs(rem):.3e} on division by (xi - 1); "
                                     "l or c inconsistent with the sequence")
    scale = np.prod([1 + 1j * cf(j) for j in range(1, n + 1)])
    return q / complex(scale)


def phi_from_family(fam: RecurrenceFamily, n: int) -> Poly:
    c, l = family_inputs(fam, n)
    return phi_from_p(generate_first(fam, n), l, c, n)
