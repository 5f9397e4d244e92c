"""Co-recursive, co-dilated and co-modified R_II sequences.

A perturbation at level k replaces c_k by c_k + mu and lambda_k by nu * lambda_k.
Three independent constructions are provided and are expected to agree:

* ``perturb_direct`` reruns the recurrence with the modified coefficients;
* ``perturb_via_sk`` writes the perturbed polynomial as P_n - S_k P^{(k+1)}_{n-k-1};
* ``perturb_via_nk`` applies the 2x2 polynomial matrix N_k to (P_{n}, -Q_{n}) and
  divides out the scalar factor K_k = prod_{j=1..k} lambda_j (x-a_j)(x-b_j).

Levels are given in the family's own index convention and converted to
recurrence steps internally (see ``RecurrenceFamily.level_to_step``).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateGridError, IdentityViolationError
from .exact import DyadicPoly
from .poly import Poly, coeff_distance
from .recurrence import (
    PolySequence,
    RecurrenceFamily,
    chebyshev_grid,
    generate_associated,
    generate_first,
    generate_second,
    run_recurrence,
)

DIVISION_TOL = 1e-8


@dataclass(frozen=True)
class PerturbationSpec:
    """Ordered (level, mu, nu) entries with strictly increasing levels."""

    entries: tuple[tuple[int, float, float], ...]

    def __post_init__(self):
        ents = tuple((int(k), float(mu), float(nu)) for k, mu, nu in self.entries)
        for k, _, nu in ents:
            if k < 0:
                raise ValueError(f"level must be >= 0, got {k}")
            if not nu > 0:
                raise ValueError(f"dilation nu must be positive, got {nu} at level {k}")
        levels = [k for k, _, _ in ents]
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError(f"levels must be strictly increasing, got {levels}")
        object.__setattr__(self, "entries", ents)

    @classmethod
    def single(cls, k: int, mu: float = 0.0, nu: float = 1.0) -> "PerturbationSpec":
        return cls(((k, mu, nu),))

    @classmethod
    def from_dict(cls, d: dict) -> "PerturbationSpec":
        ents = [(e["k"], e.get("mu", 0.0), e.get("nu", 1.0)) for e in d["entries"]]
        return cls(tuple(sorted(ents)))

    @classmethod
    def load(cls, path: str | Path) -> "PerturbationSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {"entries": [{"k": k, "mu": mu, "nu": nu} for k, mu, nu in self.entries]}

    def steps(self, fam: RecurrenceFamily) -> dict[int, tuple[float, float]]:
        return {fam.level_to_step(k): (mu, nu) for k, mu, nu in self.entries}

    def __str__(self):
        return ";".join(f"k={k},mu={mu:g},nu={nu:g}" for k, mu, nu in self.entries)


def _coerce_spec(spec) -> PerturbationSpec:
    if isinstance(spec, PerturbationSpec):
        return spec
    return PerturbationSpec(tuple(spec))


# ------------------------------------------------------------ direct route

def perturb_direct(fam: RecurrenceFamily, spec, N: int) -> tuple[PolySequence, PolySequence]:
    """Perturbed first- and second-kind sequences up to degree N."""
    spec = _coerce_spec(spec)
    changes = spec.steps(fam)
    if any(s >= N for s in changes):
        raise ValueError(f"perturbation levels {[k for k, _, _ in spec.entries]} must be below N={N}")
    generate_first(fam, N)  # validates the unperturbed family and the size cap
    P = run_recurrence(fam, 0, Poly(), Poly([1.0]), N, changes)
    Q = [Poly()] + run_recurrence(fam, 1, Poly(), Poly([1.0]), N - 1, changes)
    kind = f"perturbed({spec})"
    return PolySequence(tuple(P), kind, fam.name), PolySequence(tuple(Q), kind, fam.name)


# -------------------------------------------------------- structural route

def _lam_q(fam: RecurrenceFamily, s: int) -> Poly:
    return fam.checked_lam_step(s) * fam.q_step(s)


def lam_q_product(fam: RecurrenceFamily, lo: int, hi: int) -> Poly:
    """prod_{s=lo..hi} lambda_s (x-a_s)(x-b_s) over steps; 1 when the range is empty."""
    out = Poly([1.0])
    for s in range(lo, hi + 1):
        out = out * _lam_q(fam, s)
    return out


def _pair(seq, s):
    """(y_s, y_{s-1}) with y_{-1} = 0."""
    return seq[s], (seq[s - 1] if s >= 1 else Poly())


def s_k(fam: RecurrenceFamily, k: int, mu: float, nu: float) -> Poly:
    """S_k = mu P_k + (nu - 1) lambda_k (x-a_k)(x-b_k) P_{k-1}."""
    s = fam.level_to_step(k)
    P = generate_first(fam, s)
    cur, prev = _pair(P, s)
    out = mu * cur
    if nu != 1 and not prev.is_zero():
        out = out + (nu - 1) * (_lam_q(fam, s) * prev)
    return out


def s_hat_k(fam: RecurrenceFamily, k: int, mu: float, nu: float) -> Poly:
    """S^_k = -mu Q_k - (nu - 1) lambda_k (x-a_k)(x-b_k) Q_{k-1}, with Q_{-1} = 0."""
    s = fam.level_to_step(k)
    if s == 0:
        return Poly()
    Q = generate_second(fam, max(s, 1))
    cur, prev = _pair(Q, s)
    out = -mu * cur
    if nu != 1 and not prev.is_zero():
        out = out - (nu - 1) * (_lam_q(fam, s) * prev)
    return out


def perturb_via_sk(fam: RecurrenceFamily, k: int, mu: float, nu: float, N: int) -> PolySequence:
    """P_n(x; mu, nu) = P_n - S_k P^{(k+1)}_{n-k-1} for n > k, and P_n otherwise."""
    s = fam.level_to_step(k)
    P = generate_first(fam, N)
    S = s_k(fam, k, mu, nu)
    items = list(P.items)
    if s + 1 <= N:
        assoc = generate_associated(fam, s + 1, N - s - 1)
        for n in range(s + 1, N + 1):
            items[n] = P[n] - S * assoc[n - s - 1]
    return PolySequence(tuple(items), f"perturbed(k={k},mu={mu:g},nu={nu:g})", fam.name)


# ------------------------------------------------------ Casoratti identities

def casoratti(u_n: Poly, u_n1: Poly, v_n: Poly, v_n1: Poly) -> Poly:
    """D(u, v) = u_n v_{n+1} - u_{n+1} v_n."""
    return u_n * v_n1 - u_n1 * v_n


@dataclass(frozen=True)
class IdentityReport:
    name: str
    lhs: tuple
    rhs: tuple
    max_rel_residual: float

    @property
    def ok(self) -> bool:
        return self.max_rel_residual <= 1e-9


def _rel(p: Poly, q: Poly) -> float:
    return coeff_distance(p, q) / max(p.norm(), q.norm(), 1.0)


def casoratti_perturbed(fam: RecurrenceFamily, k: int, mu: float, N: int) -> IdentityReport:
    """D(P_n, P_n(mu)) against -mu prod_{j=k+1..n} lambda_j q_j P_k^2 for k <= n < N."""
    s = fam.level_to_step(k)
    P = generate_first(fam, N)
    Pm, _ = perturb_direct(fam, PerturbationSpec.single(k, mu, 1.0), N)
    lhs, rhs = [], []
    for n in range(s, N):
        lhs.append(casoratti(P[n], P[n + 1], Pm[n], Pm[n + 1]))
        rhs.append(-mu * lam_q_product(fam, s + 1, n) * P[s] ** 2)
    worst = max((_rel(a, b) for a, b in zip(lhs, rhs)), default=0.0)
    return IdentityReport("casoratti_perturbed", tuple(lhs), tuple(rhs), worst)


# ---------------------------------------------------- transfer matrices

@dataclass(frozen=True)
class TransferMatrix2:
    p11: Poly
    p12: Poly
    p21: Poly
    p22: Poly

    @classmethod
    def identity(cls, scale: Poly | None = None) -> "TransferMatrix2":
        one = scale if scale is not None else Poly([1.0])
        return cls(one, Poly(), Poly(), one)

    def det(self) -> Poly:
        return self.p11 * self.p22 - self.p12 * self.p21

    def __matmul__(self, o: "TransferMatrix2") -> "TransferMatrix2":
        return TransferMatrix2(
            self.p11 * o.p11 + self.p12 * o.p21,
            self.p11 * o.p12 + self.p12 * o.p22,
            self.p21 * o.p11 + self.p22 * o.p21,
            self.p21 * o.p12 + self.p22 * o.p22,
        )

    def apply(self, v: tuple[Poly, Poly]) -> tuple[Poly, Poly]:
        return self.p11 * v[0] + self.p12 * v[1], self.p21 * v[0] + self.p22 * v[1]

    def at(self, x) -> np.ndarray:
        """Numeric values, shape (..., 2, 2)."""
        x = np.asarray(x, dtype=complex)
        out = np.empty(x.shape + (2, 2), complex)
        out[..., 0, 0] = self.p11(x)
        out[..., 0, 1] = self.p12(x)
        out[..., 1, 0] = self.p21(x)
        out[..., 1, 1] = self.p22(x)
        return out

    def entries(self) -> tuple[Poly, Poly, Poly, Poly]:
        return self.p11, self.p12, self.p21, self.p22


def transfer_T(fam: RecurrenceFamily, n: int) -> TransferMatrix2:
    """[[x - c_n, -lambda_n (x-a_n)(x-b_n)], [1, 0]] at level n."""
    return transfer_T_pert(fam, n, 0.0, 1.0)


def transfer_T_pert(fam: RecurrenceFamily, k: int, mu: float, nu: float) -> TransferMatrix2:
    s = fam.level_to_step(k)
    lq = fam.lam_step(s) * fam.q_step(s)
    return TransferMatrix2(Poly([-(fam.c_step(s) + mu), 1.0]), -nu * lq, Poly([1.0]), Poly())


def kappa(fam: RecurrenceFamily, k: int) -> Poly:
    """K_k = prod_{j=1..k} lambda_j (x-a_j)(x-b_j) over steps; 1 at step 0."""
    return lam_q_product(fam, 1, fam.level_to_step(k))


# The N_k construction is written once over a coefficient "lift" so that it can
# run either in doubles (lift=Poly) or exactly (lift=DyadicPoly.from_values).

def _lam_q_lift(fam: RecurrenceFamily, s: int, lift):
    return lift([fam.checked_lam_step(s)]) * lift(fam.q_step(s).coeffs)


def _sequence_lift(fam: RecurrenceFamily, first: int, count: int, lift):
    zero, one = lift([]), lift([1.0])
    prev, cur, out = zero, one, [one]
    for n in range(first, first + count):
        nxt = lift([-fam.c_step(n), 1.0]) * cur
        if not prev.is_zero():
            nxt = nxt - _lam_q_lift(fam, n, lift) * prev
        prev, cur = cur, nxt
        out.append(cur)
    return out


def _nk_lift(fam: RecurrenceFamily, s: int, mu: float, nu: float, lift):
    """(N11, N12, N21, N22, K) at step s.

    The shift and dilation enter as differences of the stored doubles
    fl(c+mu) - c and fl(nu*lambda) - lambda, so the exact route sees precisely
    the coefficients that the perturbed recurrence runs with.
    """
    P = _sequence_lift(fam, 0, s, lift)
    Q = [lift([])] + _sequence_lift(fam, 1, max(s - 1, 0), lift)
    zero = lift([])
    P_s, P_prev = P[s], (P[s - 1] if s >= 1 else zero)
    Q_s, Q_prev = Q[s], (Q[s - 1] if s >= 1 else zero)
    c = fam.c_step(s)
    dmu = lift([c + mu]) - lift([c])
    S = dmu * P_s
    Sh = zero if s == 0 else -(dmu * Q_s)
    if nu != 1 and s >= 1:
        lam = fam.checked_lam_step(s)
        dlam = (lift([nu * lam]) - lift([lam])) * lift(fam.q_step(s).coeffs)
        S = S + dlam * P_prev
        Sh = Sh - dlam * Q_prev
    K = lift([1.0])
    for j in range(1, s + 1):
        K = K * _lam_q_lift(fam, j, lift)
    return K + S * Q_s, S * P_s, Q_s * Sh, Sh * P_s + K, K


def n_k_matrix(fam: RecurrenceFamily, k: int, mu: float, nu: float) -> TransferMatrix2:
    """[[K + S_k Q_k, S_k P_k], [Q_k S^_k, S^_k P_k + K]], formed exactly and rounded once."""
    parts = _nk_lift(fam, fam.level_to_step(k), mu, nu, DyadicPoly.from_values)
    return TransferMatrix2(*(p.to_poly() for p in parts[:4]))


def _abs_scale(a: Poly, b: Poly) -> float:
    """Largest coefficient of |a| * |b|: the magnitude at which a*b is rounded."""
    if a.is_zero() or b.is_zero():
        return 0.0
    return float(np.convolve(np.abs(a.coeffs), np.abs(b.coeffs)).max())


def _float_div(p: Poly, factors: list[tuple[float, complex, complex]], scale: float, what: str) -> Poly:
    """Divide p by prod lam (x-a)(x-b) one linear factor at a time and certify
    the quotient through the residual p - K q."""
    q, K = p, Poly([1.0])
    for lam, a, b in factors:
        q = q.deflate_stable(a).deflate_stable(b) / lam
        K = K * Poly([lam * a * b, -lam * (a + b), lam])
    resid = coeff_distance(p, K * q)
    if resid > DIVISION_TOL * max(scale, p.norm(), 1.0):
        raise IdentityViolationError(f"{what}: residual {resid:.3e} after division by the scalar factor")
    return q


def _kappa_factors(fam: RecurrenceFamily, s: int) -> list[tuple[float, complex, complex]]:
    out = []
    for j in range(1, s + 1):
        jj = j + fam.start_offset
        out.append((fam.checked_lam_step(j), complex(fam.a(jj)), complex(fam.b(jj))))
    return out


def perturb_via_nk(fam: RecurrenceFamily, spec, N: int, arithmetic: str = "exact"
                   ) -> tuple[PolySequence, PolySequence]:
    """Perturbed (P, Q) through the N_k transfer-matrix identity.

    Entries are composed by building each N_j on the family that already carries
    the lower-level entries; the product is applied highest level first and the
    accumulated scalar factor is removed by polynomial division whose remainder
    certifies the identity.

    ``arithmetic="exact"`` carries the whole product in Gaussian dyadic
    arithmetic on the double inputs and demands a zero remainder.  The matrix
    product cancels many orders of magnitude when the lambdas are small (CRR
    families lose all digits near k=10), so ``"float"`` is kept only to expose
    that loss; it certifies with a residual tolerance instead.
    """
    if arithmetic not in ("exact", "float"):
        raise ValueError("arithmetic must be 'exact' or 'float'")
    spec = _coerce_spec(spec)
    exact = arithmetic == "exact"
    lift = DyadicPoly.from_values if exact else Poly
    generate_first(fam, N)  # family validation and size cap
    P = _sequence_lift(fam, 0, N, lift)
    Q = [lift([])] + _sequence_lift(fam, 1, max(N - 1, 0), lift)
    stages = []
    cur = fam
    for k, mu, nu in spec.entries:
        s = fam.level_to_step(k)
        if s >= N:
            raise ValueError(f"perturbation level {k} must be below N={N}")
        n11, n12, n21, n22, K = _nk_lift(cur, s, mu, nu, lift)
        stages.append((s, (n11, n12, n21, n22), K, _kappa_factors(cur, s)))
        cur = cur.modified({s: (mu, nu)})
    one, zero = lift([1.0]), lift([])
    outP, outQ = [], []
    for m in range(N + 1):
        M = (one, zero, zero, one)
        K, factors = one, []
        for s, Nj, Kj, fj in stages:
            if s <= m:
                a11, a12, a21, a22 = Nj
                b11, b12, b21, b22 = M
                M = (a11 * b11 + a12 * b21, a11 * b12 + a12 * b22,
                     a21 * b11 + a22 * b21, a21 * b12 + a22 * b22)
                K, factors = K * Kj, factors + fj
        top = M[0] * P[m] - M[1] * Q[m]
        bot = M[2] * P[m] - M[3] * Q[m]
        if exact:
            qt, ok_t = top.divexact(K)
            qb, ok_b = bot.divexact(K)
            if not (ok_t and ok_b):
                raise IdentityViolationError(f"index {m}: nonzero remainder after exact division by the scalar factor")
            outP.append(qt.to_poly())
            outQ.append(-qb.to_poly())
        else:
            st = max(_abs_scale(M[0], P[m]), _abs_scale(M[1], Q[m]))
            sb = max(_abs_scale(M[2], P[m]), _abs_scale(M[3], Q[m]))
            outP.append(_float_div(top, factors, st, f"P_{m}"))
            outQ.append(-_float_div(bot, factors, sb, f"Q_{m}"))
    kind = f"perturbed({spec})"
    return PolySequence(tuple(outP), kind, fam.name), PolySequence(tuple(outQ), kind, fam.name)


@dataclass(frozen=True)
class RelationReport:
    max_abs_residual: float
    max_rel_residual: float
    nodes_used: int
    nodes_skipped: int

    @property
    def ok(self) -> bool:
        return self.max_rel_residual <= 1e-9


def relate_two_perturbations(fam: RecurrenceFamily, k: int, m: int, specs, N: int,
                             grid: np.ndarray | None = None) -> RelationReport:
    """Check prod_{j=m+1..k} lambda_j q_j v_k = N_k N_m^{-1} v_m pointwise.

    ``specs = ((mu_k, nu_k), (mu_m, nu_m))``; v_j is (P_{n+1}, -Q_{n+1}) perturbed
    at level j alone.  N_m is inverted numerically at each grid node; nodes where
    it is singular are skipped.
    """
    if not m < k:
        raise ValueError("need m < k")
    (mu_k, nu_k), (mu_m, nu_m) = specs
    sk, sm = fam.level_to_step(k), fam.level_to_step(m)
    if grid is None:
        grid = chebyshev_grid(21, -5.0, 5.0)
    Nk = n_k_matrix(fam, k, mu_k, nu_k).at(grid)
    Nm = n_k_matrix(fam, m, mu_m, nu_m).at(grid)
    det = Nm[:, 0, 0] * Nm[:, 1, 1] - Nm[:, 0, 1] * Nm[:, 1, 0]
    scale = np.abs(Nm).reshape(len(grid), -1).max(axis=1) ** 2
    good = np.abs(det) > 1e-12 * np.maximum(scale, 1.0)
    if not good.any():
        raise DegenerateGridError("N_m is singular at every grid node")
    inv = np.empty_like(Nm)
    inv[:, 0, 0], inv[:, 1, 1] = Nm[:, 1, 1], Nm[:, 0, 0]
    inv[:, 0, 1], inv[:, 1, 0] = -Nm[:, 0, 1], -Nm[:, 1, 0]
    inv[good] /= det[good][:, None, None]
    R = np.einsum("gij,gjk->gik", Nk, inv)
    factor = lam_q_product(fam, sm + 1, sk)(grid)
    Pk, Qk = perturb_direct(fam, PerturbationSpec.single(k, mu_k, nu_k), N)
    Pm, Qm = perturb_direct(fam, PerturbationSpec.single(m, mu_m, nu_m), N)
    worst_abs = worst_rel = 0.0
    for n1 in range(sk, N + 1):
        vk = np.stack([Pk[n1](grid), -Qk[n1](grid)], axis=-1)
        vm = np.stack([Pm[n1](grid), -Qm[n1](grid)], axis=-1)
        lhs = factor[:, None] * vk
        rhs = np.einsum("gij,gj->gi", R, vm)
        # round-off in R v_m scales with |R| |v_m|, which can far exceed |lhs|
        terms = np.einsum("gij,gj->gi", np.abs(R), np.abs(vm))
        err = np.abs(lhs - rhs)[good]
        worst_abs = max(worst_abs, float(err.max()))
        denom = np.maximum.reduce([np.ones_like(err), np.abs(lhs[good]), terms[good]])
        worst_rel = max(worst_rel, float((err / denom).max()))
    return RelationReport(worst_abs, worst_rel, int(good.sum()), int((~good).sum()))
