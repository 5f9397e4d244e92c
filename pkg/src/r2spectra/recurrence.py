"""R_II three-term recurrences.

    P_{n+1}(x) = (x - c_n) P_n(x) - lambda_n (x - a_n)(x - b_n) P_{n-1}(x)

A family carries its coefficient sequences and an index convention.  With
``start_offset=0`` the coefficient used at recurrence step n (the step that
produces P_{n+1}) is the one with index n; with ``start_offset=1`` it is
index n+1, so that P_1 = x - c_1 and lambda_2 is the first active lambda.
Internally every routine works in *steps*; ``step = level - start_offset``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidFamilyError, SizeCapError
from .poly import Poly

DEGREE_CAP = 64
PENCIL_CAP = 12

Coef = Callable[[int], complex]


def _const(v) -> Coef:
    return lambda n: v


def _from_list(values: Sequence, name: str) -> Coef:
    vals = list(values)

    def f(n):
        if n < 0 or n >= len(vals):
            raise InvalidFamilyError(f"{name}[{n}] not provided (list has {len(vals)} entries)")
        return vals[n]

    return f


@dataclass(frozen=True)
class RecurrenceFamily:
    c: Coef
    lam: Coef
    a: Coef = field(default=_const(-1j))
    b: Coef = field(default=_const(1j))
    start_offset: int = 0
    name: str = "family"
    params: dict = field(default_factory=dict)
    special: bool = field(init=False, default=False)

    def __post_init__(self):
        if self.start_offset not in (0, 1):
            raise InvalidFamilyError("start_offset must be 0 or 1")
        object.__setattr__(self, "special", self._probe_special())

    def _probe_special(self, upto: int = DEGREE_CAP) -> bool:
        # x^2 + 1 factor and real c on the first `upto` steps
        try:
            for n in range(upto):
                j = n + self.start_offset
                if self.a(j) != -1j or self.b(j) != 1j:
                    return False
                if complex(self.c(j)).imag != 0:
                    return False
        except (InvalidFamilyError, IndexError):
            pass
        return True

    # step accessors
    def c_step(self, n: int) -> complex:
        return self.c(n + self.start_offset)

    def lam_step(self, n: int) -> float:
        return self.lam(n + self.start_offset)

    def q_step(self, n: int) -> Poly:
        """(x - a)(x - b) at step n."""
        j = n + self.start_offset
        a, b = complex(self.a(j)), complex(self.b(j))
        return Poly([a * b, -(a + b), 1.0])

    def checked_lam_step(self, n: int) -> float:
        v = self.lam_step(n)
        if isinstance(v, complex) or (np.iscomplexobj(v) and complex(v).imag != 0):
            raise InvalidFamilyError(f"lambda at step {n} is not real: {v}")
        v = float(np.real(v))
        if not v > 0:
            raise InvalidFamilyError(
                f"{self.name}: lambda must be positive, got {v} at index {n + self.start_offset}")
        return v

    def level_to_step(self, k: int) -> int:
        s = k - self.start_offset
        if s < 0:
            raise ValueError(f"level {k} is below the first level of convention {self.start_offset}")
        return s

    def step_to_level(self, s: int) -> int:
        return s + self.start_offset

    def modified(self, changes: dict[int, tuple[float, float]], name: str | None = None):
        """Family with c_s += mu and lambda_s *= nu at the given *steps*."""
        off = self.start_offset
        by_index = {s + off: mv for s, mv in changes.items()}
        c0, l0 = self.c, self.lam

        def c(j):
            return c0(j) + by_index[j][0] if j in by_index else c0(j)

        def lam(j):
            return l0(j) * by_index[j][1] if j in by_index else l0(j)

        return RecurrenceFamily(c, lam, self.a, self.b, off, name or f"{self.name}*", dict(self.params))


@dataclass(frozen=True)
class PolySequence:
    items: tuple
    kind: str = "first"
    family: str = ""

    def __getitem__(self, n):
        return self.items[n]

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)


def _check_N(N: int):
    if N < 0:
        raise ValueError("N must be nonnegative")
    if N > DEGREE_CAP:
        raise SizeCapError(f"degree {N} exceeds cap {DEGREE_CAP}")


def run_recurrence(fam: RecurrenceFamily, first_step: int, prev: Poly, cur: Poly, count: int,
                   changes: dict | None = None) -> list[Poly]:
    """Apply `count` recurrence steps starting at `first_step`.

    Returns [cur, y_{first+1}, ..., y_{first+count}].  `changes` maps a step to
    (mu, nu) replacing c by c+mu and lambda by nu*lambda at that step.
    """
    changes = changes or {}
    out = [cur]
    for n in range(first_step, first_step + count):
        mu, nu = changes.get(n, (0.0, 1.0))
        w = Poly([-(fam.c_step(n) + mu), 1.0])
        nxt = w * cur
        if not prev.is_zero():
            nxt = nxt - (nu * fam.checked_lam_step(n)) * (fam.q_step(n) * prev)
        prev, cur = cur, nxt
        out.append(cur)
    return out


def generate_first(fam: RecurrenceFamily, N: int) -> PolySequence:
    """P_0..P_N with P_{-1}=0, P_0=1."""
    _check_N(N)
    return PolySequence(tuple(run_recurrence(fam, 0, Poly(), Poly([1.0]), N)), "first", fam.name)


def generate_second(fam: RecurrenceFamily, N: int) -> PolySequence:
    """Q_0..Q_N with Q_0=0, Q_1=1; deg Q_n <= n-1."""
    if N < 1:
        raise ValueError("N must be >= 1 for the second kind")
    _check_N(N)
    items = [Poly()] + run_recurrence(fam, 1, Poly(), Poly([1.0]), N - 1)
    return PolySequence(tuple(items), "second", fam.name)


def generate_associated(fam: RecurrenceFamily, r: int, N: int) -> PolySequence:
    """P^{(r)}_0..P^{(r)}_N: the recurrence restarted at step r."""
    if r < 0:
        raise ValueError("order r must be >= 0")
    _check_N(N)
    items = run_recurrence(fam, r, Poly(), Poly([1.0]), N)
    return PolySequence(tuple(items), f"associated({r})", fam.name)


def _abs_eval(p: Poly, grid: np.ndarray) -> np.ndarray:
    """sum_j |p_j| |x|^j: the scale of Horner round-off in p(x)."""
    return Poly(np.abs(p.coeffs))(np.abs(grid)).real if not p.is_zero() else np.zeros(len(grid))


def recurrence_residual(fam: RecurrenceFamily, seq: PolySequence, first: int = 1,
                        grid: np.ndarray | None = None, scale: str = "value") -> float:
    """Max relative residual of the defining recurrence over a Chebyshev grid in [-5, 5].

    ``scale="value"`` divides by max(1, |P_{n+1}|).  Between the zeros P_{n+1}(x)
    is far smaller than its coefficients times |x|^j, so for high degree the
    rounding of the evaluation itself dominates that measure; ``scale="terms"``
    divides by the absolute-coefficient evaluations of the three terms, which
    measures backward error.
    """
    if scale not in ("value", "terms"):
        raise ValueError("scale must be 'value' or 'terms'")
    if grid is None:
        grid = chebyshev_grid(21, -5.0, 5.0)
    worst = 0.0
    for n in range(first, len(seq) - 1):
        lhs = seq[n + 1](grid)
        q = fam.q_step(n)
        rhs = (grid - fam.c_step(n)) * seq[n](grid) - fam.lam_step(n) * q(grid) * seq[n - 1](grid)
        denom = np.maximum(1.0, np.abs(lhs))
        if scale == "terms":
            bound = (_abs_eval(seq[n + 1], grid)
                     + (np.abs(grid) + abs(fam.c_step(n))) * _abs_eval(seq[n], grid)
                     + abs(fam.lam_step(n)) * _abs_eval(q, grid) * _abs_eval(seq[n - 1], grid))
            denom = np.maximum(1.0, bound)
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / denom)))
    return worst


def chebyshev_grid(m: int, lo: float, hi: float) -> np.ndarray:
    k = np.arange(m)
    t = np.cos((2 * k + 1) * np.pi / (2 * m))
    return np.sort(0.5 * (lo + hi) + 0.5 * (hi - lo) * t)


# ---------------------------------------------------------------- pencil

@dataclass(frozen=True)
class LinearPencil:
    n: int
    w: tuple
    chiL: tuple  # chiL[j-1] is chi_j^L, j = 1..n-1
    chiR: tuple

    def matrix(self) -> list[list[Poly]]:
        """Entries of x J_n - H_n."""
        M = [[Poly() for _ in range(self.n)] for _ in range(self.n)]
        for j in range(self.n):
            M[j][j] = self.w[j]
        for j in range(1, self.n):
            M[j - 1][j] = -self.chiR[j - 1]
            M[j][j - 1] = -self.chiL[j - 1]
        return M


def build_pencil(fam: RecurrenceFamily, n: int) -> LinearPencil:
    if n < 1:
        raise ValueError("pencil size must be >= 1")
    w = tuple(Poly([-fam.c_step(j), 1.0]) for j in range(n))
    chiL, chiR = [], []
    for j in range(1, n):
        jj = j + fam.start_offset
        chiL.append(Poly.linear(complex(fam.a(jj)), fam.checked_lam_step(j)))
        chiR.append(Poly.linear(complex(fam.b(jj))))
    return LinearPencil(n, w, tuple(chiL), tuple(chiR))


def pencil_charpoly(p: LinearPencil) -> Poly:
    """det(x J_n - H_n) by cofactor expansion (zero entries skipped)."""
    if p.n > PENCIL_CAP:
        raise SizeCapError(f"cofactor expansion capped at n={PENCIL_CAP}")
    M = p.matrix()
    n = p.n

    @lru_cache(maxsize=None)
    def det(row: int, cols: int) -> Poly:
        # expand along `row` over the remaining column set `cols` (bitmask)
        if row == n:
            return Poly([1.0])
        total = Poly()
        sign = 1
        for j in range(n):
            if not cols >> j & 1:
                continue
            if not M[row][j].is_zero():
                minor = det(row + 1, cols & ~(1 << j))
                if not minor.is_zero():
                    term = M[row][j] * minor
                    total = total + term if sign > 0 else total - term
            sign = -sign
        return total

    return det(0, (1 << n) - 1)


# --------------------------------------------------------------- builtins

def example1() -> RecurrenceFamily:
    """c_n = 0, lambda_n = 1/4, factor x^2+1, indices from n = 0."""
    return RecurrenceFamily(_const(0.0), _const(0.25), start_offset=0, name="example1")


def lambda2half() -> RecurrenceFamily:
    """Shifted family c_n = 0, lambda_2 = 1/2, lambda_{n+1} = 1/4 (n >= 2)."""
    return RecurrenceFamily(_const(0.0), lambda j: 0.5 if j == 2 else 0.25,
                            start_offset=1, name="lambda2half")


def crr(zeta: float = 10.0, theta: float = 12.0) -> RecurrenceFamily:
    """Complementary Routh-Romanovski family in the shifted convention.

    c_n = theta/(zeta+n), lambda_{n+1} = n(2 zeta+n+1) / (4 (zeta+n)(zeta+n+1)).
    Minimal parameters l_{n+1} = n / (2 (zeta+n+1)).
    """
    if zeta <= -1:
        raise InvalidFamilyError("crr requires zeta > -1")

    def lam(j):
        n = j - 1
        return n * (2 * zeta + n + 1) / (4 * (zeta + n) * (zeta + n + 1))

    return RecurrenceFamily(lambda j: theta / (zeta + j), lam, start_offset=1,
                            name="crr", params={"zeta": zeta, "theta": theta})


def crr_tabulated(zeta: float = 10.0, theta: float = 12.0) -> RecurrenceFamily:
    """CRR recurrence as used for the published zero tables.

    Indices from n = 0: c_0 = theta/zeta, c_n = theta/(zeta+n-1) for n >= 1 and
    lambda_n = n(2 zeta+n-1) / (4 (zeta+n-1)(zeta+n)).  This is the e = zeta+i theta
    CRR recurrence with the c index lagging lambda by one step.
    """
    if zeta <= 0:
        raise InvalidFamilyError("crr_tabulated requires zeta > 0")

    def c(n):
        return theta / (zeta + max(n, 1) - 1)

    def lam(n):
        return n * (2 * zeta + n - 1) / (4 * (zeta + n - 1) * (zeta + n))

    return RecurrenceFamily(c, lam, start_offset=0, name="crr_tabulated",
                            params={"zeta": zeta, "theta": theta})


def chebyshev_r2(a: float = 1.0, b: float = 4.0) -> RecurrenceFamily:
    """P_{n+1} = (z - sqrt(ab)) P_n - (1/4)(z-a)(z-b) P_{n-1}."""
    if a <= 0 or b <= 0:
        raise InvalidFamilyError("chebyshev_r2 requires a, b > 0")
    return RecurrenceFamily(_const(math.sqrt(a * b)), _const(0.25), _const(complex(a)), _const(complex(b)),
                            start_offset=0, name="chebyshev_r2", params={"a": a, "b": b})


BUILTINS: dict[str, Callable[..., RecurrenceFamily]] = {
    "example1": example1,
    "lambda2half": lambda2half,
    "codilation_demo": lambda2half,
    "crr": crr,
    "crr_tabulated": crr_tabulated,
    "chebyshev_r2": chebyshev_r2,
}


def builtin(name: str, **params) -> RecurrenceFamily:
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise InvalidFamilyError(f"unknown builtin family {name!r}; known: {sorted(BUILTINS)}") from None
    return factory(**params)


# ------------------------------------------------------------ JSON configs

def _scalar(v):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(v[0], v[1])
    if isinstance(v, str):
        return complex(v.replace(" ", "").replace("i", "j"))
    return v


def _coef_from_spec(spec, key: str) -> Coef:
    if "const" in spec:
        return _const(_scalar(spec["const"]))
    if "list" in spec:
        return _from_list([_scalar(v) for v in spec["list"]], key)
    if "builtin" in spec:
        fam = builtin(spec["builtin"], **spec.get("params", {}))
        return getattr(fam, key)
    raise InvalidFamilyError(f"coefficient spec for {key!r} needs const, list or builtin")


def family_from_config(cfg: dict) -> RecurrenceFamily:
    """Build a family from the JSON document form.

    {"name", "convention": 0|1, "c": spec, "lambda": spec, "a": spec, "b": spec}
    where spec is {"const": v} | {"list": [...]} | {"builtin": name, "params": {...}}.
    A top-level {"builtin": name, "params": {...}} selects a whole builtin family.
    """
    if "builtin" in cfg and "c" not in cfg:
        return builtin(cfg["builtin"], **cfg.get("params", {}))
    conv = int(cfg.get("convention", 0))
    a = _coef_from_spec(cfg["a"], "a") if "a" in cfg else _const(-1j)
    b = _coef_from_spec(cfg["b"], "b") if "b" in cfg else _const(1j)
    return RecurrenceFamily(_coef_from_spec(cfg["c"], "c"), _coef_from_spec(cfg["lambda"], "lam"),
                            a, b, conv, cfg.get("name", "family"))


def parse_family(arg: str) -> RecurrenceFamily:
    """A JSON file path, or `name` / `name:key=val,key=val` for builtins."""
    p = Path(arg)
    if arg.endswith(".json") or p.is_file():
        return family_from_config(json.loads(p.read_text()))
    name, _, rest = arg.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        k, _, v = item.partition("=")
        params[k.strip()] = float(v)
    return builtin(name.strip(), **params)
