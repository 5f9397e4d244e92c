"""Published zero tables and figure series, regenerated from their recurrences.

The ``GOLDEN`` strings are a transcription of the printed tables, kept exactly
as printed (row order and truncated digits included).  They are reference data
only and are never written back from computed values.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .perturbation import PerturbationSpec, perturb_direct, s_k
from .recurrence import RecurrenceFamily, builtin, generate_first
from .zeros import all_roots

DEFAULT_TOL = 1e-6


def comparison_tol() -> float:
    """Absolute tolerance for golden comparison; R2SPECTRA_TOL overrides."""
    raw = os.environ.get("R2SPECTRA_TOL")
    return float(raw) if raw else DEFAULT_TOL


GOLDEN: dict[int, dict[str, tuple[str, ...]]] = {
    1: {
        "P9": ("-1.376381920", "1.376381920", "0.3249196962", "-0.3249196962", "3.077683537",
               "0.7265425280", "0", "-0.7265425280", "-3.077683537"),
        "P9(mu4=-2.0)": ("-1.376381920", "1.376381920", "0.3249196962", "-0.3249196962", "1.685063442",
                         ".4309372535", "-.2251211415", "-1.137754967", "-10.75312459"),
    },
    2: {
        "P7": ("0", "1", "-1", "2.414213562", ".4142135624", "-.4142135624", "-2.414213562"),
        "P7(mu3=0.43)": ("0", "1", "-1", "3.336754639", ".5388256504", "-.2996923982", "-1.855887891"),
    },
    3: {
        "P6": ("0.3324095627", "0.6295725714", ".9197511115", "1.273243623", "1.826806110", "2.724441863"),
        "P6(mu3=-0.3)": ("0.2430260465", "0.5966623160", "0.8619781365", "1.250348102", "1.813673082",
                         "2.533580638"),
    },
    4: {
        "P7": ("0.2389794289", "0.5107520351", "0.7737829160", "1.053542176", "1.437251708", "2.019702291",
               "2.953906046"),
        "P7(mu3=1.2)": ("0.2720925666", "0.6671359684", "0.8062631388", "1.111244050", "1.705005737",
                        "2.045309617", "4.019126394"),
    },
    5: {
        "P6": ("0.3324095627", "0.6295725714", "0.9197511115", "1.273243623", "1.826806110", "2.724441863"),
        "P6(mu3=0.3,mu4=0.4)": ("0.5005414531", "0.6667100353", "0.9815128474", "1.352930479", "1.942194994",
                                "3.229291555"),
        "P6(mu3=0.5,mu4=0.6)": ("0.5631868840", "0.6803702451", "1.016823459", "1.416833556", "1.990311187",
                                "3.556960381"),
    },
    6: {
        "P6": ("0.3324095627", "0.6295725714", "0.9197511115", "1.273243623", "1.826806110", "2.724441863"),
        "P6(mu3=-0.2,mu4=-0.3)": (".1599408957", "0.5840010301", ".8799756728", "1.232311882", "1.700534290",
                                  "2.458156724"),
        "P6(mu3=-0.4,mu4=-0.5)": ("0.001082138805", "0.5193524908", "0.8456227563", "1.207028405",
                                  "1.583284261", "2.307246095"),
    },
    7: {
        "P9": ("0", "-3.077683537", "-1.376381920", "-0.7265425280", "-0.3249196962", "0.3249196962",
               "0.7265425280", "1.376381920", "3.077683537"),
        "P9(nu3=0.6)": ("0", "-2.428062818", "-1.248215157", "-.7432443609", "-.2950948155", ".2950948155",
                        ".7432443609", "1.248215157", "2.428062818"),
    },
}


@dataclass(frozen=True)
class Series:
    """Zeros of one polynomial: P_n of a family, optionally perturbed, or S_k."""
    label: str
    family: str
    params: tuple = ()
    n: int = 0
    perturb: tuple = ()  # (level, mu, nu) entries
    s_k: tuple | None = None  # (level, mu, nu): zeros of S_k instead of P_n

    def build_family(self) -> RecurrenceFamily:
        return builtin(self.family, **dict(self.params))

    def polynomial(self):
        fam = self.build_family()
        if self.s_k is not None:
            return s_k(fam, *self.s_k)
        if self.perturb:
            return perturb_direct(fam, PerturbationSpec(self.perturb), self.n)[0][self.n]
        return generate_first(fam, self.n)[self.n]

    def zeros(self) -> np.ndarray:
        rs = all_roots(self.polynomial())
        return rs.real_zeros if rs.all_real else rs.complex_roots

    def describe(self) -> dict:
        out = {"label": self.label, "family": self.family, "params": dict(self.params)}
        if self.s_k is not None:
            out["s_k"] = {"level": self.s_k[0], "mu": self.s_k[1], "nu": self.s_k[2]}
        else:
            out["n"] = self.n
            out["perturb"] = [{"k": k, "mu": mu, "nu": nu} for k, mu, nu in self.perturb]
        return out


CRR = ("crr_tabulated", (("zeta", 10.0), ("theta", 12.0)))


def _ex(label, n, perturb=()):
    return Series(label, "example1", (), n, perturb)


def _crr(label, n, perturb=(), sk=None):
    return Series(label, CRR[0], CRR[1], n, perturb, sk)


TABLES: dict[int, tuple[Series, ...]] = {
    1: (_ex("P9", 9), _ex("P9(mu4=-2.0)", 9, ((4, -2.0, 1.0),))),
    2: (_ex("P7", 7), _ex("P7(mu3=0.43)", 7, ((3, 0.43, 1.0),))),
    3: (_crr("P6", 6), _crr("P6(mu3=-0.3)", 6, ((3, -0.3, 1.0),))),
    4: (_crr("P7", 7), _crr("P7(mu3=1.2)", 7, ((3, 1.2, 1.0),))),
    5: (_crr("P6", 6), _crr("P6(mu3=0.3,mu4=0.4)", 6, ((3, 0.3, 1.0), (4, 0.4, 1.0))),
        _crr("P6(mu3=0.5,mu4=0.6)", 6, ((3, 0.5, 1.0), (4, 0.6, 1.0)))),
    6: (_crr("P6", 6), _crr("P6(mu3=-0.2,mu4=-0.3)", 6, ((3, -0.2, 1.0), (4, -0.3, 1.0))),
        _crr("P6(mu3=-0.4,mu4=-0.5)", 6, ((3, -0.4, 1.0), (4, -0.5, 1.0)))),
    7: (_ex("P9", 9), _ex("P9(nu3=0.6)", 9, ((3, 0.0, 0.6),))),
}

_CHEB = ("chebyshev_r2", (("a", 1.0), ("b", 1.0)))

FIGURES: dict[int, dict] = {i: {"series": TABLES[i]} for i in TABLES}
FIGURES.update({
    8: {"series": (_ex("P9", 9), _ex("P9(nu3=0.6)", 9, ((3, 0.0, 0.6),)), _ex("P3", 3), _ex("P2", 2))},
    9: {"series": (_crr("P7", 7), _crr("P7(nu4=0.5)", 7, ((4, 0.0, 0.5),)), _crr("P4", 4), _crr("P3", 3))},
    10: {"series": tuple(Series(lbl, _CHEB[0], _CHEB[1], n, p) for lbl, n, p in (
            ("P10", 10, ()), ("P10(nu5=0.7)", 10, ((5, 0.0, 0.7),)), ("P5", 5, ()), ("P4", 4, ()))),
         "note": "with a = b = 1 every P_n is a multiple of (x - 1)^n; the computed roots form a "
                 "cluster around 1 and are not individually meaningful"},
    11: {"series": (_crr("S7(mu=0.4,nu=1.2)", 0, sk=(7, 0.4, 1.2)), _crr("P7", 7), _crr("P6", 6))},
    12: {"series": (_crr("S6(mu=0.6,nu=0.8)", 0, sk=(6, 0.6, 0.8)), _crr("P6", 6), _crr("P5", 5))},
})


@dataclass(frozen=True)
class TableRow:
    index: int
    label: str
    computed: float
    printed: str

    @property
    def diff(self) -> float:
        return abs(self.computed - float(self.printed))


@dataclass(frozen=True)
class TableResult:
    table_id: int
    columns: dict  # label -> sorted computed zeros
    rows: list  # TableRow per (column, sorted position)
    tol: float

    @property
    def max_diff(self) -> float:
        return max(r.diff for r in self.rows)

    @property
    def ok(self) -> bool:
        return self.max_diff <= self.tol


def compute_table(table_id: int, tol: float | None = None) -> TableResult:
    if table_id not in TABLES:
        raise KeyError(f"no table {table_id}; tables are 1..{max(TABLES)}")
    tol = comparison_tol() if tol is None else tol
    columns, rows = {}, []
    for series in TABLES[table_id]:
        z = series.zeros()
        if np.iscomplexobj(z):
            raise ValueError(f"table {table_id} column {series.label}: non-real zeros")
        columns[series.label] = z
        printed = sorted(GOLDEN[table_id][series.label], key=float)
        if len(printed) != len(z):
            raise ValueError(f"table {table_id} column {series.label}: {len(z)} zeros, {len(printed)} printed")
        rows.extend(TableRow(j + 1, series.label, float(x), p) for j, (x, p) in enumerate(zip(z, printed)))
    return TableResult(table_id, columns, rows, tol)


def figure_data(fig_id: int) -> dict:
    if fig_id not in FIGURES:
        raise KeyError(f"no figure {fig_id}; figures are 1..{max(FIGURES)}")
    spec = FIGURES[fig_id]
    series = []
    for s in spec["series"]:
        z = s.zeros()
        entry = s.describe()
        if np.iscomplexobj(z):
            entry["real"] = False
            entry["zeros"] = [[float(v.real), float(v.imag)] for v in z]
        else:
            entry["real"] = True
            entry["zeros"] = [float(v) for v in z]
        series.append(entry)
    out = {"figure": fig_id, "series": series}
    if "note" in spec:
        out["note"] = spec["note"]
    return out
