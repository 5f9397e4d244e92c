"""Command-line interface.

Exit codes: 0 ok, 2 usage error, 3 numeric mismatch against a printed table,
4 invariant or identity failure.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from pathlib import Path
from typing import Callable

from . import chain as chain_mod
from .errors import (IdentityViolationError, InvalidFamilyError, InvariantViolationError,
                     NotAChainSequenceError)
from .perturbation import (PerturbationSpec, casoratti_perturbed, perturb_direct, perturb_via_nk,
                           perturb_via_sk)
from .poly import Poly, rel_coeff_error
from .recurrence import (RecurrenceFamily, build_pencil, builtin, generate_associated, generate_first,
                         generate_second, parse_family, pencil_charpoly)
from .tables import FIGURES, TABLES, compute_table, figure_data
from .unit_circle import VerblunskyData, gamma_from, phi_from_family, szego
from .zeros import electrostatic_energy, interlace, stationary_parameters, zeros_of

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_INVARIANT = 0, 2, 3, 4


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return f"{float(x) + 0.0:.10g}"  # + 0.0 folds -0.0 into 0.0


def fmt_complex(z: complex) -> tuple[str, str]:
    z = complex(z)
    return fmt(z.real), fmt(z.imag)


def parse_perturb(arg: str | None) -> PerturbationSpec | None:
    """A JSON file, or inline ``k:mu:nu`` entries separated by ``;``."""
    if not arg:
        return None
    if arg.endswith(".json") or Path(arg).is_file():
        return PerturbationSpec.load(arg)
    entries = []
    for item in filter(None, arg.split(";")):
        parts = item.split(":")
        if not 1 <= len(parts) <= 3:
            raise UsageError(f"perturbation entry {item!r} is not k:mu:nu")
        k = int(parts[0])
        mu = float(parts[1]) if len(parts) > 1 and parts[1] else 0.0
        nu = float(parts[2]) if len(parts) > 2 and parts[2] else 1.0
        entries.append((k, mu, nu))
    return PerturbationSpec(tuple(sorted(entries)))


def emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def poly_rows(label: str, n: int, p: Poly) -> list[list]:
    return [[label, n, j, *fmt_complex(c)] for j, c in enumerate(p.coeffs)]


def poly_json(p: Poly) -> list:
    return [list(fmt_complex(c)) for c in p.coeffs]


# --------------------------------------------------------------- commands

def cmd_gen(args) -> int:
    fam = parse_family(args.family)
    if args.kind == "first":
        seq = generate_first(fam, args.n)
    elif args.kind == "second":
        seq = generate_second(fam, args.n)
    else:
        seq = generate_associated(fam, args.r, args.n)
    if args.format == "json":
        emit(args, to_json({"family": fam.name, "kind": seq.kind,
                            "polys": [poly_json(p) for p in seq.items]}))
    else:
        rows = [r for n, p in enumerate(seq.items) for r in poly_rows(seq.kind, n, p)]
        emit(args, to_csv(["kind", "n", "power", "re", "im"], rows))
    return EXIT_OK


def _zero_columns(fam: RecurrenceFamily, spec: PerturbationSpec | None, n: int) -> dict:
    cols = {f"P{n}": zeros_of(fam, None, n)}
    if spec is not None:
        cols[f"P{n}({spec})"] = zeros_of(fam, spec, n)
    return cols


def cmd_zeros(args) -> int:
    fam = parse_family(args.family)
    cols = _zero_columns(fam, parse_perturb(args.perturb), args.n)
    if args.format == "json":
        out = {}
        for label, rs in cols.items():
            out[label] = {"real_zeros": [fmt(x) for x in rs.real_zeros],
                          "complex_roots": [list(fmt_complex(z)) for z in rs.complex_roots]}
        if len(cols) == 2:
            a, b = cols.values()
            rep = interlace(b, a)
            out["interlacing"] = {"verdict": rep.verdict, "common": [fmt(x) for x in rep.common],
                                  "leading": {"A": "perturbed", "B": "unperturbed", None: None}[rep.leading],
                                  "witness": [fmt(x) for x in rep.witness] if rep.witness else None}
        emit(args, to_json(out))
        return EXIT_OK
    columns = [[fmt(x) for x in rs.real_zeros] if rs.all_real else
               [f"{fmt(z.real)}{'+' if z.imag >= 0 else '-'}{fmt(abs(z.imag))}i" for z in rs.complex_roots]
               for rs in cols.values()]
    rows = [[col[j] for col in columns] for j in range(max(len(c) for c in columns))]
    emit(args, to_csv(list(cols), rows))
    return EXIT_OK


def cmd_perturb(args) -> int:
    fam = parse_family(args.family)
    spec = parse_perturb(args.perturb)
    if spec is None:
        raise UsageError("perturb needs --perturb")
    P, Q = perturb_direct(fam, spec, args.n)
    Pn, Qn = perturb_via_nk(fam, spec, args.n)
    report = {"family": fam.name, "perturbation": spec.to_dict(), "n": args.n,
              "nk_vs_direct": fmt(max(rel_coeff_error(Pn[j], P[j]) for j in range(args.n + 1))),
              "nk_vs_direct_second_kind": fmt(max(rel_coeff_error(Qn[j], Q[j]) for j in range(1, args.n + 1)))}
    if len(spec.entries) == 1:
        k, mu, nu = spec.entries[0]
        S = perturb_via_sk(fam, k, mu, nu, args.n)
        report["sk_vs_direct"] = fmt(max(rel_coeff_error(S[j], P[j]) for j in range(args.n + 1)))
    report["P"] = [poly_json(p) for p in P.items]
    report["Q"] = [poly_json(q) for q in Q.items]
    if args.format == "csv":
        rows = [r for n, p in enumerate(P.items) for r in poly_rows("P", n, p)]
        rows += [r for n, q in enumerate(Q.items) for r in poly_rows("Q", n, q)]
        emit(args, to_csv(["kind", "n", "power", "re", "im"], rows))
    else:
        emit(args, to_json(report))
    return EXIT_OK


def cmd_chain(args) -> int:
    fam = parse_family(args.family)
    cs = chain_mod.ChainSeq.from_family(fam)
    N = args.n
    l = chain_mod.minimal_params(cs, N)
    M = chain_mod.maximal_params_approx(cs, N)
    d = chain_mod.complementary(cs, N)
    wall = chain_mod.wall_heuristic(chain_mod.minimal_params(cs, max(args.wall_n, N)), args.wall_n)
    out = {"family": fam.name,
           "chain": [fmt(v) for v in cs.values(N)],
           "minimal": [fmt(v) for v in l.values],
           "maximal_approx": [fmt(v) for v in M.values],
           "maximal_tolerance": fmt(M.meta["tolerance"]),
           "complementary": [fmt(v) for v in d.values(N)],
           "wall": {"verdict": wall.verdict, "slope": fmt(wall.slope),
                    "term_exponent": fmt(wall.term_exponent), "increment": fmt(wall.increment),
                    "partial_sums": [[c, fmt(s)] for c, s in wall.S]}}
    if args.format == "csv":
        rows = [[n + 1, out["chain"][n], out["minimal"][n], out["maximal_approx"][n], out["complementary"][n]]
                for n in range(N)]
        emit(args, to_csv(["n", "lambda_n+1", "l_n", "M_n", "d_n+1"], rows))
    else:
        emit(args, to_json(out))
    return EXIT_OK


def cmd_verblunsky(args) -> int:
    fam = parse_family(args.family)
    spec = parse_perturb(args.perturb)
    N = args.n
    vd = VerblunskyData.from_family(fam, N)
    cols = {"alpha": vd.alpha, "tau": vd.tau[1:]}
    if spec is not None:
        if len(spec.entries) != 1:
            raise UsageError("verblunsky takes a single-entry perturbation")
        k, mu, nu = spec.entries[0]
        step = fam.level_to_step(k)
        gamma, eta = gamma_from(fam, fam.modified({step: (mu, nu)}), step, N)
        cols.update({"gamma": gamma, "eta": eta[1:]})
    if args.format == "csv":
        header = ["n"] + [f"{name}_{part}" for name in cols for part in ("re", "im")]
        rows = [[n] + [v for arr in cols.values() for v in fmt_complex(arr[n])] for n in range(N)]
        emit(args, to_csv(header, rows))
    else:
        emit(args, to_json({name: [list(fmt_complex(z)) for z in arr] for name, arr in cols.items()}))
    return EXIT_OK


def cmd_table(args) -> int:
    res = compute_table(args.id)
    rows = [[r.label, r.index, fmt(r.computed), r.printed, fmt(r.diff)] for r in res.rows]
    if args.format == "json":
        emit(args, to_json({"table": res.table_id, "tol": res.tol, "max_diff": fmt(res.max_diff),
                            "rows": [dict(zip(["column", "index", "computed", "printed", "diff"], r))
                                     for r in rows]}))
    else:
        emit(args, to_csv(["column", "index", "computed", "printed", "diff"], rows))
    if not res.ok:
        print(f"table {args.id}: max |diff| {res.max_diff:.3e} exceeds {res.tol:g}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_figdata(args) -> int:
    emit(args, to_json(figure_data(args.id)))
    return EXIT_OK


def cmd_energy(args) -> int:
    fam = parse_family(args.family)
    spec = parse_perturb(args.perturb)
    base = zeros_of(fam, None, args.n).real_zeros
    if args.zeta_m is None or args.theta is None:
        zeta_m, theta, resid = stationary_parameters(base)
        source = "stationary fit to unperturbed zeros"
    else:
        zeta_m, theta, resid = args.zeta_m, args.theta, None
        source = "given"
    out = {"zeta_m": fmt(zeta_m), "theta": fmt(theta), "parameters": source,
           "fit_residual": None if resid is None else fmt(resid),
           "E_unperturbed": fmt(electrostatic_energy(base, zeta_m, theta))}
    if spec is not None:
        rs = zeros_of(fam, spec, args.n)
        out["E_perturbed"] = fmt(electrostatic_energy(rs.real_zeros, zeta_m, theta)) if rs.all_real else None
    emit(args, to_json(out))
    return EXIT_OK


# --------------------------------------------------------------- selftest

def _max_rel(a, b, lo=0) -> float:
    return max(rel_coeff_error(a[j], b[j]) for j in range(lo, len(b)))


def _check_routes(fam: RecurrenceFamily, k_offset: int = 0) -> str:
    worst = 0.0
    for k, mu, nu in ((1, 0.7, 1.0), (3, -1.1, 0.6), (4, 0.3, 1.8)):
        spec = PerturbationSpec.single(k, mu, nu)
        P, _ = perturb_direct(fam, spec, 12)
        S = perturb_via_sk(fam, k, mu, nu, 12)
        Pn, _ = perturb_via_nk(fam, PerturbationSpec.single(k + k_offset, mu, nu), 12)
        worst = max(worst, _max_rel(S, P), _max_rel(Pn, P))
    if worst > 1e-8:
        raise IdentityViolationError(f"{fam.name}: routes disagree by {worst:.3e}")
    return f"max rel {worst:.1e}"


def _check_casoratti(fam: RecurrenceFamily) -> str:
    rep = casoratti_perturbed(fam, 3, 0.8, 12)
    if not rep.ok:
        raise IdentityViolationError(f"{fam.name}: Casoratti residual {rep.max_rel_residual:.3e}")
    return f"residual {rep.max_rel_residual:.1e}"


def _check_unit_circle(fam: RecurrenceFamily) -> str:
    vd = VerblunskyData.from_family(fam, 10)
    vd.check()
    phis = szego(vd.alpha, 9)
    worst = max(rel_coeff_error(phi_from_family(fam, n), phis[n - 1]) for n in range(1, 11))
    if worst > 1e-9:
        raise IdentityViolationError(f"{fam.name}: Szego and P_n routes differ by {worst:.3e}")
    return f"max rel {worst:.1e}"


def _check_chain(fam: RecurrenceFamily) -> str:
    cs = chain_mod.ChainSeq.from_family(fam)
    l = chain_mod.minimal_params(cs, 50)
    M = chain_mod.maximal_params_approx(cs, 50)
    worst = max(l.identity_residual(cs), M.identity_residual(cs))
    if worst > 1e-10:
        raise IdentityViolationError(f"{fam.name}: chain identity residual {worst:.3e}")
    return f"residual {worst:.1e}"


def _check_pencil(fam: RecurrenceFamily) -> str:
    P = generate_first(fam, 8)
    worst = max(rel_coeff_error(pencil_charpoly(build_pencil(fam, n)), P[n]) for n in range(1, 9))
    if worst > 1e-10:
        raise IdentityViolationError(f"{fam.name}: pencil differs by {worst:.3e}")
    return f"max rel {worst:.1e}"


def _check_zeros(fam: RecurrenceFamily) -> str:
    for n in range(2, 16):
        rep = interlace(zeros_of(fam, None, n + 1), zeros_of(fam, None, n))
        if rep.verdict != "strict_interlace":
            raise InvariantViolationError(f"{fam.name}: P_{n + 1}, P_{n} do not interlace")
    return "n <= 15"


def _check_tables(_fam) -> str:
    worst = 0.0
    for t in TABLES:
        res = compute_table(t)
        if not res.ok:
            raise InvariantViolationError(f"table {t}: max diff {res.max_diff:.3e}")
        worst = max(worst, res.max_diff)
    return f"max diff {worst:.1e}"


def _negated_lambda(fam: RecurrenceFamily) -> RecurrenceFamily:
    lam = fam.lam
    flipped = (lambda n: -lam(n)) if callable(lam) else -lam
    return dataclasses.replace(fam, lam=flipped, name=f"{fam.name}[-lambda]")


def cmd_selftest(args) -> int:
    families = [builtin("example1"), builtin("lambda2half"), builtin("crr_tabulated"), builtin("crr")]
    if args.inject == "lambda-sign":
        families = [_negated_lambda(f) for f in families]
    k_offset = 1 if args.inject == "wrong-level" else 0
    checks: list[tuple[str, Callable, list]] = [
        ("routes", lambda f: _check_routes(f, k_offset), families),
        ("casoratti", _check_casoratti, families),
        ("unit_circle", _check_unit_circle, families),
        ("chain", _check_chain, families),
        ("pencil", _check_pencil, families),
        ("zeros", _check_zeros, families),
        ("tables", _check_tables, [None]),
    ]
    failed = 0
    for name, fn, fams in checks:
        for fam in fams:
            label = f"{name:12s} {fam.name if fam is not None else '-':28s}"
            try:
                detail = fn(fam)
                print(f"PASS {label} {detail}")
            except (IdentityViolationError, InvariantViolationError, InvalidFamilyError,
                    NotAChainSequenceError) as e:
                failed += 1
                print(f"FAIL {label} {type(e).__name__}: {e}")
    print(f"{failed} failure(s)")
    return EXIT_INVARIANT if failed else EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="r2spectra", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, family=True, n_default=None, fmt_default="csv", perturb=True):
        if family:
            p.add_argument("--family", default="example1",
                           help="builtin name (name:key=val,...) or JSON config path")
        if perturb:
            p.add_argument("--perturb", help="JSON path or inline entries k:mu:nu;k:mu:nu")
        if n_default is not None:
            p.add_argument("--n", type=int, default=n_default)
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=fmt_default)

    p = sub.add_parser("gen", help="generate a polynomial sequence")
    common(p, n_default=6, perturb=False)
    p.add_argument("--kind", choices=("first", "second", "associated"), default="first")
    p.add_argument("--r", type=int, default=1, help="order of the associated sequence")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("zeros", help="zeros of P_n, and of the perturbed P_n")
    common(p, n_default=9)
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("perturb", help="perturbed sequences with route cross-checks")
    common(p, n_default=10, fmt_default="json")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("chain", help="chain sequence parameters and Wall heuristic")
    common(p, n_default=20, fmt_default="json", perturb=False)
    p.add_argument("--wall-n", type=int, default=100_000)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("verblunsky", help="Verblunsky coefficients, optionally perturbed")
    common(p, n_default=10, family=True)
    p.set_defaults(func=cmd_verblunsky)

    p = sub.add_parser("table", help="regenerate a published zero table")
    p.add_argument("--id", type=int, required=True, choices=sorted(TABLES))
    common(p, family=False, perturb=False)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("figdata", help="zero series plotted in a figure, as JSON")
    p.add_argument("--id", type=int, required=True, choices=sorted(FIGURES))
    common(p, family=False, perturb=False, fmt_default="json")
    p.set_defaults(func=cmd_figdata)

    p = sub.add_parser("energy", help="logarithmic energy at unperturbed and perturbed zeros")
    common(p, n_default=6, fmt_default="json")
    p.add_argument("--zeta-m", type=float)
    p.add_argument("--theta", type=float)
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("selftest", help="run the invariant suite")
    p.add_argument("--inject", choices=("lambda-sign", "wrong-level"),
                   help="seed a fault to confirm the suite catches it")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InvalidFamilyError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (IdentityViolationError, InvariantViolationError) as e:
        print(f"invariant failure: {e}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
