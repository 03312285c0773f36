"""Command-line interface: ``symqm <command> [options]``.

Exit codes: 0 success, 1 mismatch or failed verification, 2 usage error,
3 internal error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io as sio
from .closed_form import (BrickDataUnavailable, BrickTable, Family, LaguerreSpec, SpectrumReport, enumerate_families,
                          laguerre_roots, sector_bricks, theta_bosonic, theta_fermionic)
from .eigenstates import (NotARootError, build_family_state, dress_fermionic, state_residual)
from .fock_basis import enumerate_basis
from .hamiltonian import GramNotPositiveDefinite, solve_spectrum_numeric
from .trace_algebra import TraceExpr, UnsupportedReduction, cayley_hamilton_reduce

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _int_list(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _sector(args):
    """``(nF, fermion indices or None, table or None)``; bosonic is ``(0, (), None)``."""
    table = BrickTable.from_json(Path(args.brick_table)) if getattr(args, "brick_table", None) else None
    spec = getattr(args, "sector", "bosonic") or "bosonic"
    if spec == "bosonic":
        if table is not None:
            return table.nF, None, table
        return 0, (), None
    if spec.startswith("nF="):
        return int(spec[3:]), None, table
    idx = _int_list(spec)
    return sum(idx), idx, table


def _check_cfg(args):
    if args.n < 2:
        raise UsageError(f"--n must be at least 2 (got {args.n})")
    if getattr(args, "ncut", 0) < 0:
        raise UsageError(f"--ncut must be non-negative (got {args.ncut})")


def _emit(args, payload: dict, header=None, rows=None):
    if args.format == "csv":
        if header is None:
            raise UsageError("this command has no CSV form")
        text = sio.csv_text(header, rows)
    else:
        text = sio.dumps(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------
# commands


def cmd_basis(args) -> int:
    b = enumerate_basis(args.n, args.ncut)
    states = [list(p) for p in b]
    header = ["index"] + [f"p{k}" for k in range(2, args.n + 1)] + ["quanta"]
    rows = [[i] + list(p) + [p.quanta] for i, p in enumerate(b)]
    _emit(args, {"N": args.n, "ncut": args.ncut, "dimension": len(b), "states": states}, header, rows)
    return EXIT_OK


def cmd_gram(args) -> int:
    h, s = sio.load_matrices(args.n, args.ncut, args.cache_dir)
    b = s.basis
    rows = [[list(b[i]), list(b[j]), s[i, j]] for i in range(len(b)) for j in range(len(b)) if s[i, j]]
    payload = {"N": args.n, "ncut": args.ncut, "basis": [list(p) for p in b],
               "entries": [[sio.fraction_text(x) for x in row] for row in s.entries]}
    _emit(args, payload, ["bra", "ket", "value"],
          [[" ".join(map(str, a)), " ".join(map(str, c)), v] for a, c, v in rows])
    return EXIT_OK


def cmd_spectrum(args) -> int:
    nF, idx, table = _sector(args)
    method = args.method or "both"
    if method not in ("numeric", "closed", "both"):
        raise UsageError(f"--method must be numeric, closed or both (got {method})")
    bosonic = nF == 0 and table is None
    if not bosonic and method != "closed":
        if method == "numeric":
            raise UsageError("numeric spectra are available only in the bosonic sector")
        method = "closed"
    closed = None
    if method in ("closed", "both"):
        closed = theta_bosonic(args.n, args.ncut) if bosonic else theta_fermionic(args.n, args.ncut, nF, table)
    numeric = None
    if method in ("numeric", "both"):
        h, s = sio.load_matrices(args.n, args.ncut, args.cache_dir)
        numeric = solve_spectrum_numeric(h, s).eigenvalues
    if method == "both":
        rep = SpectrumReport(args.n, args.ncut, closed.energies, np.asarray(numeric), args.tol)
        payload = rep.to_json()
        payload["levels"] = len(rep.closed)
        rows = [[i, a, b] for i, (a, b) in enumerate(zip(payload["closed"], payload["numeric"]))]
        _emit(args, payload, ["index", "closed", "numeric"], rows)
        return EXIT_OK if rep.match else EXIT_MISMATCH
    if method == "numeric":
        energies = [float(x) for x in numeric]
        _emit(args, {"N": args.n, "ncut": args.ncut, "method": "numeric", "energies": energies},
              ["index", "E"], [[i, e] for i, e in enumerate(energies)])
        return EXIT_OK
    entries = [{"E": e.E, "family": list(e.family.tail), "nB": e.family.nB,
                "alpha": e.family.alpha, "root": e.root_index} for e in closed.entries]
    _emit(args, {"N": args.n, "ncut": args.ncut, "nF": nF, "method": "closed", "levels": entries},
          ["index", "E", "family", "nB", "alpha", "root"],
          [[i, x["E"], " ".join(map(str, x["family"])), x["nB"], x["alpha"], x["root"]]
           for i, x in enumerate(entries)])
    return EXIT_OK


def cmd_families(args) -> int:
    nF, idx, table = _sector(args)
    sector = None if (nF == 0 and table is None) else sector_bricks(args.n, nF, table)
    out = []
    for fam, m in enumerate_families(args.n, args.ncut, sector):
        roots = laguerre_roots(LaguerreSpec(m, fam.gamma(args.n)))
        out.append({"family": list(fam.tail), "nB": fam.nB, "alpha": fam.alpha,
                    "gamma": fam.gamma(args.n), "order": m, "energies": [float(r) / 2 for r in roots]})
    _emit(args, {"N": args.n, "ncut": args.ncut, "nF": nF, "families": out},
          ["family", "nB", "alpha", "gamma", "order", "count"],
          [[" ".join(map(str, f["family"])), f["nB"], f["alpha"], f["gamma"], f["order"], len(f["energies"])]
           for f in out])
    return EXIT_OK


def cmd_state(args) -> int:
    tail = _int_list(args.family) if args.family else (0,) * (args.n - 2)
    if len(tail) != args.n - 2 or any(t < 0 for t in tail):
        raise UsageError(f"--family needs {args.n - 2} non-negative entries (p3..pN), got {list(tail)}")
    mode = args.mode
    if mode == "finite":
        fam = Family(tail)
        m = fam.order(args.ncut)
        if m < 1:
            raise UsageError(f"family {fam.label()} has no states at ncut={args.ncut}")
        if args.energy is not None:
            E = args.energy
        else:
            roots = laguerre_roots(LaguerreSpec(m, fam.gamma(args.n)))
            if not 0 <= args.root < len(roots):
                raise UsageError(f"--root must be in 0..{len(roots) - 1}")
            E = float(roots[args.root]) / 2
        try:
            st = build_family_state(args.n, tail, E, ncut=args.ncut)
        except NotARootError as exc:
            raise UsageError(str(exc)) from None
    else:
        if args.energy is None:
            raise UsageError("continuum mode needs --energy")
        st = build_family_state(args.n, tail, args.energy, mode="continuum", tol=args.series_tol)
    if args.dress:
        try:
            st = dress_fermionic(st, _int_list(args.dress))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    payload = st.to_json()
    if mode == "finite":
        payload["ncut"] = args.ncut
        payload["residual"] = state_residual(st)
    _emit(args, payload, ["p", "value"],
          [[" ".join(map(str, c["p"])), c["value"]] for c in payload["coeffs"]])
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verification import run_suite

    checks = run_suite(args.suite)
    ok = all(c.passed for c in checks)
    payload = {"suite": args.suite, "pass": ok, "passed": sum(c.passed for c in checks),
               "failed": sum(not c.passed for c in checks), "checks": [c.to_json() for c in checks]}
    _emit(args, payload, ["name", "pass"], [[c.name, int(c.passed)] for c in checks])
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_expr(args) -> int:
    try:
        e = TraceExpr.parse(args.text, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = e.normal_order()
    if args.reduce:
        try:
            out = cayley_hamilton_reduce(out)
        except UnsupportedReduction as exc:
            raise UsageError(str(exc)) from None
    if args.format == "json":
        _emit(args, {"N": args.n, "input": args.text, "result": str(out)})
    else:
        text = str(out) + "\n"
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--format", choices=("json", "csv"), default="json")
    output.add_argument("--out", help="write to this file instead of stdout")
    output.add_argument("--cache-dir", help="matrix cache directory (SYMQM_CACHE overrides)")
    output.add_argument("--tol", type=float, default=1e-9, help="relative tolerance for comparisons")

    common = argparse.ArgumentParser(add_help=False, parents=[output])
    common.add_argument("--n", type=int, required=True, help="rank N of SU(N)")

    cut = argparse.ArgumentParser(add_help=False)
    cut.add_argument("--ncut", type=int, required=True, help="maximal number of bosonic quanta")

    sector = argparse.ArgumentParser(add_help=False)
    sector.add_argument("--sector", default="bosonic",
                        help="'bosonic', 'nF=<k>', or comma-separated fermionic brick indices")
    sector.add_argument("--brick-table", help="JSON brick table for a fermionic sector")

    p = argparse.ArgumentParser(prog="symqm", description="SU(N) supersymmetric matrix QM in a cut Fock basis")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("basis", parents=[common, cut], help="list the cut Fock basis").set_defaults(func=cmd_basis)
    sub.add_parser("gram", parents=[common, cut], help="exact Gram matrix").set_defaults(func=cmd_gram)

    sp = sub.add_parser("spectrum", parents=[common, cut, sector], help="energy levels")
    sp.add_argument("--method", choices=("numeric", "closed", "both"), default="both")
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("families", parents=[common, cut, sector], help="Laguerre families and roots")
    sp.set_defaults(func=cmd_families)

    sp = sub.add_parser("state", parents=[common, cut], help="closed-form eigenstate")
    sp.add_argument("--family", default="", help="tail p3,...,pN (default all zero)")
    sp.add_argument("--root", type=int, default=0, help="root index, ascending")
    sp.add_argument("--energy", type=float, help="energy instead of a root index")
    sp.add_argument("--mode", choices=("finite", "continuum"), default="finite")
    sp.add_argument("--series-tol", type=float, default=1e-10, help="continuum truncation tolerance")
    sp.add_argument("--dress", default="", help="fermionic brick indices, e.g. 3,5")
    sp.set_defaults(func=cmd_state)

    sp = sub.add_parser("verify", parents=[output], help="run a verification suite")
    sp.add_argument("suite", choices=("appendix", "recursion", "oracle", "overlap", "all"))
    sp.set_defaults(func=cmd_verify, n=2)

    sp = sub.add_parser("expr", parents=[common], help="normal-order a trace expression")
    sp.add_argument("text", help="e.g. '(a2)(A2)' or '3/2*(A2)(a1)'")
    sp.add_argument("--reduce", action="store_true", help="apply Cayley-Hamilton reduction")
    sp.set_defaults(func=cmd_expr)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        _check_cfg(args)
        return args.func(args)
    except UsageError as exc:
        print(f"symqm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrickDataUnavailable as exc:
        print(f"symqm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GramNotPositiveDefinite as exc:
        print(f"symqm: error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (OSError, ValueError) as exc:
        print(f"symqm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"symqm: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
