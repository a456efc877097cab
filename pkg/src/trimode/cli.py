"""Command-line front end.

Data goes to stdout (JSON or CSV), diagnostics to stderr. Exit status is 0
on success, 1 for domain or numerical errors and 2 for usage errors.
Floats in CSV output carry 12 significant digits.

The physicality tolerance defaults to 1e-9 and can be overridden through the
``TRIMODE_TOL_PHYS`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import decoherence as dc
from . import entanglement as ent
from . import phase_space as ps
from . import protocols as pr
from . import states as st
from .errors import TrimodeError

FAMILIES = sorted(st._REGISTRY)
CSV_FMT = ".12g"


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    return format(float(x), CSV_FMT)


def parse_grid(text: str) -> np.ndarray:
    """``lo:hi:step`` with ``hi`` included (up to rounding)."""
    try:
        lo, hi, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"grid must look like lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise UsageError("grid needs step > 0 and hi >= lo")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


# ---------------------------------------------------------------------------
# state selection
# ---------------------------------------------------------------------------


def _add_state_args(p: argparse.ArgumentParser, required: bool = False) -> None:
    g = p.add_argument_group("resource state")
    g.add_argument("--family", choices=FAMILIES, required=required)
    g.add_argument("--input", help="JSON file holding a covariance matrix or a state description")
    g.add_argument("--a", type=float, help="local mixedness (ghzw, t-state, basset-hound)")
    g.add_argument("--r", type=float, help="squeezing parameter")
    g.add_argument("--r1", type=float)
    g.add_argument("--r2", type=float)
    g.add_argument("--n", type=float, help="thermal noise factor of noisy-ghzw")
    g.add_argument("--s", type=float, help="noisy-ghzw: e^{2r}; allotment: transmittivity")
    g.add_argument("--n-db", type=float, help="10 log10(n)")
    g.add_argument("--s-db", type=float, help="10 log10(s)")
    g.add_argument("--t", type=float, help="allotment transmittivity")
    g.add_argument("--m", type=float, help="allotment two-mode squeezing cosh(2r)")
    g.add_argument("--a1", type=float)
    g.add_argument("--a2", type=float)
    g.add_argument("--a3", type=float)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"{getattr(args, 'family', None) or args.command} needs {flags}")
    return [getattr(args, n) for n in names]


def spec_from_args(args) -> st.StateSpec:
    fam = args.family
    if fam == "two-mode-squeezed":
        return st.TwoModeSqueezed(*_need(args, "r"))
    if fam == "ghzw":
        if args.a is not None:
            return st.GHZW.from_local_mixedness(args.a)
        if args.r is not None:
            return st.GHZW(args.r, args.r)
        return st.GHZW(*_need(args, "r1", "r2"))
    if fam == "noisy-ghzw":
        n = ps.from_decibels(args.n_db) if args.n_db is not None else _need(args, "n")[0]
        if args.s_db is not None:
            return st.NoisyGHZW.from_s(n, ps.from_decibels(args.s_db))
        if args.s is not None:
            return st.NoisyGHZW.from_s(n, args.s)
        return st.NoisyGHZW(n, *_need(args, "r"))
    if fam == "t-state":
        if args.a is not None:
            return st.TState.from_local_mixedness(args.a)
        return st.TState(*_need(args, "r"))
    if fam == "basset-hound":
        return st.BassetHound(*_need(args, "a"))
    if fam == "arbitrary-pure":
        return st.ArbitraryPure(*_need(args, "a1", "a2", "a3"))
    if fam == "allotment":
        return st.AllotmentRaw(*_need(args, "m", "s", "t"))
    raise UsageError("no state given: use --family or --input")


def load_state(args):
    """Return ``(covariance, spec or None)`` from ``--input`` or the family flags."""
    if getattr(args, "input", None):
        with open(args.input) as fh:
            data = json.load(fh)
        if "family" in data:
            spec = st.spec_from_dict(data)
            return spec.covariance(), spec
        if data.get("spec") is not None:
            spec = st.spec_from_dict(data["spec"])
            return spec.covariance(), spec
        if "covariance" in data:
            data = data["covariance"]
        return ps.covariance_from_dict(data), None
    if args.family is None:
        raise UsageError("no state given: use --family or --input")
    spec = spec_from_args(args)
    return spec.covariance(), spec


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _emit_json(obj, out) -> None:
    json.dump(obj, out, indent=2)
    out.write("\n")


def cmd_make_state(args, out):
    sigma, spec = load_state(args)
    _emit_json(
        {
            "spec": None if spec is None else spec.to_dict(),
            "covariance": ps.covariance_to_dict(sigma),
            "local_mixednesses": ps.local_mixednesses(sigma).tolist(),
            "purity": ps.purity(sigma),
        },
        out,
    )


def cmd_analyze(args, out):
    sigma, spec = load_state(args)
    _emit_json(ent.analyze(sigma, spec).to_dict(), out)


def cmd_teleport(args, out):
    sigma, spec = load_state(args)
    n = ps.n_modes_of(sigma)
    pair = sigma if n == 2 else ps.reduce(sigma, [args.sender, args.receiver])
    if n > 2 and args.sender > args.receiver:
        pair = ent.swap_modes(pair, 1, 2)
    if args.optimize_local:
        F = pr.optimize_local_squeezing(pair).fidelity
    else:
        F = pr.teleport_fidelity(pair)
    tag = spec.family if spec is not None else ""
    _emit_json(pr.FidelityReport(F, args.sender, [args.receiver], tag).to_dict(), out)


def cmd_network(args, out):
    sigma, spec = load_state(args)
    F = pr.assisted_network_fidelity(sigma, args.sender, args.receiver)
    report = pr.FidelityReport(F, args.sender, [args.receiver], spec.family if spec else "").to_dict()
    if spec is not None and spec.family == "ghzw":
        report["closed_form"] = pr.ghzw_network_fidelity(spec.a)
    _emit_json(report, out)


def cmd_teleclone(args, out):
    if args.optimal_family:
        if args.a is None or args.t is None:
            raise UsageError("--optimal-family needs --a and --t")
        fb, fc = pr.optimal_asymmetric_family(args.a, args.t)
        resource = "optimal-asymmetric"
    elif args.a1 is not None:
        a1, a2, a3 = _need(args, "a1", "a2", "a3")
        fb, fc = pr.telecloning_asymmetric_fidelities(a1, a2, a3)
        resource = "arbitrary-pure"
    elif args.a is not None:
        fb = fc = pr.telecloning_symmetric_fidelity(args.a)
        resource = "basset-hound"
    else:
        raise UsageError("teleclone needs --a, --a1/--a2/--a3, or --optimal-family with --a and --t")
    bob = pr.FidelityReport(fb, 1, [2], resource).to_dict()
    claire = pr.FidelityReport(fc, 1, [3], resource).to_dict()
    _emit_json({"F_bob": fb, "F_claire": fc, "bob": bob, "claire": claire}, out)


def cmd_sample(args, out):
    sample = st.random_pure_sample(args.a1, args.count, args.seed)
    out.write(sample.CSV_HEADER + "\n")
    for row in sample.csv_rows(CSV_FMT):
        out.write(row + "\n")
    print(f"rejected draws: {sample.rejected}", file=sys.stderr)


def cmd_decohere(args, out):
    _, spec = load_state(args)
    if spec is None:
        raise UsageError("decohere needs a state family (a description, not a bare matrix)")
    bath = dc.BathParams(n_bar=args.nbar, gamma=args.gamma)
    grid = parse_grid(args.grid)
    sigma0 = spec.covariance()
    out.write("gt,F,logneg_1_23\n")
    for gt in grid:
        sigma = dc.evolve_thermal(sigma0, bath.at(gt / bath.gamma))
        F = pr.assisted_network_fidelity(sigma)
        out.write(f"{_fmt(gt)},{_fmt(F)},{_fmt(ent.log_negativity(sigma, '1|23'))}\n")


SWEEPS = {
    "symmetric-telecloning": ("a", pr.telecloning_symmetric_fidelity),
    "network-ghzw": ("a", pr.ghzw_network_fidelity),
    "f2-reduced": ("r_bar", pr.f2_reduced_optimal),
    "f2-unitary": ("r_bar", pr.f2_unitary_localized_optimal),
}


def cmd_sweep(args, out):
    grid = np.sort(parse_grid(args.grid))
    if args.quantity in ("optimal-asymmetric-bob", "optimal-asymmetric-claire"):
        if args.a is None:
            raise UsageError(f"{args.quantity} sweeps t and needs --a")
        k = 0 if args.quantity.endswith("bob") else 1
        name, fn = "t", (lambda t: pr.optimal_asymmetric_family(args.a, t)[k])
    else:
        name, fn = SWEEPS[args.quantity]
    out.write("param,value,F,beats_classical,beats_nocloning\n")
    for x in grid:
        try:
            F = float(fn(float(x)))
            if not math.isfinite(F):
                raise ArithmeticError("non-finite fidelity")
        except (TrimodeError, ArithmeticError, ValueError) as exc:
            print(f"{name}={_fmt(x)}: {exc}", file=sys.stderr)
            out.write(f"{name},{_fmt(x)},error,,\n")
            continue
        out.write(
            f"{name},{_fmt(x)},{_fmt(F)},{_fmt(pr.beats(F, pr.CLASSICAL_FIDELITY))},"
            f"{_fmt(pr.beats(F, pr.NO_CLONING_FIDELITY))}\n"
        )


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trimode", description="Three-mode Gaussian state toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-state", help="build a state and print its covariance matrix")
    _add_state_args(p)
    p.set_defaults(func=cmd_make_state)

    p = sub.add_parser("analyze", help="entanglement report of a three-mode state")
    _add_state_args(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("teleport", help="two-party teleportation through a (reduced) resource")
    _add_state_args(p)
    p.add_argument("--sender", type=int, default=1)
    p.add_argument("--receiver", type=int, default=2)
    p.add_argument("--optimize-local", action="store_true", help="optimize local single-mode squeezings")
    p.set_defaults(func=cmd_teleport)

    p = sub.add_parser("network", help="assisted three-party teleportation network")
    _add_state_args(p)
    p.add_argument("--sender", type=int, default=1)
    p.add_argument("--receiver", type=int, default=2)
    p.set_defaults(func=cmd_network)

    p = sub.add_parser("teleclone", help="1 -> 2 telecloning fidelities")
    p.add_argument("--a", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--a1", type=float)
    p.add_argument("--a2", type=float)
    p.add_argument("--a3", type=float)
    p.add_argument("--optimal-family", action="store_true")
    p.set_defaults(func=cmd_teleclone)

    p = sub.add_parser("sample", help="random pure states at fixed a1 (CSV)")
    p.add_argument("--a1", type=float, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("decohere", help="network fidelity under local thermal noise (CSV)")
    _add_state_args(p)
    p.add_argument("--nbar", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--grid", default="0:5:0.05", help="gamma*t grid as lo:hi:step")
    p.set_defaults(func=cmd_decohere)

    p = sub.add_parser("sweep", help="closed-form fidelity sweeps (CSV)")
    p.add_argument(
        "--quantity",
        required=True,
        choices=sorted(SWEEPS) + ["optimal-asymmetric-bob", "optimal-asymmetric-claire"],
    )
    p.add_argument("--grid", required=True)
    p.add_argument("--a", type=float, help="resource local mixedness for t sweeps")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, out)
    except UsageError as exc:
        print(f"trimode {args.command}: {exc}", file=sys.stderr)
        return 2
    except (TrimodeError, OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        print(f"trimode {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
