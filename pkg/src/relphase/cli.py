"""Command-line driver.

Exit codes: 0 success, 2 parse/validation error, 3 undefined phase,
4 internal invariant breach.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .errors import ContractViolation, DomainError, InvariantBreach, ParseError, UndefinedPhaseError
from .geophase import (
    DEFAULT_STEPS,
    base_loop_phase,
    correlation_induced_phase,
    decomposition_phase,
    entanglement_induced_phase,
    loop_constant_latitude,
)
from .interferometry import extend_with_ancilla, interference_pattern, interferometric_phase_formula
from .states import (
    concurrence,
    entanglement_of_formation,
    mems_spectral,
    mems_state,
    norms2,
    parse_density_matrix,
    pure_concurrence,
    spectral_decomposition,
)
from .wootters import SEPARABLE_TOL, enumerate_tie_breaks, optimal_decomposition

EXIT_OK, EXIT_INPUT, EXIT_UNDEFINED, EXIT_INTERNAL = 0, 2, 3, 4

SWEEP_HEADER = [
    "x", "gamma", "gamma_E", "gamma_unwrapped", "gamma_E_unwrapped",
    "classical", "mod_gamma", "mod_gamma_E",
]
UNDEFINED = "undefined"
MIN_STEPS = 256


def parse_angle(text: str) -> float:
    """Radians, or ``<a>pi`` / ``pi`` shorthand for multiples of pi."""
    t = text.strip().lower().replace(" ", "")
    m = re.fullmatch(r"([+-]?(?:\d+\.?\d*|\.\d+)(?:e[+-]?\d+)?)?\*?pi", t)
    try:
        if m:
            return float(m.group(1) or 1.0) * math.pi
        return float(t)
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"invalid angle {text!r}; use radians or e.g. 0.45pi")


def _positive_steps(text: str) -> int:
    n = int(text)
    if n < MIN_STEPS:
        raise argparse.ArgumentTypeError(f"--steps must be at least {MIN_STEPS}")
    return n


def x_grid(x_from: float, x_to: float, x_step: float) -> list[float]:
    if x_step <= 0:
        raise DomainError("--x-step must be positive")
    count = int(math.floor((x_to - x_from) / x_step + 1e-9))
    return [round(x_from + k * x_step, 12) for k in range(count + 1)]


def _fmt(v, scale: float = 1.0) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return UNDEFINED
    return f"{v * scale:.12g}"


# --- sweep -----------------------------------------------------------------------------


def sweep_point(x: float, theta: float, steps: int) -> dict:
    """Correlation- and entanglement-induced phases of ``mems_state(x)``.

    Undefined phases come back as ``None`` rather than raising.
    """
    loop = loop_constant_latitude(theta, steps)
    row = {"x": x, "gamma": None, "mod_gamma": None, "gamma_E": None, "mod_gamma_E": None}
    try:
        r = decomposition_phase(mems_spectral(x), loop)
        row["gamma"], row["mod_gamma"] = r.phase, r.modulus
    except UndefinedPhaseError:
        pass
    try:
        r = entanglement_induced_phase(mems_state(x), loop)
        row["gamma_E"], row["mod_gamma_E"] = r.phase, r.modulus
    except UndefinedPhaseError:
        pass
    return row


def unwrap_defined(values) -> list:
    """Continuous unwrap across the defined entries; ``None`` entries stay ``None``."""
    out = list(values)
    idx = [k for k, v in enumerate(values) if v is not None]
    if idx:
        for k, v in zip(idx, np.unwrap([values[k] for k in idx])):
            out[k] = float(v)
    return out


def run_sweep(xs, theta: float, steps: int, jobs: int = 1) -> list[dict]:
    xs = [float(x) for x in xs]
    if any(not 0.0 <= x <= 1.0 for x in xs):
        raise DomainError("x values must lie in [0, 1]")
    if len(set(xs)) != len(xs) or xs != sorted(xs):
        raise DomainError("x values must be unique and ascending")
    if not 0.0 < theta < math.pi:
        raise DomainError("theta must lie strictly between 0 and pi")
    if steps < MIN_STEPS:
        raise DomainError(f"steps must be at least {MIN_STEPS}")
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda x: sweep_point(x, theta, steps), xs))
    else:
        rows = [sweep_point(x, theta, steps) for x in xs]
    gu = unwrap_defined([r["gamma"] for r in rows])
    geu = unwrap_defined([r["gamma_E"] for r in rows])
    for r, a, b in zip(rows, gu, geu):
        r["gamma_unwrapped"], r["gamma_E_unwrapped"] = a, b
        r["classical"] = None if a is None or b is None else a - b
    return rows


def write_sweep_csv(rows, stream, degrees: bool = False) -> None:
    scale = 180.0 / math.pi if degrees else 1.0
    angles = {"gamma", "gamma_E", "gamma_unwrapped", "gamma_E_unwrapped", "classical"}
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow([_fmt(r[c], scale if c in angles else 1.0) for c in SWEEP_HEADER])


def cmd_mems_sweep(args) -> int:
    xs = args.x_list if args.x_list is not None else x_grid(args.x_from, args.x_to, args.x_step)
    rows = run_sweep(xs, args.theta, args.steps, args.jobs)
    if args.out in (None, "-"):
        write_sweep_csv(rows, sys.stdout, args.degrees)
    else:
        with open(args.out, "w", newline="") as fh:
            write_sweep_csv(rows, fh, args.degrees)
    return EXIT_OK


# --- single-state commands -------------------------------------------------------------


def _load(path: str) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_density_matrix(text)


def _angle(v: float, degrees: bool) -> str:
    return f"{math.degrees(v) if degrees else v:.12g}"


def _vec(v) -> str:
    v = np.round(np.asarray(v, dtype=complex), 10) + 0.0  # no "-0.0000000000"
    return " ".join(f"{z.real + 0.0:+.10f}{z.imag + 0.0:+.10f}i" for z in v)


def cmd_phase(args, out) -> int:
    rho = _load(args.state)
    loop = loop_constant_latitude(args.theta, args.steps)
    c = concurrence(rho)
    spectral = spectral_decomposition(rho)
    print(f"concurrence: {c:.12g}", file=out)
    print(f"entanglement_of_formation: {entanglement_of_formation(rho):.12g}", file=out)
    print(f"gamma_loop: {_angle(base_loop_phase(loop), args.degrees)}", file=out)
    g = correlation_induced_phase(rho, loop)
    print(f"gamma: {_angle(g.phase, args.degrees)}", file=out)
    print(f"mod_gamma: {g.modulus:.12g}", file=out)
    ge = entanglement_induced_phase(rho, loop)
    print(f"gamma_E: {_angle(ge.phase, args.degrees)}", file=out)
    print(f"mod_gamma_E: {ge.modulus:.12g}", file=out)
    print(f"spectral_members: {len(spectral)}", file=out)
    n_opt = 0 if c <= SEPARABLE_TOL else len(optimal_decomposition(rho))
    print(f"optimal_members: {n_opt}", file=out)
    return EXIT_OK


def _print_decomposition(dec, out) -> None:
    for k, (m, n2) in enumerate(zip(dec.members, norms2(dec.members)), start=1):
        print(f"member {k}: {_vec(m)}", file=out)
        print(f"  norm2: {n2:.12g}  concurrence: {pure_concurrence(m):.12g}", file=out)
    for step, vals in enumerate(dec.trace):
        print(f"preconcurrences step {step}: " + " ".join(f"{v:+.12g}" for v in vals), file=out)


def cmd_decompose(args, out) -> int:
    rho = _load(args.state)
    c = concurrence(rho)
    print(f"concurrence: {c:.12g}", file=out)
    if c <= SEPARABLE_TOL:
        print("separable: no entanglement-minimizing decomposition needed", file=out)
        print("members: 0", file=out)
        return EXIT_OK
    dec = optimal_decomposition(rho)
    print(f"members: {len(dec)}", file=out)
    _print_decomposition(dec, out)
    if dec.tied:
        print("note: equal preconcurrences were resolved by lowest member index; "
              "the decomposition is not unique", file=out)
    if args.enumerate_ties:
        alts = enumerate_tie_breaks(rho)
        print(f"tie-break alternatives: {len(alts)}", file=out)
        for a, alt in enumerate(alts, start=1):
            print(f"alternative {a}: members {len(alt)}", file=out)
            _print_decomposition(alt, out)
    return EXIT_OK


def cmd_interfere(args, out) -> int:
    rho = _load(args.state)
    loop = loop_constant_latitude(args.theta, args.steps)
    print(f"decomposition: {args.decomposition}", file=out)
    if args.decomposition == "optimal":
        if concurrence(rho) <= SEPARABLE_TOL:
            print("separable: entanglement-induced interference phase is 0", file=out)
            print(f"formula_phase: {_angle(0.0, args.degrees)}", file=out)
            return EXIT_OK
        dec = optimal_decomposition(rho).members
    else:
        dec = spectral_decomposition(rho)
    print(f"members: {len(dec)}", file=out)
    try:
        sim = interference_pattern(extend_with_ancilla(dec), dec, loop)
        formula = interferometric_phase_formula(dec, loop)
    except UndefinedPhaseError:
        print(f"visibility: 0\nphase: {UNDEFINED}", file=out)
        raise
    print(f"simulated_visibility: {sim.visibility:.12g}", file=out)
    print(f"simulated_phase: {_angle(sim.phase, args.degrees)}", file=out)
    print(f"formula_modulus: {formula.visibility:.12g}", file=out)
    print(f"formula_phase: {_angle(formula.phase, args.degrees)}", file=out)
    diff = math.remainder(sim.phase - formula.phase, 2 * math.pi)
    print(f"phase_difference: {_angle(diff, args.degrees)}", file=out)
    return EXIT_OK


# --- entry point -----------------------------------------------------------------------


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid x list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relphase", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def loop_flags(sp):
        sp.add_argument("--theta", type=parse_angle, default=0.45 * math.pi,
                        help="polar angle of the constant-latitude loop (radians or e.g. 0.45pi)")
        sp.add_argument("--steps", type=_positive_steps, default=DEFAULT_STEPS)
        sp.add_argument("--degrees", action="store_true", help="print angles in degrees")

    sw = sub.add_parser("mems-sweep", help="phases of the MEMS family as CSV")
    loop_flags(sw)
    sw.add_argument("--x-from", type=float, default=0.0)
    sw.add_argument("--x-to", type=float, default=1.0)
    sw.add_argument("--x-step", type=float, default=0.01)
    sw.add_argument("--x-list", type=_float_list, default=None, help="comma-separated x values")
    sw.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    sw.add_argument("--jobs", type=int, default=1)

    ph = sub.add_parser("phase", help="concurrence, EoF and both phases of a state file")
    ph.add_argument("state")
    loop_flags(ph)

    de = sub.add_parser("decompose", help="entanglement-minimizing decomposition of a state file")
    de.add_argument("state")
    de.add_argument("--enumerate-ties", action="store_true")

    it = sub.add_parser("interfere", help="simulated interferometric phase of a state file")
    it.add_argument("state")
    it.add_argument("--decomposition", choices=("spectral", "optimal"), default="spectral")
    loop_flags(it)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = io.StringIO()
    try:
        if args.command == "mems-sweep":
            code = cmd_mems_sweep(args)
        else:
            code = {"phase": cmd_phase, "decompose": cmd_decompose, "interfere": cmd_interfere}[
                args.command
            ](args, out)
    except (ParseError, ContractViolation, DomainError) as exc:
        sys.stdout.write(out.getvalue())
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UndefinedPhaseError as exc:
        sys.stdout.write(out.getvalue())
        print(f"undefined phase: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    except InvariantBreach as exc:
        sys.stdout.write(out.getvalue())
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.write(out.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
