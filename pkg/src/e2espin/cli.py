"""Command-line interface.

Subcommands
-----------
point      observables at a single (theta_A, theta_B)
scan       full angle-grid scan; writes CSV and PGM heatmaps
bell-sim   finite-statistics CHSH coincidence experiment at one point
validate   run all cross-checking suites

Exit codes: 0 success, 2 configuration error, 3 numeric or model
error, 4 validation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import bellsim, c3mc
from .amplitudes import pwba_amplitudes
from .bell import RATIO_BOUND, chsh_expectation, bell_lhs_cross_sections, spin_asymmetry
from .entanglement import (
    concurrence_pure_closed,
    concurrence_unpolarized,
    concurrence_wootters,
    entanglement_of_formation,
    linear_entropy,
    von_neumann_entropy,
)
from .kinematics import HARTREE_EV, build_coplanar, tdcs_basic, tdcs_polarized
from .scan import (
    ConfigError,
    ScanConfig,
    load_config,
    parse_config,
    records_to_grids,
    resolve_polarizations,
    run_scan,
    write_csv,
    write_pgm,
)
from .spin import AmplitudePair, DegenerateStateError, reduced_density, rho_mixed
from .validate import run_all_suites

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VALIDATION = 4


def _json_default(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def _load_cfg(args) -> ScanConfig:
    cfg = load_config(args.config) if args.config else parse_config({})
    if getattr(args, "model", None):
        cfg = replace(cfg, model=args.model)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, mc=replace(cfg.mc, seed=args.seed))
    if getattr(args, "output_dir", None):
        cfg = replace(cfg, output_dir=args.output_dir)
    if cfg.model == "c3" and cfg.mc.samples < 1000:
        raise ConfigError("mc.samples must be >= 1000 for the c3 model")
    return cfg


def _point_kinematics(cfg: ScanConfig, theta_a_deg: float, theta_b_deg: float):
    e0, eb, et = cfg.energies_hartree()
    return build_coplanar(e0, eb, math.radians(theta_a_deg), math.radians(theta_b_deg), et)


def _point_amplitudes(cfg: ScanConfig, kin):
    if cfg.model == "pwba":
        return pwba_amplitudes(kin), None
    est = c3mc.c3_pair(kin, cfg.mc)
    return AmplitudePair(est.t_d, est.t_e), est


def cmd_point(args) -> int:
    cfg = _load_cfg(args)
    kin = _point_kinematics(cfg, args.theta_a, args.theta_b)
    amps, est = _point_amplitudes(cfg, kin)
    p1, p2 = resolve_polarizations(cfg)
    p_dot = float(p1 @ p2)

    xs = tdcs_basic(amps, kin)
    tdcs_val = tdcs_polarized(amps, p_dot, kin)
    td, te = complex(amps.t_d), complex(amps.t_e)

    m1, m2 = float(np.linalg.norm(p1)), float(np.linalg.norm(p2))
    pure = abs(m1 - 1.0) < 1e-12 and abs(m2 - 1.0) < 1e-12
    closed: float | None
    if td == 0.0 and te == 0.0:
        closed, woot, eof = 0.0, 0.0, 0.0
        s_vn = s_lin = 0.0
        chsh = 0.0
    else:
        one_unpol = (m1 == 0.0 and abs(m2 - 1.0) < 1e-12) or (
            m2 == 0.0 and abs(m1 - 1.0) < 1e-12
        )
        if pure:
            closed = concurrence_pure_closed(amps, p1, p2)
        elif m1 == 0.0 and m2 == 0.0:
            closed = concurrence_unpolarized(amps)
        elif one_unpol:
            closed = min(
                1.0, abs(td) * abs(te) / (abs(td) ** 2 + abs(te) ** 2 - (td * te.conjugate()).real)
            )
        else:
            closed = None  # no closed form for general partial polarization
        rho = rho_mixed(amps, p1, p2)
        woot = concurrence_wootters(rho)
        eof = entanglement_of_formation(woot)
        red = reduced_density(rho, "first")
        s_vn = von_neumann_entropy(red)
        s_lin = linear_entropy(red)
        chsh = chsh_expectation(rho)

    i_anti, i_par = xs.i_anti, xs.i_par
    bell_lhs = (
        bell_lhs_cross_sections(i_anti, i_par, p1, p2) if i_anti + i_par > 0.0 else 0.0
    )
    asym = spin_asymmetry(i_anti, i_par) if i_anti + i_par > 0.0 else 0.0

    report = {
        "model": cfg.model,
        "scenario": cfg.scenario,
        "theta_a_deg": args.theta_a,
        "theta_b_deg": args.theta_b,
        "energies_ev": {
            "e0": kin.e0 * HARTREE_EV,
            "e_a": kin.e_a * HARTREE_EV,
            "e_b": kin.e_b * HARTREE_EV,
            "e_t": kin.e_t * HARTREE_EV,
        },
        "amplitudes": {
            "t_d": {"re": td.real, "im": td.imag},
            "t_e": {"re": te.real, "im": te.imag},
        },
        "tdcs": {
            "scenario_tdcs": tdcs_val,
            "i_par": xs.i_par,
            "i_anti_direct": xs.i_anti_d,
            "i_anti_exchange": xs.i_anti_e,
            "i_anti": xs.i_anti,
            "i_singlet": xs.i_s,
            "i_triplet": xs.i_t,
        },
        "concurrence": {"closed_form": closed, "wootters": woot},
        "entanglement_of_formation": eof,
        "entropy": {"von_neumann": s_vn, "linear": s_lin},
        "chsh": {
            "expectation": chsh,
            "bell_lhs": bell_lhs,
            "violated": bell_lhs > RATIO_BOUND,
        },
        "asymmetry": {"value": asym, "violated": asym > RATIO_BOUND},
    }
    if est is not None:
        report["amplitudes"]["t_d"]["stderr_re"] = est.stderr_d_re
        report["amplitudes"]["t_d"]["stderr_im"] = est.stderr_d_im
        report["amplitudes"]["t_e"]["stderr_re"] = est.stderr_e_re
        report["amplitudes"]["t_e"]["stderr_im"] = est.stderr_e_im
    print(json.dumps(report, indent=2, default=_json_default))
    return EXIT_OK


def cmd_scan(args) -> int:
    cfg = _load_cfg(args)
    records = run_scan(cfg, workers=args.workers)
    os.makedirs(cfg.output_dir, exist_ok=True)
    write_csv(records, os.path.join(cfg.output_dir, "records.csv"))
    grids = records_to_grids(records)
    for name in ("tdcs", "concurrence", "eof", "bell_lhs", "asymmetry"):
        write_pgm(grids[name], os.path.join(cfg.output_dir, f"{name}.pgm"))
    n = int(math.isqrt(len(records)))
    print(f"scan complete: {n}x{n} grid, model {cfg.model}, scenario {cfg.scenario}")
    print(f"wrote records.csv and 5 PGM maps to {cfg.output_dir}")
    return EXIT_OK


def cmd_bell_sim(args) -> int:
    cfg = _load_cfg(args)
    kin = _point_kinematics(cfg, args.theta_a, args.theta_b)
    amps, _ = _point_amplitudes(cfg, kin)
    p1, p2 = resolve_polarizations(cfg)
    rho = rho_mixed(amps, p1, p2)
    result = bellsim.simulate_chsh(rho, args.n_per_setting, cfg.mc.seed)
    report = {
        "model": cfg.model,
        "scenario": cfg.scenario,
        "theta_a_deg": args.theta_a,
        "theta_b_deg": args.theta_b,
        "n_per_setting": args.n_per_setting,
        "seed": cfg.mc.seed,
        "counts": [
            {"pp": c.n_pp, "pm": c.n_pm, "mp": c.n_mp, "mm": c.n_mm}
            for c in result["counts"]
        ],
        "correlators": result["correlators"],
        "chsh_estimate": result["chsh_estimate"],
        "chsh_stderr": result["chsh_stderr"],
        "chsh_exact": result["chsh_exact"],
        "violated": result["chsh_estimate"] > 2.0,
    }
    print(json.dumps(report, indent=2, default=_json_default))
    return EXIT_OK


def cmd_validate(args) -> int:
    results = run_all_suites(mc_samples=args.mc_samples, seed=args.seed or 0)
    for res in results:
        print(res.line())
    if all(r.passed for r in results):
        print(f"all {len(results)} suites passed")
        return EXIT_OK
    failed = sum(1 for r in results if not r.passed)
    print(f"{failed} of {len(results)} suites FAILED")
    return EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="e2espin",
        description="Spin entanglement and TDCS observables for (e,2e) ionization of hydrogen",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, thetas=False):
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--model", choices=("pwba", "c3"), help="override the amplitude model")
        p.add_argument("--seed", type=int, help="override the Monte Carlo seed")
        if thetas:
            p.add_argument("--theta-a", type=float, required=True, help="degrees")
            p.add_argument("--theta-b", type=float, required=True, help="degrees")

    p_point = sub.add_parser("point", help="observables at one angle pair")
    add_common(p_point, thetas=True)
    p_point.set_defaults(func=cmd_point)

    p_scan = sub.add_parser("scan", help="full angle-grid scan with CSV/PGM output")
    add_common(p_scan)
    p_scan.add_argument("--output-dir", help="directory for records.csv and PGM maps")
    p_scan.add_argument("--workers", type=int, default=1, help="parallel grid workers")
    p_scan.set_defaults(func=cmd_scan)

    p_sim = sub.add_parser("bell-sim", help="simulated CHSH coincidence run at one point")
    add_common(p_sim, thetas=True)
    p_sim.add_argument("--n-per-setting", type=int, default=100_000)
    p_sim.set_defaults(func=cmd_bell_sim)

    p_val = sub.add_parser("validate", help="run all oracle cross-check suites")
    p_val.add_argument("--mc-samples", type=int, default=200_000)
    p_val.add_argument("--seed", type=int, default=0)
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, ValueError, DegenerateStateError) as exc:
        print(f"numeric/model error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
