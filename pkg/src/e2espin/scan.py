"""Angle-grid scans of TDCS and entanglement observables, with file output.

A scan evaluates, on a square (theta_A, theta_B) grid, the
spin-unresolved TDCS for the configured initial polarizations together
with the pair concurrence, entanglement of formation, the
cross-section form of Bell's inequality and the spin asymmetry.
Points whose TDCS falls below ``threshold_frac`` times the grid
maximum are flagged unmeasurable, mimicking a detection threshold: an
experiment sees zeros there no matter what the entanglement measures
do.

Polarization scenarios
----------------------
perp            P1 = z, P2 = x (fully polarized, perpendicular)
antiparallel    P1 = z, P2 = -z (fully polarized)
one_unpolarized P1 = z, P2 = 0
unpolarized     P1 = P2 = 0
custom          explicit P1, P2 with |P| <= 1

Fully polarized scenarios use the pure-state closed forms; mixed ones
go through the Wootters concurrence of the averaged density matrix.

Output files are deterministic byte for byte: numbers are written in
shortest round-trip decimal form, grid points are processed with
per-point derived random seeds, and assembly is ordered no matter how
many workers run the grid.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import c3mc
from .amplitudes import McConfig, pwba_grid
from .entanglement import wootters_batch
from .kinematics import HARTREE_EV, build_coplanar, tdcs_prefactor
from .spin import _branch_kernels

__all__ = [
    "ConfigError",
    "ScanConfig",
    "ScanRecord",
    "SCENARIOS",
    "load_config",
    "parse_config",
    "resolve_polarizations",
    "amplitude_grids",
    "observables_from_amplitudes",
    "run_scan",
    "records_to_grids",
    "write_csv",
    "write_pgm",
]

SCENARIOS = ("perp", "antiparallel", "one_unpolarized", "unpolarized", "custom")

# per-point samples used when a scan config does not set mc.samples:
# full-budget single points are fine at 1e7, but a 181x181 grid is not
_SCAN_MC_SAMPLES = 200_000


class ConfigError(ValueError):
    """A scan configuration file is invalid."""


@dataclass(frozen=True)
class ScanConfig:
    model: str = "pwba"
    e0_ev: float = 54.4
    equal_sharing: bool = True
    eb_ev: float | None = None
    et_ev: float = -13.605693
    scenario: str = "unpolarized"
    p1: tuple | None = None
    p2: tuple | None = None
    theta_min_deg: float = -180.0
    theta_max_deg: float = 180.0
    step_deg: float = 2.0
    threshold_frac: float = 0.05
    mc: McConfig = field(default_factory=lambda: McConfig(samples=_SCAN_MC_SAMPLES))
    output_dir: str = "."

    def energies_hartree(self) -> tuple[float, float, float]:
        """(e0, e_b, e_t) in hartree."""
        e0 = self.e0_ev / HARTREE_EV
        et = self.et_ev / HARTREE_EV
        if self.eb_ev is not None:
            eb = self.eb_ev / HARTREE_EV
        else:
            eb = 0.5 * (e0 + et)
        return e0, eb, et

    def grid_deg(self) -> np.ndarray:
        n = int(round((self.theta_max_deg - self.theta_min_deg) / self.step_deg))
        return self.theta_min_deg + self.step_deg * np.arange(n + 1)


@dataclass(frozen=True)
class ScanRecord:
    theta_a_deg: float
    theta_b_deg: float
    tdcs: float
    concurrence: float
    eof: float
    bell_lhs: float
    asymmetry: float
    measurable: bool
    tdcs_stderr: float | None = None


_TOP_KEYS = {
    "model", "e0_ev", "equal_sharing", "eb_ev", "et_ev", "scenario", "p1", "p2",
    "theta_min_deg", "theta_max_deg", "step_deg", "threshold_frac", "mc", "output_dir",
}
_MC_KEYS = {"samples", "seed", "lambda1", "r_max", "debug_free_limit"}


def _require(cond: bool, msg: str):
    if not cond:
        raise ConfigError(msg)


def parse_config(data: dict) -> ScanConfig:
    """Validate a configuration mapping and apply defaults."""
    _require(isinstance(data, dict), "configuration must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    _require(not unknown, f"unknown configuration key(s): {', '.join(sorted(unknown))}")

    mc_data = data.get("mc", {})
    _require(isinstance(mc_data, dict), "mc must be an object")
    unknown = set(mc_data) - _MC_KEYS
    _require(not unknown, f"unknown mc key(s): {', '.join(sorted(unknown))}")
    mc_defaults = {"samples": _SCAN_MC_SAMPLES, "seed": 0, "lambda1": 1.0,
                   "r_max": 14.0, "debug_free_limit": False}
    mc_defaults.update(mc_data)
    try:
        mc = McConfig(**mc_defaults).validated()
    except ValueError as exc:
        raise ConfigError(f"mc: {exc}") from exc

    cfg = ScanConfig(
        model=data.get("model", "pwba"),
        e0_ev=float(data.get("e0_ev", 54.4)),
        equal_sharing=bool(data.get("equal_sharing", "eb_ev" not in data)),
        eb_ev=None if data.get("eb_ev") is None else float(data["eb_ev"]),
        et_ev=float(data.get("et_ev", -13.605693)),
        scenario=data.get("scenario", "unpolarized"),
        p1=None if data.get("p1") is None else tuple(float(x) for x in data["p1"]),
        p2=None if data.get("p2") is None else tuple(float(x) for x in data["p2"]),
        theta_min_deg=float(data.get("theta_min_deg", -180.0)),
        theta_max_deg=float(data.get("theta_max_deg", 180.0)),
        step_deg=float(data.get("step_deg", 2.0)),
        threshold_frac=float(data.get("threshold_frac", 0.05)),
        mc=mc,
        output_dir=str(data.get("output_dir", ".")),
    )

    _require(cfg.model in ("pwba", "c3"), f"model must be 'pwba' or 'c3', got {cfg.model!r}")
    _require(cfg.e0_ev > 0.0, f"e0_ev must be positive, got {cfg.e0_ev}")
    _require(cfg.et_ev < 0.0, f"et_ev must be negative (bound state), got {cfg.et_ev}")
    if cfg.eb_ev is not None:
        _require(not cfg.equal_sharing,
                 "eb_ev fixes the energy sharing: set equal_sharing to false or omit it")
        _require(cfg.eb_ev > 0.0, f"eb_ev must be positive, got {cfg.eb_ev}")
    e0, eb, et = cfg.energies_hartree()
    _require(e0 + et - eb > 0.0, "closed channel: e0 + et - eb must be positive")
    _require(cfg.scenario in SCENARIOS,
             f"scenario must be one of {SCENARIOS}, got {cfg.scenario!r}")
    if cfg.scenario == "custom":
        _require(cfg.p1 is not None and cfg.p2 is not None,
                 "custom scenario requires p1 and p2")
        for name, p in (("p1", cfg.p1), ("p2", cfg.p2)):
            _require(len(p) == 3, f"{name} must be a 3-vector")
            _require(math.sqrt(sum(x * x for x in p)) <= 1.0 + 1e-12,
                     f"{name} must have magnitude <= 1")
    else:
        _require(cfg.p1 is None and cfg.p2 is None,
                 "p1/p2 are only valid with the custom scenario")
    _require(cfg.theta_max_deg > cfg.theta_min_deg,
             "theta_max_deg must exceed theta_min_deg")
    _require(cfg.step_deg > 0.0, f"step_deg must be positive, got {cfg.step_deg}")
    span = cfg.theta_max_deg - cfg.theta_min_deg
    n = round(span / cfg.step_deg)
    _require(n >= 1 and abs(n * cfg.step_deg - span) < 1e-9,
             "step_deg must divide the theta range")
    _require(0.0 <= cfg.threshold_frac <= 1.0,
             f"threshold_frac must be in [0, 1], got {cfg.threshold_frac}")
    return cfg


def load_config(path) -> ScanConfig:
    """Load and validate a JSON scan configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"configuration file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return parse_config(data)


def resolve_polarizations(cfg: ScanConfig) -> tuple[np.ndarray, np.ndarray]:
    """Initial polarization vectors (P1, P2) for the configured scenario."""
    if cfg.scenario == "perp":
        return np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0])
    if cfg.scenario == "antiparallel":
        return np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0])
    if cfg.scenario == "one_unpolarized":
        return np.array([0.0, 0.0, 1.0]), np.zeros(3)
    if cfg.scenario == "unpolarized":
        return np.zeros(3), np.zeros(3)
    return np.asarray(cfg.p1, dtype=float), np.asarray(cfg.p2, dtype=float)


def _c3_amplitude_grid(cfg: ScanConfig, thetas_rad: np.ndarray, workers: int):
    """Per-point 3C amplitudes and TDCS-gradient covariances."""
    e0, eb, et = cfg.energies_hartree()
    n = len(thetas_rad)
    td = np.zeros((n, n), dtype=complex)
    te = np.zeros((n, n), dtype=complex)
    covs = np.zeros((n, n, 4, 4))

    def do_point(idx):
        i, j = divmod(idx, n)
        kin = build_coplanar(e0, eb, float(thetas_rad[i]), float(thetas_rad[j]), et)
        est = c3mc.c3_pair(kin, cfg.mc, point_key=idx)
        return idx, est

    indices = range(n * n)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(do_point, indices)
            for idx, est in results:
                i, j = divmod(idx, n)
                td[i, j] = est.t_d
                te[i, j] = est.t_e
                covs[i, j] = est.cov
    else:
        for idx in indices:
            i, j = divmod(idx, n)
            _, est = do_point(idx)
            td[i, j] = est.t_d
            te[i, j] = est.t_e
            covs[i, j] = est.cov
    return td, te, covs


def _concurrence_grid(td, te, p1, p2) -> np.ndarray:
    """Pointwise pair concurrence for polarizations (P1, P2).

    Pure closed form when both polarizations are unit vectors, batched
    Wootters concurrence of the averaged density matrix otherwise.
    """
    m1 = float(np.linalg.norm(p1))
    m2 = float(np.linalg.norm(p2))
    ab2 = np.abs(td) ** 2 + np.abs(te) ** 2
    re = (td * np.conj(te)).real
    alive = ab2 > 0.0
    out = np.zeros(td.shape)
    if abs(m1 - 1.0) < 1e-12 and abs(m2 - 1.0) < 1e-12:
        dot = float(p1 @ p2)
        u = ab2 - re * (1.0 + dot)
        good = alive & (u > 1e-14 * ab2)
        out[good] = np.abs(td[good]) * np.abs(te[good]) * (1.0 - dot) / u[good]
        return np.clip(out, 0.0, 1.0)
    k1, k2, k3 = _branch_kernels(p1, p2)
    tdv = td[alive].ravel()
    tev = te[alive].ravel()
    rhos = (
        (np.abs(tdv) ** 2)[:, None, None] * k1
        + (np.abs(tev) ** 2)[:, None, None] * k2
        - (tdv * np.conj(tev))[:, None, None] * k3
        - (np.conj(tdv) * tev)[:, None, None] * k3.conj().T
    )
    tr = np.trace(rhos, axis1=1, axis2=2).real
    ok = tr > 0.0
    c = np.zeros(len(tdv))
    c[ok] = wootters_batch(rhos[ok] / tr[ok, None, None])
    out[alive] = c
    return out


def _eof_grid(c: np.ndarray) -> np.ndarray:
    x = 0.5 * (1.0 + np.sqrt(np.clip(1.0 - c * c, 0.0, None)))
    out = np.zeros_like(c)
    inner = (x > 0.0) & (x < 1.0)
    xi = x[inner]
    out[inner] = -xi * np.log2(xi) - (1.0 - xi) * np.log2(1.0 - xi)
    return out


def amplitude_grids(cfg: ScanConfig, workers: int = 1):
    """Amplitude arrays (t_d, t_e, covariances) on the configured grid.

    The covariance array is None for the analytic Born model.  The
    grids do not depend on the polarization scenario, so one evaluation
    can feed several scenario assemblies.
    """
    thetas_rad = np.deg2rad(cfg.grid_deg())
    e0, eb, et = cfg.energies_hartree()
    if cfg.model == "pwba":
        td, te = pwba_grid(e0, eb, et, thetas_rad, thetas_rad)
        return td, te, None
    return _c3_amplitude_grid(cfg, thetas_rad, workers)


def observables_from_amplitudes(cfg: ScanConfig, td, te, covs=None) -> list[ScanRecord]:
    """Assemble scenario observables and masking from amplitude grids."""
    thetas_deg = cfg.grid_deg()
    e0, eb, et = cfg.energies_hartree()
    p1, p2 = resolve_polarizations(cfg)
    p_dot = float(p1 @ p2)
    p1y_p2y = float(p1[1] * p2[1])

    kin0 = build_coplanar(e0, eb, 0.0, math.radians(90.0), et)
    pref = tdcs_prefactor(kin0)  # equal energies everywhere on the grid

    ab2 = np.abs(td) ** 2 + np.abs(te) ** 2
    re = (td * np.conj(te)).real
    i_anti = pref * ab2
    i_par = pref * np.abs(td - te) ** 2
    tdcs = pref * (ab2 - (1.0 + p_dot) * re)

    num = i_anti * (1.0 - p_dot) - i_par * (1.0 - p1y_p2y)
    den = i_anti * (1.0 - p_dot) + i_par * (1.0 + p_dot)
    flux = den > 0.0
    bell_lhs = np.where(flux, num, 0.0) / np.where(flux, den, 1.0)

    den_a = i_anti + i_par
    has_flux = den_a > 0.0
    asym = np.where(has_flux, i_anti - i_par, 0.0) / np.where(has_flux, den_a, 1.0)

    conc = _concurrence_grid(td, te, p1, p2)
    eof = _eof_grid(conc)

    tdcs_err = None
    if covs is not None:
        c = 1.0 + p_dot
        grad = pref * np.stack(
            [
                2.0 * td.real - c * te.real,
                2.0 * td.imag - c * te.imag,
                2.0 * te.real - c * td.real,
                2.0 * te.imag - c * td.imag,
            ],
            axis=-1,
        )
        var = np.einsum("ija,ijab,ijb->ij", grad, covs, grad)
        tdcs_err = np.sqrt(np.clip(var, 0.0, None))

    grid_max = float(tdcs.max())
    threshold = cfg.threshold_frac * grid_max
    measurable = tdcs >= threshold if grid_max > 0.0 else np.zeros_like(tdcs, dtype=bool)

    records = []
    n = len(thetas_deg)
    for i in range(n):
        for j in range(n):
            records.append(
                ScanRecord(
                    theta_a_deg=float(thetas_deg[i]),
                    theta_b_deg=float(thetas_deg[j]),
                    tdcs=float(tdcs[i, j]),
                    concurrence=float(conc[i, j]),
                    eof=float(eof[i, j]),
                    bell_lhs=float(bell_lhs[i, j]),
                    asymmetry=float(asym[i, j]),
                    measurable=bool(measurable[i, j]),
                    tdcs_stderr=None if tdcs_err is None else float(tdcs_err[i, j]),
                )
            )
    return records


def run_scan(cfg: ScanConfig, workers: int = 1) -> list[ScanRecord]:
    """Evaluate all observables on the configured angle grid.

    The result is ordered theta_A-major ascending and is independent of
    ``workers`` (grid points use seeds derived from their index).
    """
    td, te, covs = amplitude_grids(cfg, workers)
    return observables_from_amplitudes(cfg, td, te, covs)


def write_csv(records, path):
    """Write scan records as CSV (theta_A-major, shortest round-trip floats)."""
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    with_err = records[0].tdcs_stderr is not None
    header = "theta_a_deg,theta_b_deg,tdcs,concurrence,eof,bell_lhs,asymmetry,measurable"
    if with_err:
        header += ",tdcs_stderr"
    lines = [header]
    for r in records:
        row = [
            repr(float(r.theta_a_deg)),
            repr(float(r.theta_b_deg)),
            repr(float(r.tdcs)),
            repr(float(r.concurrence)),
            repr(float(r.eof)),
            repr(float(r.bell_lhs)),
            repr(float(r.asymmetry)),
            "true" if r.measurable else "false",
        ]
        if with_err:
            row.append(repr(float(r.tdcs_stderr)))
        lines.append(",".join(row))
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def write_pgm(field2d, path):
    """Write a grid as a plain (P2) PGM image, linearly scaled to the max.

    Width is the number of theta_B points, height the number of theta_A
    points (row 0 = theta_min).  Pixels are round(255 * value / max);
    masked or negative values map to 0.  The byte stream is exactly
    reproducible: one LF-separated token per line.
    """
    a = np.asarray(field2d, dtype=float)
    if a.ndim != 2:
        raise ValueError("PGM field must be a 2-D grid")
    peak = float(a.max()) if a.size else 0.0
    if peak > 0.0:
        pix = np.rint(255.0 * np.clip(a, 0.0, None) / peak).astype(int)
        pix = np.clip(pix, 0, 255)
    else:
        pix = np.zeros_like(a, dtype=int)
    tokens = ["P2", str(a.shape[1]), str(a.shape[0]), "255"]
    tokens.extend(str(int(v)) for v in pix.ravel())
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(tokens) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write PGM to {path}: {exc}") from exc


def records_to_grids(records) -> dict:
    """Reshape a record list into named 2-D grids (masked fields zeroed)."""
    records = list(records)
    n = int(round(math.sqrt(len(records))))
    if n * n != len(records):
        raise ValueError("record list does not form a square grid")
    mask = np.array([r.measurable for r in records]).reshape(n, n)
    out = {"measurable": mask}
    for name in ("tdcs", "concurrence", "eof", "bell_lhs", "asymmetry"):
        grid = np.array([getattr(r, name) for r in records]).reshape(n, n)
        out[name] = np.where(mask, grid, 0.0)
    return out
