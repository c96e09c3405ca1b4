"""Experiment configs, figure presets, sweep runners and CSV/manifest output.

A JSON config file (schema version 1, unknown keys rejected) fully
determines a run.  Output of record is RFC-4180 CSV with LF line endings and
17-significant-digit floats (exact round-trip); a JSON manifest captures the
resolved config and package version.  SVG plots are optional decoration.

CSV layouts (fields not applicable to a row are left empty):

* spectrum:      case, delta_Gamma0, T, R, T_stderr, R_stderr
* peaks:         case, sweep_quantity, sweep_value, gamma_plus_Gamma_Gamma0,
                 peak_minus_Gamma0, peak_plus_Gamma0, T_min_minus, T_min_plus,
                 delta_peak_Gamma0, D, n_peaks
* localization:  <base>_lnT.csv: case, sweep_quantity, sweep_value, n_dimers,
                 mean_lnT, stderr_lnT, mean_T, realizations
                 <base>_fit.csv: case, sweep_quantity, sweep_value, xi_dimers,
                 xi_stderr, slope, intercept, r_squared,
                 xi_quadrature_dimers, ln_tau_sq_quadrature
"""
from __future__ import annotations

import copy
import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
from scipy.optimize import minimize_scalar

from . import __version__, bidirectional, chiral
from .disorder import DisorderModel, _check_j_mode, ensemble_lnT, estimate_localization
from .errors import ConfigError
from .model import (CouplingParams, anchored_prefactor, build_periodic_chain,
                    dipole_coupling, phase_between)
from .rng import truncated_normal_field

__all__ = [
    "CONFIG_SCHEMA",
    "ExperimentConfig",
    "RunReport",
    "load_config",
    "preset_names",
    "preset_path",
    "run_spectrum",
    "run_peak_analysis",
    "run_localization",
]

_GRID = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "start": {"type": "number"},
        "stop": {"type": "number"},
        "points": {"type": "integer", "minimum": 1},
        "values": {"type": "array", "items": {"type": "number"}, "minItems": 1},
    },
}

_PARAMS = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "gamma": {"type": "number", "minimum": 0},
        "Gamma": {"type": "number", "minimum": 0},
        "lambda_qd_nm": {"type": "number", "exclusiveMinimum": 0},
        "J": {"type": "number"},
        "J_anchor": {"type": "number"},
        "J_prefactor": {"type": "number"},
    },
}

_DISORDER = {
    "type": ["object", "null"],
    "additionalProperties": False,
    "properties": {
        "target": {"enum": ["dimer_length", "dimer_separation"]},
        "sigma": {"type": "number", "minimum": 0},
        "sigma_units": {"enum": ["length_nm", "phase_radians"]},
        "mean": {"type": "number"},
        "couple_J_to_length": {"type": "boolean"},
        "realizations": {"type": "integer", "minimum": 1},
    },
}

_CASE = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "label": {"type": "string"},
        "params": _PARAMS,
        "geometry": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dimers": {"type": "integer", "minimum": 1},
                "length_nm": {"type": "number", "exclusiveMinimum": 0},
                "separation_nm": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "disorder": _DISORDER,
    },
    "required": ["label"],
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema", "waveguide", "geometry", "params"],
    "properties": {
        "schema": {"const": 1},
        "name": {"type": "string"},
        "command": {"enum": ["spectrum", "peaks", "localization"]},
        "waveguide": {"enum": ["chiral", "bidirectional"]},
        "geometry": {
            "type": "object",
            "additionalProperties": False,
            "required": ["dimers", "length_nm", "separation_nm"],
            "properties": {
                "dimers": {"type": "integer", "minimum": 1},
                "length_nm": {"type": "number", "exclusiveMinimum": 0},
                "separation_nm": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "params": {**_PARAMS, "required": ["gamma", "Gamma", "lambda_qd_nm"]},
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "required": ["quantity"],
            "properties": {
                "quantity": {"enum": ["delta", "sigma", "J", "Gamma", "gamma"]},
                "start": {"type": "number"},
                "stop": {"type": "number"},
                "points": {"type": "integer", "minimum": 1},
                "values": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                "lengths_nm": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                "anchor_J": {"type": "number"},
                "anchor_length_nm": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "delta": {"type": "number"},
        "n_values": {"type": "array", "items": {"type": "integer", "minimum": 1},
                     "minItems": 1},
        "disorder": _DISORDER,
        "peaks": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "scan_start": {"type": "number"},
                "scan_stop": {"type": "number"},
                "scan_points": {"type": "integer", "minimum": 3},
            },
        },
        "cases": {"type": "array", "items": _CASE, "minItems": 1},
        "seed": {"type": "integer", "minimum": 0},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"basename": {"type": "string"}},
        },
    },
}


def preset_names():
    """Names of the figure presets shipped with the package."""
    pkg = resources.files("dimerchain") / "presets"
    return sorted(p.name[:-5] for p in pkg.iterdir() if p.name.endswith(".json"))


def preset_path(name):
    p = resources.files("dimerchain") / "presets" / f"{name}.json"
    if not p.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return p


def load_config(source):
    """Load and schema-validate a config from a path, preset name, or dict."""
    if isinstance(source, dict):
        raw = copy.deepcopy(source)
        origin = "<dict>"
    else:
        path = Path(source)
        if not path.is_file() and str(source).isidentifier():
            path = preset_path(str(source))
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {source}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {source} is not valid JSON: {exc}") from exc
        origin = str(path)
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config {origin} failed validation: {exc.message}") from exc
    _validate_semantics(raw, origin)
    return ExperimentConfig(raw=raw, origin=origin)


def _validate_semantics(raw, origin):
    j_keys = [k for k in ("J", "J_anchor", "J_prefactor") if k in raw["params"]]
    if len(j_keys) != 1:
        raise ConfigError(f"config {origin}: params needs exactly one of J, J_anchor, "
                          f"J_prefactor (got {j_keys})")
    sweep = raw.get("sweep")
    if sweep is not None:
        has_grid = all(k in sweep for k in ("start", "stop", "points"))
        has_values = "values" in sweep or "lengths_nm" in sweep
        if not (has_grid or has_values):
            raise ConfigError(f"config {origin}: sweep needs start/stop/points or values")
        if "lengths_nm" in sweep and sweep["quantity"] != "J":
            raise ConfigError(f"config {origin}: lengths_nm only applies to a J sweep")
    for case in raw.get("cases", []):
        cp = case.get("params", {})
        if len([k for k in ("J", "J_anchor", "J_prefactor") if k in cp]) > 1:
            raise ConfigError(f"config {origin}: case {case['label']!r} sets multiple J modes")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description plus derived model objects."""

    raw: dict
    origin: str = "<dict>"

    @property
    def name(self):
        return self.raw.get("name", "run")

    @property
    def waveguide(self):
        return self.raw["waveguide"]

    @property
    def seed(self):
        return int(self.raw.get("seed", 0))

    @property
    def basename(self):
        return self.raw.get("output", {}).get("basename", self.name)

    def cases(self):
        """Expand into (label, effective-config-dict) pairs."""
        base = {k: copy.deepcopy(self.raw.get(k)) for k in
                ("waveguide", "geometry", "params", "disorder", "delta", "n_values")}
        out = []
        for case in self.raw.get("cases", [{"label": self.name}]):
            eff = copy.deepcopy(base)
            if "geometry" in case:
                eff["geometry"].update(case["geometry"])
            if "params" in case:
                merged = dict(eff["params"])
                if any(k in case["params"] for k in ("J", "J_anchor", "J_prefactor")):
                    for k in ("J", "J_anchor", "J_prefactor"):
                        merged.pop(k, None)
                merged.update(case["params"])
                eff["params"] = merged
            if "disorder" in case:
                if case["disorder"] is None:
                    eff["disorder"] = None
                else:
                    eff["disorder"] = {**(eff["disorder"] or {}), **case["disorder"]}
            out.append((case["label"], eff))
        return out


def _coupling_params(eff):
    p = eff["params"]
    lam = p["lambda_qd_nm"]
    kwargs = {}
    if "J" in p:
        kwargs["J"] = p["J"]
    elif "J_anchor" in p:
        kwargs["j_prefactor"] = anchored_prefactor(p["J_anchor"], eff["geometry"]["length_nm"], lam)
    else:
        kwargs["j_prefactor"] = p["J_prefactor"]
    if eff["waveguide"] == "chiral":
        return CouplingParams.chiral(p["gamma"], p["Gamma"], lam, **kwargs)
    return CouplingParams.symmetric(p["gamma"], p["Gamma"], lam, **kwargs)


def _disorder_model(eff, sigma_override=None):
    d = eff.get("disorder")
    if d is None:
        return None
    lam = eff["params"]["lambda_qd_nm"]
    geo = eff["geometry"]
    base_nm = geo["length_nm"] if d["target"] == "dimer_length" else geo["separation_nm"]
    units = d.get("sigma_units", "length_nm")
    if "mean" in d:
        mean = d["mean"]
    else:
        mean = base_nm if units == "length_nm" else 2.0 * math.pi * base_nm / lam
    return DisorderModel(
        target=d["target"], mean=mean,
        sigma=d["sigma"] if sigma_override is None else sigma_override,
        sigma_units=units,
        couple_J_to_length=d.get("couple_J_to_length", False),
    )


def _grid_values(spec):
    if "values" in spec:
        return [float(v) for v in spec["values"]]
    return list(np.linspace(spec["start"], spec["stop"], spec["points"]))


@dataclass
class RunReport:
    """What a runner produced, for the CLI to report on."""

    csv_paths: list = field(default_factory=list)
    svg_paths: list = field(default_factory=list)
    manifest_path: Path | None = None
    sentinel_count: int = 0


def _fmt(value):
    if value is None or value == "":
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_csv(path, header, rows):
    sentinels = 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            for v in row:
                if isinstance(v, (float, np.floating)) and not math.isfinite(v):
                    sentinels += 1
            writer.writerow([_fmt(v) for v in row])
    return sentinels


def _write_manifest(out_dir, basename, command, config, seed, threads, outputs):
    manifest = {
        "command": command,
        "package": "dimerchain",
        "version": __version__,
        "seed": seed,
        "threads": threads,
        "config": config.raw,
        "config_origin": config.origin,
        "outputs": [str(Path(p).name) for p in outputs],
    }
    path = Path(out_dir) / f"{basename}_manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


def _consistent_j_mode(model, params, label):
    if model is None:
        return
    try:
        _check_j_mode(model, params)
    except ValueError as exc:
        raise ConfigError(f"case {label!r}: {exc}") from exc


def _spectrum_case(label, eff, deltas, seed, threads):
    """Rows for one case of a spectrum run."""
    geo = build_periodic_chain(eff["geometry"]["dimers"], eff["geometry"]["length_nm"],
                               eff["geometry"]["separation_nm"])
    params = _coupling_params(eff)
    model = _disorder_model(eff)
    _consistent_j_mode(model, params, label)
    lam = params.lambda_qd
    k = 2.0 * math.pi / lam
    n = geo.dimer_count
    chiral_wg = eff["waveguide"] == "chiral"

    if model is None:
        J = params.dimer_couplings(geo)[None, :]
        theta = (k * geo.dimer_lengths)[None, :]
        rows = []
        if chiral_wg:
            for d in deltas:
                lnT = chiral.lnT_chain_batch(d, params.gamma, params.Gamma_R, J, theta)
                T = float(np.exp(lnT[0]))
                rows.append([label, d, T, 0.0, 0.0, 0.0])
        else:
            spans = (k * (geo.dimer_lengths[:-1] + geo.dimer_separations))[None, :] \
                if n > 1 else np.zeros((1, 0))
            for d in deltas:
                lnT, T, R = bidirectional.cascade_batch(
                    d, params.gamma, params.Gamma_R, J, theta, spans)
                rows.append([label, d, float(T[0]), float(R[0]), 0.0, 0.0])
        return rows

    # disordered spectrum: same realization set at every detuning
    reals = int(eff["disorder"].get("realizations", 500))
    mean_nm = model.mean_nm(lam)
    sigma_nm = model.sigma_nm(lam)
    if model.target == "dimer_length":
        lengths, _ = (truncated_normal_field(seed, reals, n, mean_nm, sigma_nm)
                      if sigma_nm > 0 else (np.full((reals, n), mean_nm), 0))
        seps = np.full((reals, n - 1), eff["geometry"]["separation_nm"])
    else:
        lengths = np.full((reals, n), eff["geometry"]["length_nm"])
        seps, _ = (truncated_normal_field(seed, reals, n - 1, mean_nm, sigma_nm)
                   if (sigma_nm > 0 and n > 1) else (np.full((reals, n - 1), mean_nm), 0))
    J = params.coupling_of_length(lengths) if params.J is None \
        else np.full((reals, n), float(params.J))
    theta = k * lengths
    spans = k * (lengths[:, :-1] + seps)

    out = [None] * len(deltas)

    def work(i):
        d = deltas[i]
        if chiral_wg:
            lnT = chiral.lnT_chain_batch(d, params.gamma, params.Gamma_R, J, theta)
            T = np.exp(np.minimum(lnT, 0.0))
            R = np.zeros_like(T)
        else:
            _, T, R = bidirectional.cascade_batch(
                d, params.gamma, params.Gamma_R, J, theta, spans)
        se = 1.0 / math.sqrt(reals) if reals > 1 else 0.0
        out[i] = [label, d, float(np.mean(T)), float(np.mean(R)),
                  float(np.std(T, ddof=1) * se) if reals > 1 else 0.0,
                  float(np.std(R, ddof=1) * se) if reals > 1 else 0.0]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(len(deltas))))
    else:
        for i in range(len(deltas)):
            work(i)
    return out


def run_spectrum(config: ExperimentConfig, out_dir, *, plot=False, threads=1, seed=None):
    """Transmission (and reflection) against detuning; disordered if configured."""
    sweep = config.raw.get("sweep")
    if sweep is None or sweep["quantity"] != "delta":
        raise ConfigError("spectrum runs need a delta sweep block")
    deltas = _grid_values(sweep)
    seed = config.seed if seed is None else int(seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for label, eff in config.cases():
        rows.extend(_spectrum_case(label, eff, deltas, seed, threads))
    header = ["case", "delta_Gamma0", "T", "R", "T_stderr", "R_stderr"]
    csv_path = out_dir / f"{config.basename}_spectrum.csv"
    sentinels = _write_csv(csv_path, header, rows)

    report = RunReport(csv_paths=[csv_path], sentinel_count=sentinels)
    if plot:
        from .plotting import plot_spectrum
        report.svg_paths.append(plot_spectrum(csv_path))
    report.manifest_path = _write_manifest(
        out_dir, config.basename, "spectrum", config, seed, threads,
        report.csv_paths + report.svg_paths)
    return report


def _single_dimer_T(waveguide, params, geo_length, delta):
    theta = phase_between(0.0, geo_length, params.lambda_qd)
    J = float(params.coupling_of_length(geo_length))
    if waveguide == "chiral":
        return abs(chiral.single_dimer_t(delta, params.gamma, params.Gamma_R, J, theta)) ** 2
    t, _ = bidirectional.single_dimer_tr(delta, params.gamma, params.Gamma_R, J, theta)
    return abs(t) ** 2


def find_resonance_peaks(T_of_delta, scan_start, scan_stop, scan_points, xtol=1e-9):
    """Locate interior transmission minima (the resonance peaks) on a grid,
    then refine each with golden-section search."""
    grid = np.linspace(scan_start, scan_stop, scan_points)
    T = np.array([T_of_delta(d) for d in grid])
    peaks = []
    for i in range(1, len(grid) - 1):
        if T[i] < T[i - 1] and T[i] < T[i + 1]:
            res = minimize_scalar(T_of_delta, bracket=(grid[i - 1], grid[i], grid[i + 1]),
                                  method="golden", options={"xtol": xtol})
            peaks.append((float(res.x), float(res.fun)))
    peaks.sort()
    return peaks


def run_peak_analysis(config: ExperimentConfig, out_dir, *, plot=False, threads=1, seed=None):
    """Resonance-peak positions, separation and height difference for a single dimer.

    Peaks are the two transmission minima of the doublet; D is the
    transmission at the negative-detuning peak minus that at the positive one
    (equal resonance depths give D = 0).
    """
    sweep = config.raw.get("sweep")
    if sweep is None or sweep["quantity"] not in ("Gamma", "gamma", "J"):
        raise ConfigError("peak runs sweep one of Gamma, gamma, J")
    if config.raw["geometry"]["dimers"] != 1:
        raise ConfigError("peak analysis is defined for a single dimer")
    scan = config.raw.get("peaks", {})
    lo = scan.get("scan_start", -150.0)
    hi = scan.get("scan_stop", 150.0)
    npts = scan.get("scan_points", 3001)
    values = _grid_values(sweep)
    seed = config.seed if seed is None else int(seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for label, eff in config.cases():
        L = eff["geometry"]["length_nm"]
        for v in values:
            p = dict(eff["params"])
            if sweep["quantity"] == "J":
                for kkey in ("J", "J_anchor", "J_prefactor"):
                    p.pop(kkey, None)
                p["J"] = v
            else:
                p[sweep["quantity"]] = v
            params = _coupling_params({**eff, "params": p})
            peaks = find_resonance_peaks(
                lambda d: _single_dimer_T(eff["waveguide"], params, L, d), lo, hi, npts)
            gsum = params.gamma + params.Gamma_R
            if len(peaks) >= 2:
                two = sorted(sorted(peaks, key=lambda pk: pk[1])[:2])
                (dm, tm), (dp, tp) = two
                rows.append([label, sweep["quantity"], v, gsum, dm, dp, tm, tp,
                             dp - dm, tm - tp, len(peaks)])
            elif len(peaks) == 1:
                rows.append([label, sweep["quantity"], v, gsum, peaks[0][0], "",
                             peaks[0][1], "", "", "", 1])
            else:
                rows.append([label, sweep["quantity"], v, gsum, "", "", "", "", "", "", 0])

    header = ["case", "sweep_quantity", "sweep_value", "gamma_plus_Gamma_Gamma0",
              "peak_minus_Gamma0", "peak_plus_Gamma0", "T_min_minus", "T_min_plus",
              "delta_peak_Gamma0", "D", "n_peaks"]
    csv_path = out_dir / f"{config.basename}_peaks.csv"
    sentinels = _write_csv(csv_path, header, rows)
    report = RunReport(csv_paths=[csv_path], sentinel_count=sentinels)
    if plot:
        from .plotting import plot_peaks
        report.svg_paths.append(plot_peaks(csv_path))
    report.manifest_path = _write_manifest(
        out_dir, config.basename, "peaks", config, seed, threads,
        report.csv_paths + report.svg_paths)
    return report


def _localization_point(eff, model, params, delta, n_values, reals, seed, threads):
    ens = ensemble_lnT(model, params, eff["waveguide"], n_values, reals, seed, delta,
                       base_length=eff["geometry"]["length_nm"],
                       base_separation=eff["geometry"]["separation_nm"],
                       threads=threads)
    est = estimate_localization(ens)
    quad = None
    if (eff["waveguide"] == "chiral" and model.target == "dimer_length"):
        quad = chiral.analytic_disorder_stats(params, model, max(n_values), delta)
    return ens, est, quad


def run_localization(config: ExperimentConfig, out_dir, *, plot=False, threads=1, seed=None):
    """Ensemble ln T profiles and localization-length fits.

    Without a sweep block this produces the ln T vs n profile at the fixed
    detuning; with a sweep (delta, sigma or J) it repeats ensemble + fit per
    sweep value.  For chiral dimer-length disorder the quadrature statistics
    are emitted alongside the Monte Carlo fit.
    """
    if config.raw.get("disorder") is None:
        raise ConfigError("localization runs need a disorder block")
    n_values = config.raw.get("n_values", list(range(10, 101, 10)))
    seed = config.seed if seed is None else int(seed)
    sweep = config.raw.get("sweep")
    if sweep is not None and sweep["quantity"] not in ("delta", "sigma", "J"):
        raise ConfigError("localization sweeps support delta, sigma or J")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if sweep is None:
        points = [(None, None)]
    elif "lengths_nm" in sweep:
        lam = config.raw["params"]["lambda_qd_nm"]
        pref = anchored_prefactor(sweep["anchor_J"],
                                  sweep.get("anchor_length_nm",
                                            config.raw["geometry"]["length_nm"]), lam) \
            if "anchor_J" in sweep else 0.75
        points = [(float(dipole_coupling(L, lam, pref)), None) for L in sweep["lengths_nm"]]
    else:
        points = [(v, None) for v in _grid_values(sweep)]

    rows_lnT, rows_fit = [], []
    for label, eff in config.cases():
        base_delta = eff.get("delta", config.raw.get("delta", 0.0)) or 0.0
        reals = int(eff["disorder"].get("realizations", 1000))
        for value, _ in points:
            sweep_q = sweep["quantity"] if sweep else ""
            sv = value if sweep else ""
            delta = base_delta
            sigma_override = None
            eff_pt = eff
            if sweep:
                if sweep["quantity"] == "delta":
                    delta = value
                elif sweep["quantity"] == "sigma":
                    sigma_override = value
                elif sweep["quantity"] == "J":
                    p = dict(eff["params"])
                    for kkey in ("J", "J_anchor", "J_prefactor"):
                        p.pop(kkey, None)
                    p["J"] = value
                    eff_pt = {**eff, "params": p}
                    if eff_pt.get("disorder", {}).get("couple_J_to_length"):
                        eff_pt["disorder"] = {**eff_pt["disorder"],
                                              "couple_J_to_length": False}
            model = _disorder_model(eff_pt, sigma_override=sigma_override)
            params = _coupling_params(eff_pt)
            _consistent_j_mode(model, params, label)
            ens, est, quad = _localization_point(
                eff_pt, model, params, delta, n_values, reals, seed, threads)
            for i, n in enumerate(ens.n_values):
                rows_lnT.append([label, sweep_q, sv, n, ens.mean_lnT[i],
                                 ens.stderr_lnT[i], ens.mean_T[i], reals])
            rows_fit.append([label, sweep_q, sv, est.xi, est.xi_stderr, est.slope,
                             est.intercept, est.r_squared,
                             quad.xi if quad else "",
                             quad.mean_ln_tau_sq if quad else ""])

    base = config.basename
    lnT_path = Path(out_dir) / f"{base}_lnT.csv"
    fit_path = Path(out_dir) / f"{base}_fit.csv"
    sentinels = _write_csv(lnT_path, ["case", "sweep_quantity", "sweep_value", "n_dimers",
                                      "mean_lnT", "stderr_lnT", "mean_T", "realizations"],
                           rows_lnT)
    sentinels += _write_csv(fit_path, ["case", "sweep_quantity", "sweep_value", "xi_dimers",
                                       "xi_stderr", "slope", "intercept", "r_squared",
                                       "xi_quadrature_dimers", "ln_tau_sq_quadrature"],
                            rows_fit)
    report = RunReport(csv_paths=[lnT_path, fit_path], sentinel_count=sentinels)
    if plot:
        from .plotting import plot_localization
        report.svg_paths.append(plot_localization(lnT_path, fit_path))
    report.manifest_path = _write_manifest(
        out_dir, base, "localization", config, seed, threads,
        report.csv_paths + report.svg_paths)
    return report
