"""Render emitted CSV datasets to SVG figures (decoration; CSV is the record)."""
from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _read_rows(csv_path):
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return list(reader)


def _f(row, key):
    v = row.get(key, "")
    return float(v) if v not in ("", None) else None


def _save(fig, csv_path, suffix=""):
    out = Path(csv_path).with_suffix("").as_posix() + f"{suffix}.svg"
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
    return Path(out)


def plot_spectrum(csv_path):
    rows = _read_rows(csv_path)
    by_case = defaultdict(list)
    for r in rows:
        by_case[r["case"]].append(r)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for case, rr in by_case.items():
        d = [_f(r, "delta_Gamma0") for r in rr]
        T = [_f(r, "T") for r in rr]
        ax.plot(d, T, label=f"{case} T")
        R = [_f(r, "R") for r in rr]
        if any(v not in (None, 0.0) for v in R):
            ax.plot(d, R, "--", label=f"{case} R")
    ax.set_xlabel(r"$\Delta/\Gamma_0$")
    ax.set_ylabel("T, R")
    ax.legend(fontsize=8)
    return _save(fig, csv_path)


def plot_peaks(csv_path):
    rows = _read_rows(csv_path)
    by_case = defaultdict(list)
    for r in rows:
        by_case[r["case"]].append(r)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    for case, rr in by_case.items():
        x = [_f(r, "sweep_value") for r in rr]
        D = [_f(r, "D") for r in rr]
        sep = [_f(r, "delta_peak_Gamma0") for r in rr]
        ax1.plot(x, D, "o-", ms=3, label=case)
        ax2.plot(x, sep, "s-", ms=3, label=case)
    q = rows[0]["sweep_quantity"] if rows else "sweep"
    ax1.set_xlabel(q)
    ax1.set_ylabel("D")
    ax1.axhline(0.0, color="k", lw=0.5)
    ax2.set_xlabel(q)
    ax2.set_ylabel(r"$\Delta_{peak}/\Gamma_0$")
    ax1.legend(fontsize=8)
    return _save(fig, csv_path)


def plot_localization(lnT_csv, fit_csv):
    rows = _read_rows(lnT_csv)
    fits = _read_rows(fit_csv)
    swept = any(r["sweep_value"] not in ("", None) for r in fits)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if not swept:
        by_case = defaultdict(list)
        for r in rows:
            by_case[r["case"]].append(r)
        for case, rr in by_case.items():
            n = [_f(r, "n_dimers") for r in rr]
            y = [_f(r, "mean_lnT") for r in rr]
            ax.plot(n, y, "o", ms=4, label=case)
        for fit in fits:
            s, b = _f(fit, "slope"), _f(fit, "intercept")
            if s is not None:
                ns = sorted(_f(r, "n_dimers") for r in rows if r["case"] == fit["case"])
                ax.plot(ns, [s * v + b for v in ns], "-", lw=1)
        ax.set_xlabel("n (dimers)")
        ax.set_ylabel(r"$\langle \ln T \rangle$")
    else:
        by_case = defaultdict(list)
        for r in fits:
            by_case[r["case"]].append(r)
        for case, rr in by_case.items():
            x = [_f(r, "sweep_value") for r in rr]
            xi = [_f(r, "xi_dimers") for r in rr]
            ax.plot(x, xi, "o-", ms=4, label=case)
            xq = [_f(r, "xi_quadrature_dimers") for r in rr]
            if any(v is not None for v in xq):
                ax.plot(x, xq, "--", lw=1, label=f"{case} (quadrature)")
        ax.set_xlabel(fits[0]["sweep_quantity"] if fits else "sweep")
        ax.set_ylabel(r"$\xi$ (dimers)")
    ax.legend(fontsize=8)
    return _save(fig, lnT_csv)
