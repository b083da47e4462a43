"""Deterministic CSV/JSON emission and figure rendering for reports.

CSV files have a fixed column order, '.' decimal separator, 17
significant digits (lossless float64 round-trip), and newline-terminated
rows, so byte-identical reruns are a testable contract. JSON summaries
carry verdicts, fitted exponents, the constants in use, the package
version, and the full effective configuration including the seed.

Figures are a convenience layer on the same tables (PNG next to the CSV);
they are not part of the byte-stability contract.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import ParameterError  # noqa: E402

__all__ = ["Table", "write_csv", "write_json", "render_figure"]


@dataclass(frozen=True)
class Table:
    """Ordered named columns of equal length."""

    columns: tuple[str, ...]
    data: dict

    @classmethod
    def from_columns(cls, columns: dict) -> "Table":
        names = tuple(columns.keys())
        arrays = {k: np.asarray(v) for k, v in columns.items()}
        sizes = {a.shape[0] for a in arrays.values()} if arrays else set()
        if len(sizes) > 1:
            raise ParameterError(f"ragged table: column lengths {sizes}")
        return cls(columns=names, data=arrays)

    @property
    def n_rows(self) -> int:
        if not self.columns:
            return 0
        return int(self.data[self.columns[0]].shape[0])


def _fmt(value) -> str:
    if isinstance(value, (np.floating, float)):
        return format(float(value), ".17g")
    if isinstance(value, (np.integer, int)):
        return str(int(value))
    return str(value)


def write_csv(table: Table, path: str) -> None:
    """Fixed-schema CSV; an empty table still writes its header line."""
    lines = [",".join(table.columns)]
    for i in range(table.n_rows):
        lines.append(",".join(_fmt(table.data[c][i]) for c in table.columns))
    payload = "\n".join(lines) + "\n"
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(payload)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(summary: dict, path: str) -> None:
    payload = json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n"
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(payload)


# ---------------------------------------------------------------------------
# figures


def _save(fig, path: str) -> None:
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render_figure(kind: str, payload: dict, path: str) -> None:
    """Render one report figure; ``kind`` selects the layout."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    if kind == "sweep":
        _sweep_figure(payload, path)
    elif kind == "spectral":
        _spectral_figure(payload, path)
    elif kind == "angular":
        _angular_figure(payload, path)
    elif kind == "eig":
        _eig_figure(payload, path)
    elif kind == "potential":
        _potential_figure(payload, path)
    elif kind == "extension":
        _extension_figure(payload, path)
    else:
        raise ParameterError(f"unknown figure kind {kind!r}")


def _sweep_figure(p: dict, path: str) -> None:
    eps = np.asarray(p["eps"])
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.6, 4.0))
    ax1.loglog(eps, p["shift"], "o-", label="eigenvalue shift")
    ax1.loglog(eps, p["ucap"], "s--", label="u-capacity")
    ax1.loglog(eps, p["cap"], "^:", label="condenser capacity")
    if "fit_exponent" in p:
        c = np.exp(p["fit_log_prefactor"])
        ax1.loglog(
            eps,
            c * eps ** p["fit_exponent"],
            "k-",
            lw=0.8,
            label=f"fit slope {p['fit_exponent']:.3f}",
        )
    ax1.set_xlabel(r"$\varepsilon$")
    ax1.set_ylabel("value")
    ax1.legend(fontsize=8)
    ax1.set_title(f"hole sweep (s={p['s']}, j={p['j']})")
    ax2.semilogx(eps, p["ratio"], "o-")
    ax2.axhline(1.0, color="k", lw=0.8)
    ax2.set_xlabel(r"$\varepsilon$")
    ax2.set_ylabel("shift / u-capacity")
    ax2.set_title("expansion ratio")
    fig.tight_layout()
    _save(fig, path)


def _spectral_figure(p: dict, path: str) -> None:
    eps = np.asarray(p["eps"])
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    ax.loglog(eps, p["spectral_shift"], "o-", label="spectral prediction")
    ax.loglog(eps, p["restricted_shift"], "s--", label="restricted (measured)")
    ax.set_xlabel(r"$\varepsilon$")
    ax.set_ylabel("eigenvalue shift")
    ax.set_title(f"restricted vs spectral (s={p['s']}, j={p['j']})")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def _angular_figure(p: dict, path: str) -> None:
    mu = np.asarray(p["mu"])
    k = np.arange(1, mu.size + 1)
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    ax.plot(k, mu, "o", label="computed")
    if "mu_half" in p:
        ax.plot(k, p["mu_half"], "k+", ms=10, label="harmonic case (s=1/2)")
    ax.set_xlabel("index k")
    ax.set_ylabel(r"$\mu_k$")
    ax.set_title(f"angular spectrum (N={p['n_dim']}, s={p['s']})")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def _eig_figure(p: dict, path: str) -> None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.6, 4.0))
    vals = np.asarray(p["values"])
    ax1.plot(np.arange(1, vals.size + 1), vals, "o-")
    ax1.set_xlabel("index j")
    ax1.set_ylabel(r"$\lambda_j$")
    ax1.set_title(f"spectrum (s={p['s']})")
    x = np.asarray(p["x"])
    for j, vec in enumerate(np.asarray(p["vectors"]).T[:3], start=1):
        ax2.plot(x, vec, label=f"j={j}")
    ax2.set_xlabel("x")
    ax2.set_ylabel("eigenfunction")
    ax2.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def _potential_figure(p: dict, path: str) -> None:
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    ax.plot(p["x"], p["potential"], "-")
    for a, b in p["intervals"]:
        ax.axvspan(a, b, color="0.85")
    ax.set_xlabel("x")
    ax.set_ylabel("potential")
    ax.set_title(f"capacitary potential (value={p['value']:.6g})")
    fig.tight_layout()
    _save(fig, path)


def _extension_figure(p: dict, path: str) -> None:
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    labels = list(p["pairs"].keys())
    direct = [p["pairs"][k][0] for k in labels]
    ext = [p["pairs"][k][1] for k in labels]
    idx = np.arange(len(labels))
    ax.bar(idx - 0.18, direct, width=0.36, label="direct")
    ax.bar(idx + 0.18, ext, width=0.36, label="extension")
    ax.set_xticks(idx, labels)
    ax.set_title("direct vs extension discretization")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)
