"""Command-line front end: config parsing, orchestration, report emission.

Configuration is a flat ``key = value`` text file (JSON-typed values,
``#`` comments) overridden by repeatable ``--set key=value`` flags. Every
command validates its own documented key table, applies defaults, and
echoes the full effective configuration into the JSON summary. Outputs
are deterministic: rerunning a command with the same configuration and
seed reproduces byte-identical CSV and JSON.

Exit codes: 0 success, 1 usage/configuration error, 2 numerical failure
(with diagnostics in the summary JSON when writable). The only
environment variable honored is ``FRACLAB_OUT`` (output directory
override).

Subcommands: params | eig | cap | ucap | angular | sweep |
extension-check | spectral-compare.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .angular import gamma_exponent, hat_psi, solve_angular, vanishing_order_fit
from .assembly import assemble_mass, assemble_stiffness
from .asymptotics import (
    SweepConfig,
    fit_rate,
    run_sweep,
    scaling_prefactor_check,
    spectral_comparison,
    verify_continuity,
    verify_expansion,
)
from .capacity import condenser_capacity, u_capacity, whole_line_u_capacity
from .core import build_grid, make_params, nodes_in_set
from .eigs import solve_eigs
from .errors import ConfigError, FracLabError, NumericalError
from .extension import (
    assemble_extension,
    build_extension_mesh,
    dtn_schur,
    extension_capacity,
    extension_eigs,
)
from .report import Table, render_figure, write_csv, write_json

__all__ = ["RunConfig", "parse_config", "execute", "write_csv", "main"]

COMMANDS = (
    "params",
    "eig",
    "cap",
    "ucap",
    "angular",
    "sweep",
    "extension-check",
    "spectral-compare",
)

# key -> (type tag, default); type tags: int, float, intervals, floatlist,
# strlist. Documented in docs/config_keys.md.
_COMMON = {"seed": ("int", 42)}
_SCHEMAS: dict[str, dict] = {
    "params": {**_COMMON, "n_dim": ("int", 1), "s": ("float", 0.25)},
    "eig": {
        **_COMMON,
        "s": ("float", 0.25),
        "n_cells": ("int", 1600),
        "x_min": ("float", -1.0),
        "x_max": ("float", 1.0),
        "count": ("int", 6),
    },
    "cap": {
        **_COMMON,
        "s": ("float", 0.25),
        "n_cells": ("int", 1600),
        "x_min": ("float", -1.0),
        "x_max": ("float", 1.0),
        "k": ("intervals", ((-0.25, 0.25),)),
    },
    "ucap": {
        **_COMMON,
        "s": ("float", 0.25),
        "n_cells": ("int", 1600),
        "x_min": ("float", -1.0),
        "x_max": ("float", 1.0),
        "k": ("intervals", ((-0.25, 0.25),)),
        "j": ("int", 1),
    },
    "angular": {
        **_COMMON,
        "n_dim": ("int", 1),
        "s": ("float", 0.25),
        "n_cells": ("int", 800),
        "count": ("int", 5),
    },
    "sweep": {
        **_COMMON,
        "s": ("float", 0.25),
        "j": ("int", 1),
        "k": ("intervals", ((-1.0, 1.0),)),
        "eps": ("floatlist", (0.2, 0.1, 0.05)),
        "n_cells": ("int", 1600),
        "x_min": ("float", -1.0),
        "x_max": ("float", 1.0),
        "checks": ("strlist", ("expansion", "continuity", "scaling")),
        "tol_expansion": ("float", 0.15),
        "tol_scaling": ("float", 0.1),
        "r_list": ("floatlist", (8.0, 16.0, 32.0, 64.0)),
        "cells_per_unit": ("int", 8),
        "fit_lo": ("float", 0.02),
        "fit_hi": ("float", 0.2),
        "angular_cells": ("int", 800),
    },
    "extension-check": {
        **_COMMON,
        "s": ("float", 0.25),
        "n_cells": ("int", 200),
        "box_factor": ("float", 6.0),
        "T": ("float", 12.0),
        "m_t": ("int", 96),
        "beta": ("float", 4.0),
        "k": ("intervals", ((-0.25, 0.25),)),
        "n_random": ("int", 50),
    },
    "spectral-compare": {
        **_COMMON,
        "s": ("float", 0.25),
        "j": ("int", 1),
        "n_cells": ("int", 1600),
        "eps": ("floatlist", (0.2, 0.1, 0.05, 0.025, 0.0125)),
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Validated command plus its effective (defaulted) key-value map."""

    command: str
    values: dict
    seed: int


def _parse_value(tag: str, raw, key: str):
    if isinstance(raw, str):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError:
            pass  # keep raw string; tag decides below
    try:
        if tag == "int":
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise TypeError
            if isinstance(raw, float) and not raw.is_integer():
                raise TypeError
            return int(raw)
        if tag == "float":
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise TypeError
            return float(raw)
        if tag == "floatlist":
            return tuple(float(v) for v in raw)
        if tag == "intervals":
            out = []
            for iv in raw:
                a, b = iv
                out.append((float(a), float(b)))
            return tuple(out)
        if tag == "strlist":
            if isinstance(raw, str):
                raw = [p.strip() for p in raw.split(",") if p.strip()]
            return tuple(str(v) for v in raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"key '{key}' expects a {tag}, got {raw!r}") from exc
    raise ConfigError(f"key '{key}' has unknown type tag {tag}")


def _read_config_file(path: str) -> dict:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{ln}: expected 'key = value'")
            key, val = stripped.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def parse_config(command: str, file: str | None = None, overrides=()) -> RunConfig:
    """Merge defaults, config file, and --set overrides into a RunConfig.

    Unknown keys are rejected with the list of valid ones; constraint
    violations name the offending key and bound.
    """
    if command not in _SCHEMAS:
        raise ConfigError(
            f"unknown command '{command}'; valid: {', '.join(COMMANDS)}"
        )
    schema = _SCHEMAS[command]
    raw: dict[str, object] = {}
    if file:
        raw.update(_read_config_file(file))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        raw[key.strip()] = val.strip()

    values = {k: default for k, (_, default) in schema.items()}
    for key, rawval in raw.items():
        if key not in schema:
            raise ConfigError(
                f"unknown key '{key}' for command '{command}'; "
                f"valid keys: {', '.join(sorted(schema))}"
            )
        values[key] = _parse_value(schema[key][0], rawval, key)

    _validate(command, values)
    return RunConfig(command=command, values=values, seed=int(values["seed"]))


def _validate(command: str, v: dict) -> None:
    if "s" in v and "n_dim" in v:
        make_params(v["n_dim"], v["s"])  # raises naming the bound
    elif "s" in v and command != "angular":
        make_params(1, v["s"])
    if command == "sweep":
        SweepConfig(
            s=v["s"],
            j=v["j"],
            k_intervals=v["k"],
            eps_list=v["eps"],
            n_cells=v["n_cells"],
            x_min=v["x_min"],
            x_max=v["x_max"],
        )
        bad = set(v["checks"]) - {"expansion", "continuity", "scaling"}
        if bad:
            raise ConfigError(f"unknown checks: {sorted(bad)}")


# ---------------------------------------------------------------------------
# execution


@dataclass(frozen=True)
class ReportBundle:
    """Paths and summary produced by one command execution."""

    csv_paths: tuple[str, ...]
    json_path: str
    figure_paths: tuple[str, ...]
    summary: dict


def _constants_block(n_dim: int, s: float) -> dict:
    p = make_params(n_dim, s)
    return {
        "n_dim": p.n_dim,
        "s": p.s,
        "c_ns": p.c_ns,
        "kappa_s": p.kappa_s,
        "lambda_hardy": p.lambda_hardy,
        "two_star": p.two_star,
    }


def _base_summary(cfg: RunConfig) -> dict:
    return {
        "command": cfg.command,
        "version": __version__,
        "seed": cfg.seed,
        "config": dict(cfg.values),
        "residual_tol": 1e-10,
    }


def execute(cfg: RunConfig, out_dir: str, figures: bool = True) -> ReportBundle:
    """Dispatch a validated config, writing CSV + JSON (+ PNG) into out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    runner = {
        "params": _run_params,
        "eig": _run_eig,
        "cap": _run_cap,
        "ucap": _run_ucap,
        "angular": _run_angular,
        "sweep": _run_sweep_cmd,
        "extension-check": _run_extension_check,
        "spectral-compare": _run_spectral_compare,
    }[cfg.command]
    return runner(cfg, out_dir, figures)


def _emit(
    cfg: RunConfig,
    out_dir: str,
    table: Table,
    summary: dict,
    figures: bool,
    figure_kind: str | None,
    figure_payload: dict | None,
) -> ReportBundle:
    stem = cfg.command.replace("-", "_")
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    json_path = os.path.join(out_dir, f"{stem}_summary.json")
    write_csv(table, csv_path)
    write_json(summary, json_path)
    fig_paths: tuple[str, ...] = ()
    if figures and figure_kind is not None:
        fig_path = os.path.join(out_dir, f"{stem}.png")
        render_figure(figure_kind, figure_payload or {}, fig_path)
        fig_paths = (fig_path,)
    return ReportBundle(
        csv_paths=(csv_path,),
        json_path=json_path,
        figure_paths=fig_paths,
        summary=summary,
    )


def _run_params(cfg: RunConfig, out_dir: str, figures: bool) -> ReportBundle:
    v = cfg.values
    consts = _constants_block(v["n_dim"], v["s"])
    table = Table.from_columns(
        {k: np.array([val]) for k, val in consts.items() if k not in ("n_dim",)}
    )
    summary = {**_base_summary(cfg), "constants": consts}
    return _emit(cfg, out_dir, table, summary, False, None, None)


def _run_eig(cfg: RunConfig, out_dir: str, figures: bool) -> ReportBundle:
    v = cfg.values
    params = make_params(1, v["s"])
    grid = build_grid(v["x_min"], v["x_max"], v["n_cells"])
    A = assemble_stiffness(grid, params)
    M = assemble_mass(grid)
    pairs = solve_eigs(A, M, grid.interior_indices, v["count"])
    table = Table.from_columns(
        {
            "j": np.arange(1, pairs.count + 1),
            "lambda": pairs.values,
            "residual": pairs.residuals,
        }
    )
    summary = {
        **_base_summary(cfg),
        "constants": _constants_block(1, v["s"]),
        "eigenvalues": pairs.values,
    }
    payload = {
        "s": v["s"],
        "values": pairs.values,
        "x": grid.interior_nodes,
        "vectors": pairs.vectors,
    }
    return _emit(cfg, out_dir, table, summary, figures, "eig", payload)


def _cap_common(cfg: RunConfig, out_dir: str, figures: bool, with_data: bool):
    v = cfg.values
    params = make_params(1, v["s"])
    grid = build_grid(v["x_min"], v["x_max"], v["n_cells"])
    A = assemble_stiffness(grid, params)
    mask = nodes_in_set(grid, v["k"])
    if with_data:
        M = assemble_mass(grid)
        pairs = solve_eigs(A, M, grid.interior_indices, v["j"])
        data = pairs.vectors[:, v["j"] - 1]
        res = u_capacity(A, grid.interior_indices, mask, data)
        kind = "u_capacity"
    else:
        res = condenser_capacity(A, grid.interior_indices, mask)
        kind = "condenser_capacity"
    table = Table.from_columns(
        {"x": grid.interior_nodes, "potential": res.potential}
    )
    summary = {
        **_base_summary(cfg),
        "constants": _constants_block(1, v["s"]),
        "kind": kind,
        "value": res.value,
        "residual": res.residual,
        "warning": res.warning,
    }
    payload = {
        "x": grid.interior_nodes,
        "potential": res.potential,
        "intervals": v["k"],
        "value": res.value,
    }
    return _emit(cfg, out_dir, table, summary, figures, "potential", payload)


def _run_cap(cfg, out_dir, figures):
    return _cap_common(cfg, out_dir, figures, with_data=False)


def _run_ucap(cfg, out_dir, figures):
    return _cap_common(cfg, out_dir, figures, with_data=True)


def _run_angular(cfg: RunConfig, out_dir: str, figures: bool) -> ReportBundle:
    v = cfg.values
    spec = solve_angular(v["n_dim"], v["s"], v["n_cells"], v["count"])
    gammas = np.array(
        [gamma_exponent(v["n_dim"], v["s"], max(m, 0.0)) for m in spec.mu]
    )
    table = Table.from_columns(
        {
            "k": np.arange(1, spec.mu.size + 1),
            "mu": spec.mu,
            "gamma": gammas,
            "psi_minus": spec.psi_minus,
            "psi_plus": spec.psi_plus,
        }
    )
    summary = {
        **_base_summary(cfg),
        "mu": spec.mu,
        "gamma": gammas,
    }
    payload = {"mu": spec.mu, "n_dim": v["n_dim"], "s": v["s"]}
    return _emit(cfg, out_dir, table, summary, figures, "angular", payload)


def _run_sweep_cmd(cfg: RunConfig, out_dir: str, figures: bool) -> ReportBundle:
    v = cfg.values
    sweep_cfg = SweepConfig(
        s=v["s"],
        j=v["j"],
        k_intervals=v["k"],
        eps_list=v["eps"],
        n_cells=v["n_cells"],
        x_min=v["x_min"],
        x_max=v["x_max"],
    )
    table = run_sweep(sweep_cfg)
    fits = {}
    if table.eps.size >= 3:
        fits["shift"] = fit_rate(zip(table.eps, table.shift))
        fits["ucap"] = fit_rate(zip(table.eps, table.ucap))
        fits["cap"] = fit_rate(zip(table.eps, table.cap))

    verdicts: dict[str, dict] = {}
    if "expansion" in v["checks"]:
        verd = verify_expansion(table, v["tol_expansion"])
        verdicts["expansion"] = {"passed": verd.passed, **verd.detail}
    if "continuity" in v["checks"] and table.eps.size >= 2:
        verd = verify_continuity(table)
        verdicts["continuity"] = {"passed": verd.passed, **verd.detail}
    scaling_info = None
    if "scaling" in v["checks"]:
        scaling_info, verd = _scaling_pipeline(v, table)
        verdicts["scaling"] = {"passed": verd.passed, **verd.detail}

    csv_table = Table.from_columns(table.columns())
    summary = {
        **_base_summary(cfg),
        "constants": _constants_block(1, v["s"]),
        "lambda0": table.lambda0,
        "fits": {
            k: {
                "exponent": f.exponent,
                "log_prefactor": f.log_prefactor,
                "r_squared": f.r_squared,
                "window": list(f.window),
            }
            for k, f in fits.items()
        },
        "verdicts": verdicts,
        "scaling_pipeline": scaling_info,
    }
    payload = {
        "s": v["s"],
        "j": v["j"],
        "eps": table.eps,
        "shift": table.shift,
        "ucap": table.ucap,
        "cap": table.cap,
        "ratio": table.ratio,
    }
    if "shift" in fits:
        payload["fit_exponent"] = fits["shift"].exponent
        payload["fit_log_prefactor"] = fits["shift"].log_prefactor
    return _emit(cfg, out_dir, csv_table, summary, figures, "sweep", payload)


def _scaling_pipeline(v: dict, table) -> tuple[dict, object]:
    """Predict the hole-family prefactor from the angular spectrum and the
    eigenfunction's vanishing order, then check the normalized u-capacity.

    The admissible order is chosen as the angular prediction closest to
    the fitted order of the eigenfunction; a large disagreement is
    reported rather than silently overridden.
    """
    s = v["s"]
    spec = solve_angular(1, s, v["angular_cells"], 4)
    fit = vanishing_order_fit(table.u_j, table.grid, (v["fit_lo"], v["fit_hi"]))
    candidates = [gamma_exponent(1, s, max(m, 0.0)) for m in spec.mu]
    k0 = int(np.argmin([abs(g - fit.gamma_est) for g in candidates]))
    gamma_sel = candidates[k0]
    mismatch = abs(gamma_sel - fit.gamma_est)
    if gamma_sel == 0.0:
        # flat profile: both side amplitudes estimate u_j(0)
        amp = table.u_center
        profile = hat_psi(0.0, amp, amp)
    else:
        profile = hat_psi(gamma_sel, fit.amp_plus, fit.amp_minus)
    params = make_params(1, s)
    extra = whole_line_u_capacity(
        params, v["k"], profile, v["r_list"], v["cells_per_unit"]
    )
    verd = scaling_prefactor_check(table, gamma_sel, extra.value, v["tol_scaling"])
    info = {
        "gamma_fit": fit.gamma_est,
        "gamma_selected": gamma_sel,
        "angular_index": k0 + 1,
        "gamma_mismatch": mismatch,
        "mismatch_flag": bool(mismatch > 0.1),
        "fit_r_squared": fit.r_squared,
        "cap_ref": extra.value,
        "cap_sequence": extra.capacities,
        "cap_cauchy_gap": extra.cauchy_gap,
    }
    return info, verd


def _run_extension_check(cfg: RunConfig, out_dir: str, figures: bool) -> ReportBundle:
    v = cfg.values
    s = v["s"]
    params = make_params(1, s)
    n = v["n_cells"]
    grid = build_grid(-1.0, 1.0, n)
    A = assemble_stiffness(grid, params)
    M = assemble_mass(grid)
    lam_direct = float(solve_eigs(A, M, grid.interior_indices, 1).values[0])
    mask = nodes_in_set(grid, v["k"])
    cap_direct = condenser_capacity(A, grid.interior_indices, mask).value

    xf = v["box_factor"]
    box = build_grid(-xf, xf, int(round(xf * n)))
    mesh = build_extension_mesh(box, v["T"], v["m_t"], v["beta"])
    op = assemble_extension(mesh, params, omega_span=(-1.0, 1.0))
    S = dtn_schur(op)
    lam_ext = float(extension_eigs(S, M, params, 1)[0])
    cap_ext = extension_capacity(
        op, mask.node_indices + (box.n_cells - n) // 2, np.ones(mask.node_indices.size)
    )

    rng = np.random.default_rng(cfg.seed)
    ratios = []
    for _ in range(v["n_random"]):
        z = rng.standard_normal(n - 1)
        ratios.append(S.quadratic_form(z) / A.quadratic_form(z) / params.kappa_s)
    ratios = np.array(sorted(ratios))
    frob = float(
        np.linalg.norm(S.matrix - params.kappa_s * A.dense())
        / np.linalg.norm(params.kappa_s * A.dense())
    )

    table = Table.from_columns(
        {
            "quantity": np.array(["lambda_1", "capacity"]),
            "direct": np.array([lam_direct, cap_direct]),
            "extension": np.array([lam_ext, cap_ext]),
            "rel_err": np.array(
                [
                    abs(lam_ext - lam_direct) / lam_direct,
                    abs(cap_ext - cap_direct) / cap_direct,
                ]
            ),
        }
    )
    summary = {
        **_base_summary(cfg),
        "constants": _constants_block(1, s),
        "lambda_direct": lam_direct,
        "lambda_extension": lam_ext,
        "capacity_direct": cap_direct,
        "capacity_extension": cap_ext,
        "kappa_ratio_min": float(ratios[0]),
        "kappa_ratio_max": float(ratios[-1]),
        "frobenius_rel": frob,
    }
    payload = {
        "pairs": {
            "lambda_1": (lam_direct, lam_ext),
            "capacity": (cap_direct, cap_ext),
        }
    }
    return _emit(cfg, out_dir, table, summary, figures, "extension", payload)


def _run_spectral_compare(cfg: RunConfig, out_dir: str, figures: bool) -> ReportBundle:
    v = cfg.values
    grid = build_grid(-1.0, 1.0, v["n_cells"])
    ct = spectral_comparison(grid, v["s"], v["j"], v["eps"])
    table = Table.from_columns(ct.columns())
    summary = {
        **_base_summary(cfg),
        "constants": _constants_block(1, v["s"]),
        "lambda_classical": ct.lambda_classical,
        "nu": ct.nu,
        "spectral_shift_first": float(ct.spectral_shift[0]),
        "spectral_shift_last": float(ct.spectral_shift[-1]),
        "restricted_shift_first": float(ct.restricted_shift[0]),
        "restricted_shift_last": float(ct.restricted_shift[-1]),
    }
    payload = {
        "s": v["s"],
        "j": v["j"],
        "eps": ct.eps,
        "spectral_shift": ct.spectral_shift,
        "restricted_shift": ct.restricted_shift,
    }
    return _emit(cfg, out_dir, table, summary, figures, "spectral", payload)


# ---------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="fraclab", description=__doc__, add_help=True)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name in COMMANDS:
        p = sub.add_parser(name, add_help=True)
        p.add_argument("--config", default=None, help="flat key=value config file")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one config key (repeatable)",
        )
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument(
            "--no-figures", action="store_true", help="skip PNG rendering"
        )
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command is None:
            raise ConfigError(f"missing command; valid: {', '.join(COMMANDS)}")
        cfg = parse_config(ns.command, ns.config, ns.overrides)
    except ConfigError as exc:
        print(f"fraclab: usage error: {exc}", file=sys.stderr)
        return 1
    out_dir = ns.out or os.environ.get("FRACLAB_OUT", ".")
    try:
        bundle = execute(cfg, out_dir, figures=not ns.no_figures)
    except (NumericalError, OSError) as exc:
        diag = {
            **_base_summary(cfg),
            "error": str(exc),
            "error_type": type(exc).__name__,
        }
        try:
            path = os.path.join(out_dir, f"{cfg.command.replace('-', '_')}_error.json")
            write_json(diag, path)
        except OSError:
            pass
        print(f"fraclab: numerical/io failure: {exc}", file=sys.stderr)
        return 2
    except FracLabError as exc:
        print(f"fraclab: usage error: {exc}", file=sys.stderr)
        return 1
    print(bundle.json_path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
