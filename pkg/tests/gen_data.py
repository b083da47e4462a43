"""Regenerate the frozen reference data files (run from the repo root).

Gamma references come from 50-digit arithmetic; the generator golden file
freezes the quadrature route of the stiffness entries so regressions in
either evaluation path are caught; the golden lab values freeze the two
repo-reference quantities (unperturbed eigenvalue at the reference grid
and the box-extrapolated whole-line capacity).
"""

import json
import os

import mpmath as mp
import numpy as np

from fraclab import (
    assemble_mass,
    assemble_stiffness,
    build_grid,
    hat_psi,
    make_params,
    solve_eigs,
    toeplitz_entry_quad,
    whole_line_u_capacity,
)

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "data")


def gamma_reference():
    points = [
        0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0, 1.25, 1.5,
        1.75, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 7.5, 10.0,
    ]
    with mp.workdps(50):
        table = {str(x): mp.nstr(mp.gamma(x), 30) for x in points}
    with open(os.path.join(DATA, "gamma_reference.json"), "w") as fh:
        json.dump(table, fh, indent=2, sort_keys=True)
        fh.write("\n")


def toeplitz_golden():
    out = {}
    for s in (0.25, 0.4):
        p = make_params(1, s)
        entries = [toeplitz_entry_quad(k, 1.0, s, p) for k in range(33)]
        out[str(s)] = {
            "h": 1.0,
            "entries": entries,
            "closed_form_constant": 1.0
            / (2.0 * float(mp.cos(mp.pi * s)) * float(mp.gamma(4 - 2 * s))),
        }
    with open(os.path.join(DATA, "toeplitz_golden.json"), "w") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")


def golden_values():
    params = make_params(1, 0.25)
    grid = build_grid(-1.0, 1.0, 1600)
    A = assemble_stiffness(grid, params)
    M = assemble_mass(grid)
    pairs = solve_eigs(A, M, grid.interior_indices, 2)
    extra = whole_line_u_capacity(
        params, [(-1.0, 1.0)], hat_psi(0.0, 1.0, 1.0), (8.0, 16.0, 32.0, 64.0), 8
    )
    out = {
        "lambda1_s025_n1600": float(pairs.values[0]),
        "lambda2_s025_n1600": float(pairs.values[1]),
        "whole_line_cap_s025": {
            "r_list": list(extra.r_values),
            "cells_per_unit": 8,
            "capacities": extra.capacities.tolist(),
            "value": extra.value,
            "cauchy_gap": extra.cauchy_gap,
        },
    }
    with open(os.path.join(DATA, "golden_values.json"), "w") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    os.makedirs(DATA, exist_ok=True)
    gamma_reference()
    print("gamma_reference.json written")
    toeplitz_golden()
    print("toeplitz_golden.json written")
    golden_values()
    print("golden_values.json written")
