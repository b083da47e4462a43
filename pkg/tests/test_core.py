import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraclab import (
    GeometryError,
    GridError,
    ParameterError,
    ResolutionError,
    build_grid,
    make_params,
    nodes_in_set,
)

from .conftest import load_data
from .oracles import c_ns_oracle, kappa_oracle, lambda_hardy_oracle


def test_gamma_backend_matches_reference_table():
    # the platform gamma must hold 1e-13 relative against 50-digit values
    table = load_data("gamma_reference.json")
    assert len(table) == 20
    for x_str, ref_str in table.items():
        x, ref = float(x_str), float(ref_str)
        assert math.gamma(x) == pytest.approx(ref, rel=1e-13)


class TestMakeParams:
    def test_constants_s025(self):
        p = make_params(1, 0.25)
        # algebra collapses at s = 1/4: C = sqrt(2)/(4 sqrt(pi)),
        # kappa = 2 pi / Gamma(1/4)^2
        assert p.c_ns == pytest.approx(math.sqrt(2) / (4 * math.sqrt(math.pi)), rel=1e-14)
        assert p.c_ns == pytest.approx(0.199471, rel=1e-5)
        assert p.kappa_s == pytest.approx(2 * math.pi / math.gamma(0.25) ** 2, rel=1e-14)
        assert p.kappa_s == pytest.approx(0.47799, rel=1e-4)
        assert p.two_star == pytest.approx(4.0, abs=0.0)

    @pytest.mark.parametrize("n_dim,s", [(1, 0.25), (1, 0.4), (1, 0.1), (2, 0.75), (3, 0.5)])
    def test_constants_match_high_precision_oracle(self, n_dim, s):
        p = make_params(n_dim, s)
        assert p.c_ns == pytest.approx(c_ns_oracle(n_dim, s), rel=1e-12)
        assert p.kappa_s == pytest.approx(kappa_oracle(s), rel=1e-12)
        assert p.lambda_hardy == pytest.approx(lambda_hardy_oracle(n_dim, s), rel=1e-12)
        assert p.c_ns > 0 and p.kappa_s > 0 and p.lambda_hardy > 0
        assert p.two_star > 2

    @pytest.mark.parametrize("n_dim,s", [(1, 0.5), (1, 0.0), (1, -0.1), (1, 1.0), (2, 1.0), (0, 0.25)])
    def test_out_of_range_rejected(self, n_dim, s):
        with pytest.raises(ParameterError):
            make_params(n_dim, s)

    def test_deterministic_bitwise(self):
        a, b = make_params(1, 0.37), make_params(1, 0.37)
        assert (a.c_ns, a.kappa_s, a.lambda_hardy, a.two_star) == (
            b.c_ns, b.kappa_s, b.lambda_hardy, b.two_star
        )

    @pytest.mark.parametrize("s", [1e-3, 0.499])
    def test_c_ns_at_the_edges_of_the_order_range(self, s):
        # oracle agreement at the extreme admissible orders for N = 1
        p = make_params(1, s)
        assert p.c_ns == pytest.approx(c_ns_oracle(1, s), rel=1e-12)

    def test_c_ns_vanishes_toward_both_order_limits(self):
        # the s(1-s) factor kills the constant at s -> 0+ and s -> 1-
        # (the upper limit is reachable only for N >= 2)
        assert make_params(1, 1e-3).c_ns < 1e-2
        assert make_params(3, 1.0 - 1e-3).c_ns < 1e-2


class TestGrid:
    def test_basic(self):
        g = build_grid(-1, 1, 8)
        assert g.h == pytest.approx(0.25)
        assert g.nodes.shape == (9,)
        assert g.n_interior == 7
        assert np.all(np.diff(g.nodes) > 0)

    def test_fine(self):
        g = build_grid(-1, 1, 1600)
        assert g.h == pytest.approx(0.00125)

    def test_reversed_endpoints(self):
        with pytest.raises(GridError):
            build_grid(1, -1, 8)

    def test_too_few_cells(self):
        with pytest.raises(GridError):
            build_grid(-1, 1, 1)


class TestNodeMask:
    def test_symmetric_interval(self):
        g = build_grid(-1, 1, 40)
        m = nodes_in_set(g, [[-0.1, 0.1]])
        assert np.allclose(g.nodes[m.node_indices], [-0.1, -0.05, 0.0, 0.05, 0.1])

    def test_empty_family(self):
        g = build_grid(-1, 1, 40)
        assert nodes_in_set(g, []).is_empty

    def test_no_node_inside_is_resolution_error(self):
        g = build_grid(-1, 1, 8)
        with pytest.raises(ResolutionError):
            nodes_in_set(g, [[0.01, 0.02]])

    def test_boundary_touch_rejected(self):
        g = build_grid(-1, 1, 8)
        with pytest.raises(GeometryError):
            nodes_in_set(g, [[0.5, 1.0]])
        with pytest.raises(GeometryError):
            nodes_in_set(g, [[-1.5, 0.0]])

    def test_overlap_rejected(self):
        g = build_grid(-1, 1, 40)
        with pytest.raises(GeometryError):
            nodes_in_set(g, [[-0.2, 0.0], [-0.05, 0.2]])

    @settings(max_examples=50, deadline=None)
    @given(
        a1=st.integers(min_value=1, max_value=12),
        w1=st.integers(min_value=0, max_value=6),
        gap=st.integers(min_value=1, max_value=6),
        w2=st.integers(min_value=0, max_value=6),
    )
    def test_union_of_disjoint_families(self, a1, w1, gap, w2):
        g = build_grid(-1, 1, 40)
        lo1, hi1 = g.nodes[a1], g.nodes[a1 + w1]
        lo2 = g.nodes[a1 + w1 + gap]
        hi2 = g.nodes[min(a1 + w1 + gap + w2, 39)]
        if lo2 > hi2 or hi2 >= g.x_max:
            return
        ma = nodes_in_set(g, [[lo1, hi1]])
        mb = nodes_in_set(g, [[lo2, hi2]])
        mab = nodes_in_set(g, [[lo1, hi1], [lo2, hi2]])
        assert set(mab.node_indices) == set(ma.node_indices) | set(mb.node_indices)
