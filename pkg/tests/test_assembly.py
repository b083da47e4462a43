import numpy as np
import pytest

from fraclab import (
    assemble_hardy_form,
    assemble_mass,
    assemble_stiffness,
    build_grid,
    make_params,
    toeplitz_entry,
    toeplitz_entry_quad,
)

from .conftest import load_data
from .oracles import hat_center_hardy_oracle, l2_norm_squared_oracle, pair_energy_mp


class TestToeplitzEntry:
    @pytest.mark.parametrize("k", [0, 1, 5])
    @pytest.mark.parametrize("s", [0.25, 0.4])
    def test_homogeneity_in_spacing(self, k, s):
        p = make_params(1, s)
        assert toeplitz_entry(k, 2.0, s, p) == pytest.approx(
            2.0 ** (1 - 2 * s) * toeplitz_entry(k, 1.0, s, p), rel=1e-14
        )

    def test_sign_structure(self, params_s25):
        assert toeplitz_entry(0, 1.0, 0.25, params_s25) > 0
        # off-diagonal entries are negative at the working orders
        # (disjoint supports force it for k >= 2; k = 1 holds for s >~ 0.24)
        for k in range(1, 40):
            assert toeplitz_entry(k, 1.0, 0.25, params_s25) < 0
        p40 = make_params(1, 0.4)
        for k in range(1, 40):
            assert toeplitz_entry(k, 1.0, 0.4, p40) < 0

    def test_far_field_decay_rate(self, params_s25):
        # disjoint supports reduce the entry to ~ -C h^2 |kh|^{-(1+2s)}
        ratio = toeplitz_entry(20, 1.0, 0.25, params_s25) / toeplitz_entry(
            10, 1.0, 0.25, params_s25
        )
        assert ratio == pytest.approx(2.0 ** -1.5, rel=0.05)

    def test_matches_frozen_quadrature_golden(self):
        golden = load_data("toeplitz_golden.json")
        for s_str, block in golden.items():
            s = float(s_str)
            p = make_params(1, s)
            for k, ref in enumerate(block["entries"]):
                assert toeplitz_entry(k, 1.0, s, p) == pytest.approx(ref, rel=1e-8)

    def test_quadrature_path_reproduces_golden(self):
        golden = load_data("toeplitz_golden.json")
        for s_str, block in golden.items():
            s = float(s_str)
            p = make_params(1, s)
            for k in (0, 1, 3, 17, 32):
                assert toeplitz_entry_quad(k, 1.0, s, p) == pytest.approx(
                    block["entries"][k], rel=1e-10
                )

    @pytest.mark.parametrize("s", [0.25, 0.4])
    @pytest.mark.parametrize("k", [0, 1, 2, 5])
    def test_high_precision_cross_check(self, s, k):
        # third route: arbitrary-precision quadrature of the same integral
        p = make_params(1, s)
        assert toeplitz_entry(k, 1.0, s, p) == pytest.approx(
            pair_energy_mp(k, s), rel=1e-9
        )


class TestStiffness:
    def test_center_hat_form_equals_generator_head(self, params_s25):
        g = build_grid(-1, 1, 16)
        A = assemble_stiffness(g, params_s25)
        x = np.zeros(g.n_interior)
        x[7] = 1.0  # hat at the center node
        assert A.quadratic_form(x) == pytest.approx(
            toeplitz_entry(0, g.h, 0.25, params_s25), rel=1e-14
        )

    def test_translation_invariance(self, params_s25):
        a = assemble_stiffness(build_grid(-1, 1, 16), params_s25)
        b = assemble_stiffness(build_grid(3, 5, 16), params_s25)
        assert np.array_equal(a.generator, b.generator)

    def test_positive_definite(self, params_s25):
        A = assemble_stiffness(build_grid(-1, 1, 16), params_s25)
        w = np.linalg.eigvalsh(A.dense())
        assert w.min() > 0

    def test_symmetry_and_toeplitz_structure(self, params_s25):
        A = assemble_stiffness(build_grid(-1, 1, 12), params_s25)
        d = A.dense()
        assert np.array_equal(d, d.T)
        for i in range(11):
            for j in range(11):
                assert d[i, j] == A.entry(i, j)

    def test_partial_sums_of_generator_decay(self, params_s25):
        # whole-line constants are formally in the kernel: sum_k g(k) -> 0
        # with partial sums ~ K^{-2s}
        g = assemble_stiffness(build_grid(-1, 1, 4000), params_s25).generator
        def tail(K):
            return abs(g[0] + 2 * np.sum(g[1 : K + 1]))
        t100, t400, t1600 = tail(100), tail(400), tail(1600)
        assert t400 < t100 and t1600 < t400
        assert tail(1600) / tail(400) == pytest.approx(4.0 ** -0.5, rel=0.1)


class TestMass:
    def test_interior_row(self):
        g = build_grid(-1, 1, 8)
        M = assemble_mass(g).dense()
        h = g.h
        assert M[3, 2] == pytest.approx(h / 6)
        assert M[3, 3] == pytest.approx(4 * h / 6)
        assert M[3, 4] == pytest.approx(h / 6)
        # partition of unity: full row sums to h away from the boundary
        assert M[3].sum() == pytest.approx(h)

    def test_tent_plateau_value_matches_piecewise_oracle(self):
        # all-ones interior vector: plateau of height 1 with two end ramps
        g = build_grid(-1, 1, 8)
        M = assemble_mass(g)
        x = np.ones(g.n_interior)
        expected = l2_norm_squared_oracle(g, x)
        assert expected == pytest.approx(2 - 4 * g.h / 3, rel=1e-14)
        assert M.quadratic_form(x) == pytest.approx(expected, rel=1e-13)

    def test_positive_definite_gram(self, rng):
        g = build_grid(-1, 1, 24)
        M = assemble_mass(g)
        for _ in range(20):
            x = rng.standard_normal(g.n_interior)
            assert M.quadratic_form(x) > 0
        assert M.quadratic_form(np.zeros(g.n_interior)) == 0.0

    def test_random_vectors_match_piecewise_oracle(self, rng):
        g = build_grid(-1, 1, 17)
        M = assemble_mass(g)
        for _ in range(10):
            x = rng.standard_normal(g.n_interior)
            assert M.quadratic_form(x) == pytest.approx(
                l2_norm_squared_oracle(g, x), rel=1e-13
            )


class TestHardyForm:
    def test_center_hat_closed_form(self):
        g = build_grid(-1, 1, 2)  # single interior hat at 0, h = 1
        H = assemble_hardy_form(g, 0.25)
        expected = hat_center_hardy_oracle(0.25)
        assert expected == pytest.approx(32.0 / 15.0, rel=1e-15)
        assert H.quadratic_form(np.array([1.0])) == pytest.approx(expected, rel=1e-13)

    def test_center_hat_scaling_in_h(self):
        s = 0.25
        vals = []
        for n in (2, 4, 8):
            g = build_grid(-1, 1, n)
            H = assemble_hardy_form(g, s)
            x = np.zeros(g.n_interior)
            x[g.n_interior // 2] = 1.0
            vals.append(H.quadratic_form(x))
        assert vals[1] / vals[0] == pytest.approx(0.5 ** (1 - 2 * s), rel=1e-12)
        assert vals[2] / vals[1] == pytest.approx(0.5 ** (1 - 2 * s), rel=1e-12)

    def test_zero_vector(self):
        g = build_grid(-1, 1, 8)
        H = assemble_hardy_form(g, 0.25)
        assert H.quadratic_form(np.zeros(g.n_interior)) == 0.0

    def test_positive_semidefinite(self, rng):
        g = build_grid(-1, 1, 32)
        H = assemble_hardy_form(g, 0.4)
        for _ in range(50):
            x = rng.standard_normal(g.n_interior)
            assert H.quadratic_form(x) >= 0

    @pytest.mark.parametrize("s", [0.25, 0.4])
    def test_herbst_inequality_with_explicit_constant(self, s, rng):
        # both sides exact, so the sharp constant passes with no slack
        p = make_params(1, s)
        g = build_grid(-1, 1, 400)
        A = assemble_stiffness(g, p)
        H = assemble_hardy_form(g, s)
        for _ in range(1000):
            x = rng.standard_normal(g.n_interior)
            assert p.lambda_hardy * H.quadratic_form(x) <= (
                1 + 1e-10
            ) * A.quadratic_form(x)


def test_eigenvalue_lower_bound_from_hardy(params_s25, ops400, grid400):
    # trace bound gives lambda_1 >= Lambda / diam(Omega)^{2s}
    import scipy.linalg as sla

    A, M = ops400
    lam1 = sla.eigh(
        A.dense(), M.dense(), subset_by_index=[0, 0], eigvals_only=True
    )[0]
    assert lam1 >= params_s25.lambda_hardy / grid400.diameter() ** (2 * 0.25)
