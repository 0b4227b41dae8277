import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liquidcard import roughness as rp
from liquidcard import spline_basis as sb
from liquidcard.scorecard import CharacteristicSpec, DiscreteAttribute

CH965 = [-2950, -950, -750, -550, -400, -300, -200, -100, 80, 1425]


def random_knots(rng, lo=-100.0, hi=100.0):
    m = int(rng.integers(5, 31))
    while True:
        knots = np.sort(rng.uniform(lo, hi, m))
        if np.all(np.diff(knots) > 1e-4 * (hi - lo)):
            return knots


class TestCharMatrix:
    def test_bernstein_spot_values(self):
        r = rp.char_roughness_matrix([0, 1])
        assert r.shape == (4, 4)
        assert abs(r[0, 0] - 12.0) < 1e-12
        assert abs(r[3, 3] - 12.0) < 1e-12
        assert abs(r[0, 3] - 6.0) < 1e-12
        # hand integral of 6(1-x) * (18x-12)
        assert abs(r[0, 1] + 18.0) < 1e-12

    def test_case_study_padding(self):
        r = rp.char_roughness_matrix(CH965, 0, 1)
        assert r.shape == (13, 13)
        assert np.all(r[-1, :] == 0.0) and np.all(r[:, -1] == 0.0)
        inner = rp.char_roughness_matrix(CH965)
        assert np.array_equal(r[:12, :12], inner)

    def test_constant_vector_zero_penalty(self):
        r = rp.char_roughness_matrix(CH965)
        ones = np.ones(12)
        assert abs(ones @ r @ ones) < 1e-9 * np.linalg.norm(r)

    def test_symmetry_exact(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            r = rp.char_roughness_matrix(random_knots(rng))
            assert np.array_equal(r, r.T)

    def test_rejects_negative_counts(self):
        with pytest.raises(ValueError):
            rp.char_roughness_matrix([0, 1], n_leading_discrete=-1)


class TestQuadratureOracle:
    def test_single_interval(self):
        closed = rp.char_roughness_matrix([0, 1])
        quad = rp.roughness_quadrature_oracle([0, 1])
        assert np.abs(closed - quad).max() < 1e-10 * np.linalg.norm(closed)

    def test_case_study_knots(self):
        closed = rp.char_roughness_matrix(CH965)
        quad = rp.roughness_quadrature_oracle(CH965)
        assert np.abs(closed - quad).max() < 1e-10 * np.linalg.norm(closed)

    def test_random_knot_sets(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            knots = random_knots(rng)
            closed = rp.char_roughness_matrix(knots)
            quad = rp.roughness_quadrature_oracle(knots)
            assert np.abs(closed - quad).max() < 1e-10 * np.linalg.norm(closed)


class TestInvariants:
    def test_null_space(self):
        rng = np.random.default_rng(3)
        for knots in [CH965, [0, 1], random_knots(rng)]:
            r = rp.char_roughness_matrix(knots)
            t = sb.build_t_vector(knots)
            norm = np.linalg.norm(r)
            assert np.abs(r @ np.ones(r.shape[0])).max() < 1e-9 * norm
            assert np.abs(r @ sb.greville_abscissae(t)).max() < 1e-9 * norm

    def test_positive_semidefinite(self):
        rng = np.random.default_rng(4)
        for knots in [CH965, random_knots(rng)]:
            r = rp.char_roughness_matrix(knots)
            assert np.linalg.eigvalsh(r).min() >= -1e-9 * np.linalg.norm(r)
            betas = rng.normal(size=(200, r.shape[0]))
            quad = np.einsum("ij,jk,ik->i", betas, r, betas)
            assert quad.min() >= -1e-9 * np.linalg.norm(r) * (betas**2).sum(axis=1).max()

    def test_scaling_law(self):
        base = rp.char_roughness_matrix(CH965)
        for s in (0.1, 10.0, 1000.0):
            scaled = rp.char_roughness_matrix(np.asarray(CH965, dtype=float) * s)
            expected = base * s**-3
            assert np.abs(scaled - expected).max() < 1e-9 * np.linalg.norm(expected)

    def test_bandedness(self):
        r = rp.char_roughness_matrix(CH965)
        idx = np.arange(r.shape[0])
        off_band = np.abs(idx[:, None] - idx[None, :]) > 3
        assert np.all(r[off_band] == 0.0)

    @settings(max_examples=20, deadline=None)
    @given(
        st.lists(st.floats(-50, 50, allow_nan=False), min_size=4, max_size=10, unique=True)
        .map(sorted)
        .filter(lambda k: min(np.diff(k)) > 0.05)
    )
    def test_linear_spline_zero_roughness(self, knots):
        r = rp.char_roughness_matrix(knots)
        t = sb.build_t_vector(knots)
        xi = sb.greville_abscissae(t)
        assert abs(xi @ r @ xi) <= 1e-9 * np.linalg.norm(r) * (xi @ xi)


class TestRampIntegrals:
    def test_quadrature_identities(self):
        # integral of ramp^2 is length/3; of rising*falling is length/6
        rng = np.random.default_rng(6)
        nodes, weights = np.polynomial.legendre.leggauss(3)
        for _ in range(50):
            lo = rng.uniform(-10, 10)
            length = rng.uniform(0.1, 20.0)
            hi = lo + length
            t = sb.build_t_vector([lo, hi])
            xs = 0.5 * length * nodes + 0.5 * (lo + hi)
            ws = 0.5 * length * weights
            k = 4  # the single live interval
            p = sb.rising_ramp(t, k, xs)
            n = sb.falling_ramp(t, k, xs)
            assert abs(ws @ (p * p) - length / 3.0) < 1e-12 * (length / 3.0)
            assert abs(ws @ (p * n) - length / 6.0) < 1e-12 * (length / 6.0)
            assert abs(ws @ (n * n) - length / 3.0) < 1e-12 * (length / 3.0)


class TestModelMatrix:
    def test_worked_block_example(self):
        # 2 order-1 attributes, 5 order-4 attributes (6 knots -> 8 liquid
        # coefficients), 1 order-1 attribute: 2 + (5 + 3) + 1 = 11
        knots = np.linspace(0, 5, 6)
        r = rp.char_roughness_matrix(knots, 2, 1)
        assert r.shape == (11, 11)
        assert np.all(r[:2, :] == 0.0) and np.all(r[:, :2] == 0.0)
        assert np.all(r[-1, :] == 0.0) and np.all(r[:, -1] == 0.0)
        assert np.any(r[2:10, 2:10] != 0.0)

    def test_discrete_only_blocks_are_zero(self):
        chars = (
            CharacteristicSpec(
                name="d3",
                column="d3",
                leading_discrete=tuple(
                    DiscreteAttribute(label=f"v{k}", values=(float(k),)) for k in range(3)
                ),
            ),
            CharacteristicSpec(
                name="d4",
                column="d4",
                leading_discrete=tuple(
                    DiscreteAttribute(label=f"v{k}", values=(float(k),)) for k in range(4)
                ),
            ),
        )
        r = rp.model_roughness_matrix(chars)
        assert r.shape == (7, 7)
        assert np.all(r == 0.0)

    def test_single_block_equals_char_matrix(self):
        char = CharacteristicSpec(
            name="x",
            column="x",
            liquid_knots=tuple(float(k) for k in CH965),
            trailing_discrete=(DiscreteAttribute(label="hi", lo=1425.0, hi=None, lo_open=True, hi_open=True),),
        )
        model = rp.model_roughness_matrix([char])
        alone = rp.char_roughness_matrix(CH965, 0, 1)
        assert np.array_equal(model, alone)

    def test_block_diagonal_layout(self):
        chars = (
            CharacteristicSpec(name="x", column="x", liquid_knots=(0.0, 1.0, 2.0)),
            CharacteristicSpec(name="y", column="y", liquid_knots=(0.0, 5.0)),
        )
        r = rp.model_roughness_matrix(chars)
        assert r.shape == (9, 9)
        assert np.all(r[:5, 5:] == 0.0) and np.all(r[5:, :5] == 0.0)
        assert np.array_equal(r[:5, :5], rp.char_roughness_matrix([0, 1, 2]))
        assert np.array_equal(r[5:, 5:], rp.char_roughness_matrix([0, 5]))
