import math

import numpy as np
import pytest

from conftest import simpson
from weakslit.csvio import load_wavestate_csv, save_wavestate_csv
from weakslit.qcore import (GaussianParams, Grid1D, WaveState, WeightedGaussian,
                            evolve_analytic, free_propagator, gaussian_amplitude,
                            inner_product, packet_center, packet_sigma,
                            propagate_grid, superposition_initial)


def kernel_quadrature_oracle(params, x_targets, t, n=32769, span=12.0):
    """Independent propagation oracle: Simpson quadrature of K against psi(x, 0)
    over the packet's support."""
    xs = np.linspace(params.x0 - span, params.x0 + span, n)
    psi0 = gaussian_amplitude(params, xs, 0.0)
    out = np.empty(len(x_targets), complex)
    for j, xt in enumerate(x_targets):
        out[j] = simpson(free_propagator(xt, t, xs, 0.0, m=params.m) * psi0, xs)
    return out


class TestGaussianAmplitude:
    def test_value_at_origin(self):
        # prefactor (2/pi)^(1/4) sqrt(dm)/sqrt(2 d^2 m) = (2/pi)^(1/4)/sqrt(2)
        g = GaussianParams(0.0, 0.0, 1.0, 1.0)
        val = gaussian_amplitude(g, 0.0, 0.0)
        assert val == pytest.approx(0.6316187777460647 + 0j, rel=1e-14)

    @pytest.mark.parametrize("t", [0.0, 1.0, 5.0, 20.0])
    def test_envelope_peak_at_center(self, t):
        g = GaussianParams(-3.0, 1.5, 0.8, 2.0)
        xc = packet_center(g, t)
        expected = (2 / math.pi) ** 0.25 * math.sqrt(g.d * g.m) \
            / abs(2 * g.d ** 2 * g.m + 1j * t) ** 0.5
        assert abs(gaussian_amplitude(g, xc, t)) == pytest.approx(expected, rel=1e-13)

    @pytest.mark.parametrize("t", [0.0, 2.5, 10.0])
    def test_unit_norm(self, t):
        g = GaussianParams(-10.0, 2.0, 1.0, 1.0)
        sig = packet_sigma(g, t)
        xs = np.linspace(packet_center(g, t) - 10 * sig,
                         packet_center(g, t) + 10 * sig, 40001)
        norm = np.trapezoid(np.abs(gaussian_amplitude(g, xs, t)) ** 2, xs)
        assert norm == pytest.approx(1.0, abs=1e-8)

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            GaussianParams(0, 0, -1.0, 1.0)
        with pytest.raises(ValueError):
            GaussianParams(0, 0, 1.0, 0.0)


class TestPacketCenter:
    def test_arithmetic(self):
        assert packet_center(GaussianParams(-10, 2, 1, 1), 5.0) == 0.0
        assert packet_center(GaussianParams(3, 0, 1, 1), 100.0) == 3.0
        assert packet_center(GaussianParams(-10, 2, 1, 1), 10.0) == 10.0


class TestFreePropagator:
    def test_modulus_position_independent(self):
        k = free_propagator(np.array([0.0, 3.0, -17.0]), 10.0, 1.0, 2.5)
        expected = math.sqrt(1.0 / (2 * math.pi * 7.5))
        assert np.allclose(np.abs(k), expected, rtol=1e-13)

    def test_rejects_bad_times(self):
        with pytest.raises(ValueError):
            free_propagator(0.0, 1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            free_propagator(0.0, 1.0, 0.0, 2.0)

    def test_short_time_phase_is_delta_like(self):
        # principal branch: K(x, t; x, 0) has phase exp(-i pi/4)
        k = free_propagator(0.0, 1e-4, 0.0, 0.0)
        assert np.angle(k) == pytest.approx(-math.pi / 4, abs=1e-12)

    def test_semigroup_composition(self):
        # Int K(x3,t3; x2,t2) K(x2,t2; x1,t1) dx2 = K(x3,t3; x1,t1).
        # The integrand is pure phase, so a smooth taper over the last 10%
        # of the window removes the non-decaying boundary contribution.
        x1, x3 = -1.0, 2.0
        t1, t2, t3 = 0.0, 1.0, 2.5
        L = 600.0
        x2 = np.linspace(-L, L, 2 ** 20 + 1)
        integrand = free_propagator(x3, t3, x2, t2) * free_propagator(x2, t2, x1, t1)
        taper = np.ones_like(x2)
        edge = np.abs(x2) > 0.9 * L
        taper[edge] = np.cos(0.5 * np.pi * (np.abs(x2[edge]) - 0.9 * L) / (0.1 * L)) ** 2
        val = simpson(integrand * taper, x2)
        expected = free_propagator(x3, t3, x1, t1)
        assert abs(val - expected) < 2e-5

    def test_quadrature_propagation_matches_analytic(self):
        g = GaussianParams(0.0, 2.0, 1.0, 1.0)
        targets = np.linspace(-4.0, 8.0, 25)
        oracle = kernel_quadrature_oracle(g, targets, 1.0)
        exact = gaussian_amplitude(g, targets, 1.0)
        assert np.max(np.abs(oracle - exact)) < 1e-6


class TestSuperposition:
    def test_vanishes_at_midpoint(self, two_packet_state):
        mid = np.argmin(np.abs(two_packet_state.grid.x))
        # antisymmetric mirror packets cancel up to exp(-x0^2/2d^2)-scale tails
        assert abs(two_packet_state.amplitudes[mid]) < 1e-10

    def test_norm_is_one_up_to_overlap(self, two_packet_state):
        assert two_packet_state.norm() == pytest.approx(1.0, abs=1e-10)

    def test_density_mirror_symmetric(self, two_packet_state):
        rho = np.abs(two_packet_state.amplitudes) ** 2
        assert np.max(np.abs(rho - rho[::-1])) < 1e-14

    def test_warns_on_overlapping_packets(self, grid):
        with pytest.warns(UserWarning):
            superposition_initial(2.0, 2.0, 1.0, 1.0, grid)

    def test_minus_sign_convention(self, two_packet_state):
        weights = [c.weight for c in two_packet_state.components]
        assert weights[0] == pytest.approx(1 / math.sqrt(2))
        assert weights[1] == pytest.approx(-1 / math.sqrt(2))


class TestEvolveAnalytic:
    def test_single_component_matches_gaussian(self, grid, packet_left):
        st = evolve_analytic([WeightedGaussian(1.0, packet_left)], 3.0, grid)
        assert np.allclose(st.amplitudes,
                           gaussian_amplitude(packet_left, grid.x, 3.0),
                           rtol=0, atol=1e-14)

    def test_packets_swap_sides(self, two_packet_state, grid):
        st = evolve_analytic(two_packet_state.components, 10.0, grid)
        rho = np.abs(st.amplitudes) ** 2
        x = grid.x
        # density centroid of each half sits at the swapped packet center
        for sel, target in ((x < 0, -10.0), (x > 0, 10.0)):
            centroid = np.trapezoid(x[sel] * rho[sel], x[sel]) \
                / np.trapezoid(rho[sel], x[sel])
            assert centroid == pytest.approx(target, abs=0.2)
        # interference fringes shift the raw maxima only slightly
        peak = x[np.argmax(rho)]
        assert min(abs(peak - 10.0), abs(peak + 10.0)) < 0.5

    @pytest.mark.parametrize("t", [0.0, 2.5, 5.0, 7.5, 10.0])
    def test_norm_conservation(self, two_packet_state, wide_grid, t):
        st = evolve_analytic(two_packet_state.components, t, wide_grid)
        assert st.norm() == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("t", [0.0, 2.5, 4.0, 10.0])
    def test_mirror_antisymmetry(self, two_packet_state, grid, t):
        # psi_2(x) = psi_1(-x) makes the state exactly antisymmetric at all t
        st = evolve_analytic(two_packet_state.components, t, grid)
        assert np.max(np.abs(st.amplitudes[::-1] + st.amplitudes)) < 1e-13


class TestInnerProduct:
    def test_self_product_is_norm_squared(self, two_packet_state):
        ip = inner_product(two_packet_state, two_packet_state)
        assert ip.imag == pytest.approx(0.0, abs=1e-15)
        assert ip.real == pytest.approx(two_packet_state.norm() ** 2, rel=1e-12)

    def test_separated_packets_orthogonal(self, grid, packet_left, packet_right):
        a = evolve_analytic([WeightedGaussian(1.0, packet_left)], 0.0, grid)
        b = evolve_analytic([WeightedGaussian(1.0, packet_right)], 0.0, grid)
        assert abs(inner_product(a, b)) < 1e-10

    def test_hermitian_symmetry(self, grid):
        a = evolve_analytic([WeightedGaussian(1.0, GaussianParams(-2, 1, 1, 1))],
                            0.5, grid)
        b = evolve_analytic([WeightedGaussian(0.5 + 0.5j,
                                              GaussianParams(1, -1, 2, 1))],
                            0.5, grid)
        assert inner_product(a, b) == pytest.approx(np.conj(inner_product(b, a)))

    def test_grid_mismatch_rejected(self, grid, packet_left):
        a = evolve_analytic([WeightedGaussian(1.0, packet_left)], 0.0, grid)
        other = Grid1D(-40.0, 40.0, 1024)
        b = evolve_analytic([WeightedGaussian(1.0, packet_left)], 0.0, other)
        with pytest.raises(ValueError):
            inner_product(a, b)
        c = evolve_analytic([WeightedGaussian(1.0, packet_left)], 1.0, grid)
        with pytest.raises(ValueError):
            inner_product(a, c)


class TestGridPropagation:
    def test_matches_analytic_at_moderate_time(self, grid, packet_left):
        st = evolve_analytic([WeightedGaussian(1.0, packet_left)], 0.0, grid)
        psi = propagate_grid(st, 2.5)
        exact = gaussian_amplitude(packet_left, grid.x, 2.5)
        assert np.max(np.abs(psi - exact)) < 1e-5


class TestGrid1D:
    def test_invariants(self):
        with pytest.raises(ValueError):
            Grid1D(1.0, -1.0, 100)
        with pytest.raises(ValueError):
            Grid1D(0.0, 1.0, 1)
        g = Grid1D(0.0, 1.0, 11)
        assert g.dx == pytest.approx(0.1)

    def test_wavestate_validation(self, grid):
        with pytest.raises(ValueError):
            WaveState(grid=grid, amplitudes=np.zeros(7, complex), t=0.0)


class TestCsvRoundTrip:
    def test_wavestate_round_trip(self, tmp_path, two_packet_state):
        path = tmp_path / "state.csv"
        save_wavestate_csv(two_packet_state, path)
        text = path.read_text()
        assert text.splitlines()[0].startswith("#")
        loaded = load_wavestate_csv(path)
        assert loaded.t == two_packet_state.t
        assert np.array_equal(loaded.amplitudes, two_packet_state.amplitudes)
        assert loaded.grid == two_packet_state.grid
