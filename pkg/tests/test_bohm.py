import math

import numpy as np
import pytest

from weakslit import qcore
from weakslit._accel import NUMBA_AVAILABLE
from weakslit._kernels import rk4_free_mixture_ensemble_numpy
from weakslit.bipartite import BoxBasis, CoupledEvolver, pointer_with_integrated_g
from weakslit.bohm import (IntegratorConfig, coupled_trajectory_ensemble,
                           crossing_count, integrate_trajectory, ks_distance,
                           sample_initial_positions, trajectory_ensemble,
                           velocity_1d, velocity_2d)
from weakslit.qcore import GaussianParams, WeightedGaussian, superposition_initial
from weakslit.weakval import WindowProfile

PACKET = GaussianParams(-10.0, 2.0, 1.0, 1.0)


def two_packets():
    return (WeightedGaussian(1 / math.sqrt(2), GaussianParams(-10, 2, 1, 1)),
            WeightedGaussian(-1 / math.sqrt(2), GaussianParams(10, -2, 1, 1)))


def fig3_starts():
    offs = np.arange(-1.25, 1.2501, 0.25)
    return np.concatenate([-10.0 + offs, 10.0 + offs])


class TestVelocity1D:
    def test_packet_center_moves_classically(self):
        for t in (0.0, 2.5, 7.0):
            xc = qcore.packet_center(PACKET, t)
            v = velocity_1d([WeightedGaussian(1.0, PACKET)], xc, t)
            assert v == pytest.approx(2.0, rel=1e-12)

    def test_midpoint_node_has_zero_velocity(self):
        for t in (1.0, 5.0, 9.0):
            assert velocity_1d(two_packets(), 0.0, t) == pytest.approx(0.0,
                                                                       abs=1e-9)

    def test_analytic_vs_finite_difference(self):
        # centered differences need dx^2 |psi'''/psi| / 6 below the tolerance
        fine = qcore.Grid1D(-40.0, 40.0, 32769)
        state = superposition_initial(10.0, 2.0, 1.0, 1.0, fine)
        st = qcore.evolve_analytic(state.components, 3.0, fine)
        bare = qcore.WaveState(grid=fine, amplitudes=st.amplitudes, t=3.0,
                               components=None)
        sel = (fine.x > -6.0) & (fine.x < -2.0)  # left packet, no nodes
        xs = fine.x[sel][::32]
        va = velocity_1d(st.components, xs, 3.0)
        vg = velocity_1d(bare, xs, 3.0)
        assert np.max(np.abs(va - vg)) < 1e-4


@pytest.fixture(scope="module")
def free_setup():
    prof = WindowProfile(center=-5.0, width=0.5, shape="gaussian")
    ptr = pointer_with_integrated_g(M=10.0, y_init=-5.0, sigma_y=2.0,
                                    g=0.0, t_w=2.5, duration=0.4,
                                    window=prof)
    basis = BoxBasis(L_x=120.0, L_y=40.0, N_x=256, N_y=32,
                     x_offset=-60.0, y_offset=-25.0)
    ev = CoupledEvolver(basis, ptr)
    st = ev.evolve(ev.project_initial([WeightedGaussian(1.0, PACKET)]), 3.0)
    return ev, st


class TestVelocity2D:
    def test_product_state_velocities_factorize(self, free_setup):
        ev, st = free_setup
        xs = np.linspace(-8.0, 0.0, 9)
        vx, vy = velocity_2d(ev, st, xs, np.full_like(xs, -5.0))
        v1 = velocity_1d([WeightedGaussian(1.0, PACKET)], xs, 3.0)
        assert np.max(np.abs(vx - v1)) < 1e-8

    def test_stationary_pointer_center_velocity_zero(self, free_setup):
        ev, st = free_setup
        _, vy = velocity_2d(ev, st, np.array([-4.0]), np.array([-5.0]))
        # the pointer Gaussian spreads symmetrically about its center
        assert abs(vy[0]) < 1e-8


class TestIntegrateTrajectory:
    def test_packet_center_is_straight_line(self):
        comps = [WeightedGaussian(1.0, PACKET)]

        def vel(x, t):
            return velocity_1d(comps, x, t)

        tr = integrate_trajectory([-10.0], vel, IntegratorConfig(dt=1e-2),
                                  0.0, 10.0)
        expected = -10.0 + 2.0 * tr.t
        assert np.max(np.abs(tr.x - expected)) < 1e-6

    def test_time_reversal(self):
        comps = two_packets()

        def vel(x, t):
            return velocity_1d(comps, x, t)

        cfg = IntegratorConfig(dt=5e-3)
        fwd = integrate_trajectory([8.5], vel, cfg, 0.0, 10.0)
        back = integrate_trajectory([fwd.x[-1]], vel, cfg, 10.0, 0.0)
        assert abs(back.x[-1] - 8.5) < 1e-4


class TestFreeEnsemble:
    def test_right_packet_trajectories_never_cross(self):
        ens = trajectory_ensemble(two_packets(), fig3_starts(), 10.0,
                                  IntegratorConfig(dt=1e-2))
        assert crossing_count(ens) == 0
        finals = np.array([tr.x[-1] for tr in ens[11:]])
        assert np.all(finals > 0)
        sigma_f = qcore.packet_sigma(PACKET, 10.0)
        assert np.all(np.abs(finals - 10.0) < 4 * sigma_f)

    def test_trajectories_turn_back_at_midpoint(self):
        # the innermost right start first moves left, then turns around
        ens = trajectory_ensemble(two_packets(), np.array([8.75]), 10.0,
                                  IntegratorConfig(dt=1e-2), record_stride=10)
        x = ens[0].x
        assert x.min() < 8.75 - 1.0
        assert x[-1] > x.min() + 1.0

    def test_ordering_preserved(self):
        # dt must resolve the fringe-scale velocity variation in the
        # full-overlap region; 5e-3 keeps the flow ordering strict
        rng = np.random.default_rng(3)
        starts = np.sort(sample_initial_positions(two_packets(), 101, rng))
        ens = trajectory_ensemble(two_packets(), starts, 10.0,
                                  IntegratorConfig(dt=5e-3), record_stride=50)
        pos = np.stack([tr.x for tr in ens], axis=1)
        assert np.all(np.diff(pos, axis=1) > -1e-9)

    def test_equivariance(self):
        rng = np.random.default_rng(42)
        starts = sample_initial_positions(two_packets(), 2000, rng)
        ens = trajectory_ensemble(two_packets(), starts, 10.0,
                                  IntegratorConfig(dt=1e-2), record_stride=1000)
        finals = [tr.x[-1] for tr in ens]
        assert ks_distance(finals, two_packets(), 10.0, -60.0, 60.0) < 0.05

    def test_dt_convergence(self):
        # every trajectory rides through the fully overlapped fringe epoch,
        # which sets the step scale: halving from 5e-3 moves endpoints by
        # ~1e-6 (4th-order convergence, measured ratio ~16 per halving)
        starts = np.array([-10.5, 9.5])
        f1 = trajectory_ensemble(two_packets(), starts, 10.0,
                                 IntegratorConfig(dt=5e-3), record_stride=2000)
        f2 = trajectory_ensemble(two_packets(), starts, 10.0,
                                 IntegratorConfig(dt=2.5e-3), record_stride=4000)
        d = max(abs(f1[i].x[-1] - f2[i].x[-1]) for i in range(2))
        assert d < 1e-5

    @pytest.mark.skipif(not NUMBA_AVAILABLE, reason="numba not installed")
    def test_numba_and_numpy_paths_agree(self):
        from weakslit._kernels import rk4_free_mixture_ensemble_numba
        comps = two_packets()
        w = np.array([complex(c.weight) for c in comps])
        x0 = np.array([c.params.x0 for c in comps])
        p0 = np.array([c.params.p0 for c in comps])
        d = np.array([c.params.d for c in comps])
        ms = np.array([c.params.m for c in comps])
        starts = np.array([-9.0, 8.5, 11.0])
        args = (starts, 0.0, 1e-2, 1000, 100, w, x0, p0, d, ms, 1.0, 1.0,
                1e-12, 50.0)
        t_a, p_a, c_a = rk4_free_mixture_ensemble_numba(*args)
        t_b, p_b, c_b = rk4_free_mixture_ensemble_numpy(*args)
        assert np.array_equal(c_a, c_b)
        assert np.max(np.abs(p_a - p_b)) < 1e-10


class TestCoupledEnsemble:
    @pytest.mark.slow
    def test_weak_coupling_matches_free_flow(self, grid):
        # weak coupling leaves the trajectories close to the free ones
        state = superposition_initial(10.0, 2.0, 1.0, 1.0, grid)
        prof = WindowProfile(center=-5.0, width=0.5, shape="gaussian")
        ptr = pointer_with_integrated_g(M=10.0, y_init=-5.0, sigma_y=2.0,
                                        g=0.05, t_w=2.5, duration=0.4,
                                        window=prof)
        basis = BoxBasis(L_x=120.0, L_y=40.0, N_x=512, N_y=48,
                         x_offset=-60.0, y_offset=-25.0)
        ev = CoupledEvolver(basis, ptr)
        st0 = ev.project_initial(state)
        starts = fig3_starts()
        starts_xy = np.column_stack([starts, np.full(len(starts), -5.0)])
        trajs, _ = coupled_trajectory_ensemble(ev, st0, starts_xy, 10.0,
                                               IntegratorConfig(dt=1e-2))
        assert crossing_count(trajs) == 0
        free = trajectory_ensemble(two_packets(), starts, 10.0,
                                   IntegratorConfig(dt=1e-2), record_stride=10)
        dev = max(np.max(np.abs(np.interp(trajs[i].t, free[i].t, free[i].x)
                                - trajs[i].x)) for i in range(len(starts)))
        assert dev < 0.5
