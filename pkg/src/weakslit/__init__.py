"""weakslit: weak values, weak trajectories and Bohmian dynamics for a
one-dimensional two-wavepacket interference setup with weakly coupled pointers."""

__version__ = "0.1.0"

from .qcore import (  # noqa: F401
    ATOMIC_UNITS,
    GaussianParams,
    Grid1D,
    PhysicalConstants,
    WaveState,
    WeightedGaussian,
    evolve_analytic,
    free_propagator,
    gaussian_amplitude,
    inner_product,
    packet_center,
    superposition_initial,
)
