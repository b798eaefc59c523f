"""Exact few-photon (n <= 3) scattering through the chiral emitter array.

The output state is assembled as input + sum over eigenstate classes of
(t^N - 1)-weighted reconstructions, which is algebraically identical to
the raw eigenbasis decomposition but numerically better conditioned: the
vanishing multiplier suppresses the slowly decaying projection tails, and
N = 0 is the exact identity by construction.  The raw decomposition
itself is validated separately through the identity_residual diagnostics.
"""

from wqed.scatter.single import WaveFn1, scatter_one, transmission_single
from wqed.scatter.twophoton import (
    WaveFn2,
    eval_two_photon_eigenstate,
    project_two_gaussian,
    scatter_two,
    two_photon_identity_residual,
)
from wqed.scatter.threephoton import (
    WaveFn3,
    bound_pair_plus_single,
    gaussian_product_3,
    scatter_three,
    three_photon_identity_residual,
)
from wqed.scatter.observables import (
    CoherentOutput,
    ObservableSet,
    coherent_output,
    fock_observables,
    observables,
    window_statistics,
)

__all__ = [
    "WaveFn1", "WaveFn2", "WaveFn3",
    "scatter_one", "scatter_two", "scatter_three",
    "transmission_single", "eval_two_photon_eigenstate", "project_two_gaussian",
    "two_photon_identity_residual", "three_photon_identity_residual",
    "gaussian_product_3", "bound_pair_plus_single",
    "CoherentOutput", "ObservableSet", "coherent_output", "observables",
    "fock_observables", "window_statistics",
]
