"""Phase-space quasi-distributions with correct marginals: the
anti-standard (Kirkwood-Rihaczek) family, Wigner, Cohen-class kernels,
and the Cahill-Glauber s-ordered functions, with both a wavefunction-grid
engine and a truncated-Fock-basis operator engine, state reconstruction
from anti-standard samples, free time evolution, a diagnostics suite,
and a command-line front end (see qpsf.cli)."""

from .errors import (
    ConfigurationError,
    DomainError,
    QpsfError,
    TruncationError,
    ValidationError,
)
from .grids import (
    Axis,
    CoverageWarning,
    MomentumField,
    PhaseField,
    PhaseGrid,
    PositionGrid,
    WaveField,
    forward_fourier,
    fourier_sum,
    integrate_2d,
    inverse_fourier,
    momentum_on_axis,
)
from .states import (
    CoherentParams,
    PlaneWavePairParams,
    SqueezeParams,
    cat_wave,
    coherent_cat_norm,
    coherent_wave,
    fock_wave,
    oracle_generalized_kr_coherent,
    oracle_kr_cat,
    oracle_kr_fock1,
    plane_wave_pair,
    squeezed_cat_wave,
    squeezed_coherent_wave,
)
from .distributions import (
    AmbiguityField,
    CohenKernel,
    ambiguity,
    cohen,
    kirkwood_rihaczek,
    kr_kernel,
    margenau_hill,
    marginals,
    mh_kernel,
    product_distribution,
    sigma_kernel,
    sigma_kr,
    unit_kernel,
    wigner,
)
from .fock import (
    characteristic_sigma,
    displacement,
    displacement_expectation,
    fidelity,
    generalized_kr,
    k_sigma_operator,
    kr_basis_overlap,
    ladder_ops,
    omega_transform,
    phase_space_trace,
    reconstruct,
    s_ordered,
    squeeze,
    squeezed_projection_kr,
)
from .evolution import FreeEvolutionParams, evolve_kr_field, evolve_wave, residual_of_pde
from .diagnostics import (
    CheckReport,
    check_kr_identities,
    check_marginals,
    check_normalization,
    check_reality_wigner,
)

__version__ = "0.1.0"
