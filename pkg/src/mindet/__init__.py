"""Distinct probability densities sharing every moment, built and verified on grids."""

from .charfun import (
    MomentVector,
    autocorrelation_charfun,
    charfun_from_density,
    density_from_charfun,
    moments_from_charfun,
    moments_from_density,
    reconciled_density,
    support_extent,
)
from .errors import *  # noqa: F401,F403
from .generators import BumpSpec, DisjointPairSpec, make_bump, make_disjoint_pair
from .grid_core import (
    CharFn,
    DensityFunction,
    Grid,
    GridFunction,
    distance,
    fourier_transform,
    inner_product,
    integrate,
    inverse_fourier_transform,
    spectral_derivative,
)
from .operators import (
    OperatorFamilySpec,
    OperatorSpec,
    apply_operator,
    apply_power,
    build_operator_family,
    check_self_adjoint,
    cross_charfun_components,
    evolve,
    evolve_oracle,
    operator_charfun,
    operator_moments,
)
from .stieltjes import (
    StieltjesFamilySpec,
    build_stieltjes_family,
    q_derivatives_at_zero,
    verify_finite_extent_condition,
)
from .verify import VerificationReport, two_path_moment_check, verify_family

__version__ = "0.1.0"
