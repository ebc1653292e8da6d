"""Hardcore ("truncated") Poisson laws for reinfection counts under immunity."""

from .calibration import Observation, calibrate, estimate_alpha, estimate_nu
from .core import (
    Pmf,
    classical_pmf,
    full_limit_pmf,
    full_pmf,
    hardcore_term,
    limit_pmf_term,
    limit_support,
    pmf_closed,
    pmf_derivative,
    pmf_direct,
    poisson_pmf,
    support_max,
)
from .multistrain import JointPmf, StrainSet, multi_pmf, pi1_two_strain_explicit, total_count_pmf
from .oracles import SimConfig, SimReport, compare, enumerate_exact, simulate
from .params import ContinuousParams, DomainError, LatticeParams, ResourceError
from .series import gf_closed, pmf_from_gf, pmf_telescoped, series_of_rational, tiling_recurrence

__version__ = "0.1.0"
