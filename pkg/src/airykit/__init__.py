"""Airy process statistics via Fredholm determinants."""
from .airyfun import HAVE_CORE, airy, airy_scaled
from .fredholm import NumericError, det_i_minus, nystrom_det
from .kernels import BarrierFunction, TimeParameters
from .distributions import (CoverageError, DistributionTable, airy1_fdd, airy1_persistence,
                            airy2_fdd, airy2_sup_parabola, continuum_barrier_prob,
                            endpoint_joint_density, endpoint_marginals, f_goe, f_gue,
                            g_2to1, goe_mean, persistence_rate)
from .painleve import f_goe_painleve, f_gue_painleve, hastings_mcleod

__version__ = "0.1.0"

__all__ = ["HAVE_CORE", "airy", "airy_scaled", "NumericError", "det_i_minus", "nystrom_det",
           "BarrierFunction", "TimeParameters", "CoverageError", "DistributionTable", "airy1_fdd",
           "airy1_persistence", "airy2_fdd", "airy2_sup_parabola", "continuum_barrier_prob",
           "endpoint_joint_density", "endpoint_marginals", "f_goe", "f_gue", "g_2to1", "goe_mean",
           "persistence_rate", "f_goe_painleve", "f_gue_painleve", "hastings_mcleod"]
