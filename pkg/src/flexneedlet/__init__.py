"""Needlet frames on the sphere with flexible, non-geometric bandwidths."""

from .field import OscillatoryTerm, PowerSpectrum, sample_harmonics, sample_harmonics_batch
from .gof import SubsampleSpec, gof_statistic, moment_diagnostics, select_subsample, simulate_gof
from .grid import analyze, analyze_all, build_cubature, parseval_ratio, scale_grid, synthesize
from .harmonics import S2, SphereDim, gegenbauer, real_harmonics, zonal
from .kernel import (
    DifferenceOperator,
    FiniteSequence,
    covariance_kernel,
    localization_report,
    needlet_correlation,
    needlet_kernel,
)
from .scale import ScaleError, ScaleSequence, make_custom, make_geometric
from .window import WindowFamily, bump_integral, check_partition_of_unity

__version__ = "0.1.0"

__all__ = [
    "OscillatoryTerm", "PowerSpectrum", "sample_harmonics", "sample_harmonics_batch",
    "SubsampleSpec", "gof_statistic", "moment_diagnostics", "select_subsample", "simulate_gof",
    "analyze", "analyze_all", "build_cubature", "parseval_ratio", "scale_grid", "synthesize",
    "S2", "SphereDim", "gegenbauer", "real_harmonics", "zonal",
    "DifferenceOperator", "FiniteSequence", "covariance_kernel", "localization_report",
    "needlet_correlation", "needlet_kernel",
    "ScaleError", "ScaleSequence", "make_custom", "make_geometric",
    "WindowFamily", "bump_integral", "check_partition_of_unity",
]
