"""Learning onset of the information bottleneck."""

from ._core import (
    ConvergenceError,
    Error,
    HigherOrderRequired,
    InvalidArgument,
    Joint,
    NoOnsetError,
    __version__,
    analyze_onset,
    binary_classification,
    chi2_information,
    discretize_gaussian,
    eta_chi2,
    eta_kl_bruteforce,
    fig1_joint,
    frontier,
    gaussian_onset,
    kl_divergence,
    kl_ratio,
    mutual_information,
    noisy_function,
    solve_ib,
    solve_onset,
)

__all__ = [name for name in dir() if not name.startswith("_")]
