from enum import Enum
from typing import Set


class EstimatorType(Enum):
    H1 = 'h1'
    H2 = 'h2'
    C2 = 'c2'

    def is_hurst(self) -> bool:
        """
        Returns: bool: Whether the estimator targets the Hurst index.
        """
        return self in {EstimatorType.H1, EstimatorType.H2}


FLAG_CLAMPED = 'clamped'
FLAG_BOUNDARY_INVERSION = 'boundary_inversion'
FLAG_DEGENERATE = 'degenerate'
FLAG_FAILED = 'failed'


class HurstEstimate:
    """
    Container for a Hurst index estimate.
    """

    def __init__(self,
                 value: float,
                 raw_value: float,
                 std_error: float,
                 ci_low: float,
                 ci_high: float,
                 level: float,
                 estimator: EstimatorType,
                 flags: Set[str]) -> None:
        """
        Initializes a HurstEstimate object.

        Args:
          value (float): Estimate clamped to (0, 1).
          raw_value (float): Estimate before clamping.
          std_error (float): Asymptotic standard error at the estimate.
          ci_low (float): Lower bound of the normal confidence interval.
          ci_high (float): Upper bound of the normal confidence interval.
          level (float): Confidence level of the interval.
          estimator (EstimatorType): Estimator that produced the result (h1 or h2).
          flags (Set[str]): Subset of {clamped, boundary_inversion}.
        """

        self.value = value
        self.raw_value = raw_value
        self.std_error = std_error
        self.ci_low = ci_low
        self.ci_high = ci_high
        self.level = level
        self.estimator = estimator
        self.flags = flags


class VolatilityEstimate:
    """
    Container for an estimate of the squared volatility c^2.
    """

    def __init__(self,
                 c2: float,
                 std_error: float,
                 ci_low: float,
                 ci_high: float,
                 level: float,
                 h_used: float,
                 flags: Set[str]) -> None:
        """
        Initializes a VolatilityEstimate object.

        Args:
          c2 (float): Estimate of c^2, nonnegative.
          std_error (float): Asymptotic standard error.
          ci_low (float): Lower interval bound, clipped at 0.
          ci_high (float): Upper interval bound.
          level (float): Confidence level of the interval.
          h_used (float): Plug-in Hurst index the statistic was evaluated with.
          flags (Set[str]): Subset of {degenerate}.
        """

        self.c2 = c2
        self.std_error = std_error
        self.ci_low = ci_low
        self.ci_high = ci_high
        self.level = level
        self.h_used = h_used
        self.flags = flags

    @property
    def value(self) -> float:
        return self.c2


class AsymVariances:
    """
    Limiting variances of the normalized quadratic variation of second order fBm increments.
    """

    def __init__(self,
                 H: float,
                 sigma2: float,
                 sigma1_sq: float,
                 sigma2_sq: float,
                 sigma12: float,
                 sigma_star2: float,
                 c1: float,
                 c2coef: float,
                 truncation_terms: int,
                 tail_bound: float) -> None:
        """
        Initializes an AsymVariances object.

        Args:
          H (float): Hurst index in (1/2, 1).
          sigma2 (float): Limiting variance of sqrt(n)(V_n - 1).
          sigma1_sq (float): Lag-two companion series.
          sigma2_sq (float): Lag-one companion series.
          sigma12 (float): Limiting covariance of sqrt(n)(V_n - 1) and sqrt(n)(V_2n - 1).
          sigma_star2 (float): Limiting variance of the two-scale Hurst estimator.
          c1 (float): Series coefficient c1(H).
          c2coef (float): Constant c2(H).
          truncation_terms (int): Number of series terms summed.
          tail_bound (float): Bound on the neglected tail of sigma2.
        """

        self.H = H
        self.sigma2 = sigma2
        self.sigma1_sq = sigma1_sq
        self.sigma2_sq = sigma2_sq
        self.sigma12 = sigma12
        self.sigma_star2 = sigma_star2
        self.c1 = c1
        self.c2coef = c2coef
        self.truncation_terms = truncation_terms
        self.tail_bound = tail_bound
