import math
from typing import Tuple, Union, Optional, Sequence

import numpy as np
from scipy.optimize import bisect
from scipy.stats import norm

from fsde.process.fbm import FbmPath, second_order_increments
from fsde.process.sde import SamplePath
from fsde.result import HurstEstimate, VolatilityEstimate, EstimatorType, \
    FLAG_CLAMPED, FLAG_BOUNDARY_INVERSION, FLAG_DEGENERATE
from fsde.estimation.variances import asym_variances
from fsde.utils.errors import EstimationError

Path = Union[SamplePath, FbmPath]

# bracket [DELTA, 1 - DELTA] of the Hurst index inversion
DELTA = 1e-6
INVERSION_XTOL = 1e-12

# plug-in Hurst indices for the limiting variances are clipped into this range
PLUGIN_RANGE = (0.5005, 0.9995)

LN2 = math.log(2.)

# second differences within this many ulps of the path scale count as zero
DEGENERACY_ULPS = 8


def _check_level(level: float) -> None:
    if not 0. < level < 1.:
        raise ValueError(f'Confidence level must lie in (0, 1), got level={level}')


def _normal_interval(value: float, std_error: float, level: float) -> Tuple[float, float]:
    z = norm.ppf(0.5 * (1. + level))
    return value - z * std_error, value + z * std_error


def _plugin(H: float) -> float:
    return min(max(H, PLUGIN_RANGE[0]), PLUGIN_RANGE[1])


def _normalized_increments(path: Path) -> np.ndarray:
    """ Delta^2 X_k / X_k for the interior points k = 1..n-1. """
    values = np.asarray(path.values, dtype=float)
    if len(values) < 3:
        raise EstimationError(f'Estimation needs at least 3 path values, got {len(values)}')
    if not np.all(np.isfinite(values)) or not np.all(values > 0):
        raise EstimationError('Estimation needs positive finite path values.')
    return second_order_increments(values) / values[1:-1]


def is_degenerate(path: Path) -> bool:
    """
    Whether all second order increments of the path vanish up to rounding, as for
    constant or linear paths. Such paths carry no information on H or c.

    Args:
      path (Path): Observed path.

    Returns:
      bool: True if max |Delta^2 X_k| <= DEGENERACY_ULPS * eps * max |X_k|.
    """

    values = np.asarray(path.values, dtype=float)
    scale = float(np.max(np.abs(values)))
    return float(np.max(np.abs(second_order_increments(values)))) <= DEGENERACY_ULPS * np.finfo(float).eps * scale


def vnt(path_values: Sequence[float], T: float, H: float) -> float:
    """
    Normalized quadratic variation of second order increments,
    V_{n,T} = n^{2H-1} / (4 - 2^{2H}) sum_k (T^{-H} Delta^2 B_k)^2, which tends to 1
    for fractional Brownian motion with Hurst index H.

    Args:
      path_values (Sequence[float]): Path values on the grid kT/n, k = 0..n.
      T (float): Time horizon.
      H (float): Hurst index in (1/2, 1).

    Returns:
      float: The statistic.
    """

    values = np.asarray(path_values, dtype=float)
    if len(values) < 3:
        raise EstimationError(f'V_n,T needs at least 3 values, got {len(values)}')
    if not 0.5 < H < 1.:
        raise ValueError(f'Hurst index must lie in (1/2, 1), got H={H}')
    if not T > 0:
        raise ValueError(f'Time horizon must be positive, got T={T}')
    n = len(values) - 1
    increments = second_order_increments(values) * T ** (-H)
    return float(n ** (2. * H - 1.) / (4. - 2. ** (2. * H)) * np.sum(increments ** 2))


def phi(n: int, T: float, x: float) -> float:
    """
    phi_{n,T}(x) = (T/n)^{2x} (4 - 2^{2x}), the expected mean square of the second
    order increments of a unit fBm with Hurst index x. Strictly decreasing in x for n > T.

    Args:
      n (int): Number of subintervals.
      T (float): Time horizon, T < n.
      x (float): Argument in (0, 1).

    Returns:
      float: phi_{n,T}(x).
    """

    if not n > T:
        raise ValueError(f'phi is only invertible for n > T, got n={n}, T={T}')
    return (T / n) ** (2. * x) * (4. - 2. ** (2. * x))


def phi_log_slope(n: int, T: float, x: float) -> float:
    """
    -d ln phi_{n,T}(x) / dx = 2 ln(n/T) + 2^{2x+1} ln2 / (4 - 2^{2x}), the factor that maps
    relative errors of the h1 statistic to errors in H. Tends to 2 ln(n/T) relative to n.

    Args:
      n (int): Number of subintervals.
      T (float): Time horizon, T < n.
      x (float): Argument in (0, 1).

    Returns:
      float: The slope, positive for n > T.
    """

    if not n > T:
        raise ValueError(f'phi is only invertible for n > T, got n={n}, T={T}')
    two_x = 2. * x
    return 2. * math.log(n / T) + 2. ** (two_x + 1.) * LN2 / (4. - 2. ** two_x)


def phi_inverse(n: int, T: float, y: float) -> Tuple[float, bool]:
    """
    Inverts phi_{n,T} on [DELTA, 1 - DELTA] by bisection of log phi.

    Args:
      n (int): Number of subintervals.
      T (float): Time horizon, T < n.
      y (float): Value to invert.

    Returns:
      Tuple[float, bool]: The preimage and whether y was unattainable, in which case
      the nearer bracket endpoint is returned.
    """

    lower, upper = DELTA, 1. - DELTA
    if not y > 0 or y < phi(n, T, upper):
        return upper, True
    if y > phi(n, T, lower):
        return lower, True
    log_y = math.log(y)

    def f(x: float) -> float:
        return 2. * x * math.log(T / n) + math.log(4. - 2. ** (2. * x)) - log_y

    # f is decreasing, bisect needs a strict sign change
    if f(lower) <= 0:
        return lower, False
    if f(upper) >= 0:
        return upper, False
    return bisect(f, lower, upper, xtol=INVERSION_XTOL), False


def estimate_h1(path: Path, c: float, level: float = 0.95) -> HurstEstimate:
    """
    Hurst index estimator for known volatility c. The mean of (Delta^2 X_k / (c X_k))^2
    over the path is mapped back through phi_inverse. The standard error is
    sigma(H) / (sqrt(n) phi_log_slope(n, T, H)) at the estimate, whose leading term is the
    limit law 2 sqrt(n) ln(n/T) (H1 - H) -> N(0, sigma^2(H)).

    Args:
      path (Path): Observed path (SamplePath or FbmPath) on the grid kT/n.
      c (float): Known volatility, nonzero.
      level (float): Confidence level. (Default value = 0.95)

    Returns:
      HurstEstimate: The estimate, flagged boundary_inversion if the statistic is not attainable.
    """

    if c == 0:
        raise ValueError('Volatility must be nonzero, got c=0')
    _check_level(level)
    n, T = path.grid.n, path.grid.T
    statistic = float(np.sum((_normalized_increments(path) / c) ** 2)) / n
    if is_degenerate(path):
        value, at_boundary = 1. - DELTA, True
    else:
        value, at_boundary = phi_inverse(n, T, statistic)

    plugin = _plugin(value)
    std_error = math.sqrt(asym_variances(plugin).sigma2) / (math.sqrt(n) * phi_log_slope(n, T, plugin))
    ci_low, ci_high = _normal_interval(value, std_error, level)
    flags = {FLAG_BOUNDARY_INVERSION} if at_boundary else set()
    return HurstEstimate(value=value, raw_value=value, std_error=std_error,
                         ci_low=ci_low, ci_high=ci_high, level=level,
                         estimator=EstimatorType.H1, flags=flags)


def estimate_h2(path: Path, level: float = 0.95) -> HurstEstimate:
    """
    Two-scale Hurst index estimator, free of the volatility. The path lives on a 2n grid
    (2n + 1 values), the coarse n grid is every second point, and
    H2 = 1/2 - ln(S_2n / S_n) / (2 ln 2) with S the sums of (Delta^2 X_k / X_k)^2.

    Args:
      path (Path): Observed path with an even number of subintervals.
      level (float): Confidence level. (Default value = 0.95)

    Returns:
      HurstEstimate: The estimate, clamped to [DELTA, 1 - DELTA] with the clamped flag if
      needed. A vanishing fine scale sum gives 1 - DELTA, a vanishing coarse one DELTA,
      both flagged boundary_inversion.
    """

    _check_level(level)
    values = np.asarray(path.values, dtype=float)
    if len(values) % 2 == 0:
        raise EstimationError(f'Two-scale estimation needs an odd number of path values '
                              f'(2n + 1), got {len(values)}')
    n = (len(values) - 1) // 2
    if n < 2:
        raise EstimationError(f'Two-scale estimation needs n >= 2, got n={n}')

    coarse_path = path.subsample(2)
    fine = float(np.sum(_normalized_increments(path) ** 2))
    coarse = float(np.sum(_normalized_increments(coarse_path) ** 2))
    flags = set()
    if is_degenerate(path):
        raw_value = 1. - DELTA
        flags.add(FLAG_BOUNDARY_INVERSION)
    elif is_degenerate(coarse_path):
        raw_value = DELTA
        flags.add(FLAG_BOUNDARY_INVERSION)
    else:
        raw_value = 0.5 - math.log(fine / coarse) / (2. * LN2)
    value = min(max(raw_value, DELTA), 1. - DELTA)
    if value != raw_value:
        flags.add(FLAG_CLAMPED)

    sigma_star2 = asym_variances(_plugin(value)).sigma_star2
    std_error = math.sqrt(sigma_star2) / (2. * LN2 * math.sqrt(n))
    ci_low, ci_high = _normal_interval(value, std_error, level)
    return HurstEstimate(value=value, raw_value=raw_value, std_error=std_error,
                         ci_low=ci_low, ci_high=ci_high, level=level,
                         estimator=EstimatorType.H2, flags=flags)


def estimate_c2(path: Path,
                h3: float,
                T: Optional[float] = None,
                level: float = 0.95) -> VolatilityEstimate:
    """
    Plug-in estimator of the squared volatility,
    c2 = n^{2h3 - 1} / (T^{2h3} (4 - 2^{2h3})) sum_k (Delta^2 X_k / X_k)^2,
    with standard error c2 sqrt(sigma^2(h3)) / sqrt(n).

    Args:
      path (Path): Observed path on the grid kT/n, n >= 3.
      h3 (float): Plug-in Hurst index in (0, 1).
      T (Optional[float]): Time horizon, defaults to the horizon of the path grid.
      level (float): Confidence level. (Default value = 0.95)

    Returns:
      VolatilityEstimate: The estimate with interval clipped at 0.
    """

    if not 0. < h3 < 1.:
        raise ValueError(f'Plug-in Hurst index must lie in (0, 1), got h3={h3}')
    _check_level(level)
    n = path.grid.n
    if n < 3:
        raise EstimationError(f'Volatility estimation needs n >= 3, got n={n}')
    T = path.grid.T if T is None else T
    total = float(np.sum(_normalized_increments(path) ** 2))
    if is_degenerate(path):
        return VolatilityEstimate(c2=0., std_error=0., ci_low=0., ci_high=0., level=level,
                                  h_used=h3, flags={FLAG_DEGENERATE})

    two_h = 2. * h3
    c2 = n ** (two_h - 1.) / (T ** two_h * (4. - 2. ** two_h)) * total
    std_error = c2 * math.sqrt(asym_variances(_plugin(h3)).sigma2) / math.sqrt(n)
    ci_low, ci_high = _normal_interval(c2, std_error, level)
    return VolatilityEstimate(c2=c2, std_error=std_error, ci_low=max(ci_low, 0.), ci_high=ci_high,
                              level=level, h_used=h3, flags=set())


def _auxiliary_hurst(values: Sequence[float], T: float, H: float) -> float:
    """
    Two-scale estimator on an fBm path itself, H~ = 1/2 - ln(V_2n / (2^{2H-1} V_n)) / (2 ln 2),
    with V the normalized quadratic variations on the 2n grid and its nested n grid.
    """

    values = np.asarray(values, dtype=float)
    if len(values) % 2 == 0 or len(values) < 5:
        raise EstimationError(f'Auxiliary estimator needs 2n + 1 values with n >= 2, got {len(values)}')
    fine = vnt(values, T, H)
    coarse = vnt(values[::2], T, H)
    return 0.5 - math.log(fine / (2. ** (2. * H - 1.) * coarse)) / (2. * LN2)
