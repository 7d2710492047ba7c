import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Union, Tuple, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from fsde.process.fbm import FbmPath, GridSpec, SamplingMethod, generate_fbm_path
from fsde.utils.errors import NumericError
from fsde.utils.io import write_path_csv

# exp overflows a double slightly above 709
MAX_EXPONENT = 700.
DEFAULT_REFINE = 4


class ModelType(Enum):
    BLACK_SCHOLES = 'black_scholes'
    VERHULST = 'verhulst'
    LANDAU_GINZBURG = 'landau_ginzburg'

    def has_polynomial_drift(self) -> bool:
        """
        Returns: bool: Whether the model carries the a X^m drift term.
        """
        return self in {ModelType.VERHULST, ModelType.LANDAU_GINZBURG}


@dataclass(frozen=True)
class SdeParams:
    """
    Coefficients of dX = (a X^m + b X) dt + c X dB^H, X_0 = x0.

    Args:
        a (float): Polynomial drift coefficient, a <= 0.
        b (float): Linear drift coefficient (per unit time).
        c (float): Volatility, c != 0.
        m (int): Degree of the polynomial drift, m >= 2.
        x0 (float): Initial value, x0 > 0.
        H (float): Hurst index of the driver in (1/2, 1).
    """

    a: float
    b: float
    c: float
    m: int
    x0: float
    H: float

    def __post_init__(self) -> None:
        if not self.a <= 0:
            raise ValueError(f'Polynomial drift coefficient must satisfy a <= 0, got a={self.a}')
        if self.c == 0:
            raise ValueError('Volatility must be nonzero, got c=0')
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f'Drift degree must be an integer m >= 2, got m={self.m}')
        if not self.x0 > 0:
            raise ValueError(f'Initial value must be positive, got x0={self.x0}')
        if not 0.5 < self.H < 1.:
            raise ValueError(f'Hurst index must lie in (1/2, 1), got H={self.H}')
        object.__setattr__(self, 'm', int(self.m))


class SamplePath:
    """
    One sample path of the SDE solution on the observation grid.
    """

    def __init__(self,
                 grid: GridSpec,
                 values: np.ndarray,
                 params: Optional[SdeParams] = None,
                 driver_seed: Optional[int] = None) -> None:
        """
        Initializes a SamplePath object.

        Args:
          grid (GridSpec): Observation grid.
          values (np.ndarray): Positive values X_{t_k}, k = 0..n, values[0] = params.x0.
          params (Optional[SdeParams]): Coefficients the path was solved with, None for observed data.
          driver_seed (Optional[int]): Seed of the driving fBm path, None for observed data.
        """

        self.grid = grid
        self.values = values
        self.params = params
        self.driver_seed = driver_seed

    def subsample(self, step: int) -> 'SamplePath':
        return SamplePath(grid=self.grid.coarsen(step), values=self.values[::step],
                          params=self.params, driver_seed=self.driver_seed)

    def to_csv(self, path: Union[str, Path]) -> None:
        write_path_csv(self.grid.times, self.values, path, value_column='X')


def preset(model: Union[ModelType, str],
           lambda_: float,
           sigma: float,
           x0: float,
           H: float) -> SdeParams:
    """
    Coefficients of the named models: Black-Scholes (a = 0), Verhulst (a = -1, m = 2)
    and Landau-Ginzburg (a = -1, m = 3), each with b = lambda_ and c = sigma.

    Args:
      model (Union[ModelType, str]): Model name.
      lambda_ (float): Linear drift coefficient.
      sigma (float): Volatility, nonzero.
      x0 (float): Initial value, positive.
      H (float): Hurst index in (1/2, 1).

    Returns:
      SdeParams: The model coefficients. Black-Scholes uses m = 2, which is irrelevant for a = 0.
    """

    model = ModelType(model)
    a = -1. if model.has_polynomial_drift() else 0.
    m = 3 if model == ModelType.LANDAU_GINZBURG else 2
    return SdeParams(a=a, b=lambda_, c=sigma, m=m, x0=x0, H=H)


def _exponent(b: float, c: float, driver: FbmPath) -> np.ndarray:
    exponent = b * driver.grid.times + c * driver.values
    peak = np.max(np.abs(exponent))
    if not peak <= MAX_EXPONENT:
        raise NumericError(f'Exponent b*t + c*B^H_t reaches {peak:.4g}, beyond the '
                           f'representable range (limit {MAX_EXPONENT}).')
    return exponent


def _check_driver(driver: FbmPath, H: float, refine: int) -> None:
    if int(refine) != refine or refine < 1:
        raise ValueError(f'Quadrature refinement must be a positive integer, got refine={refine}')
    if not math.isclose(driver.hurst, H, rel_tol=0., abs_tol=1e-12):
        raise ValueError(f'Driver Hurst index {driver.hurst} does not match H={H}')
    if driver.grid.n % refine != 0:
        raise ValueError(f'Driver grid n={driver.grid.n} is not a refinement by factor {refine}')


def drift_term(params: SdeParams, driver: FbmPath) -> np.ndarray:
    """
    A_t = x0^{1-m} + (1-m) a int_0^t e^{(m-1)(bs + cB_s)} ds on the driver grid, by the
    composite trapezoid. For a <= 0 it starts at x0^{1-m} and is non-decreasing.

    Args:
      params (SdeParams): Coefficients of the SDE.
      driver (FbmPath): Driving fBm path.

    Returns:
      np.ndarray: A_t at every driver grid point.
    """

    m = params.m
    start = params.x0 ** (1 - m)
    if params.a == 0:
        return np.full(len(driver.values), start)
    drift_exponent = (m - 1) * _exponent(params.b, params.c, driver)
    if np.max(drift_exponent) > MAX_EXPONENT:
        raise NumericError(f'Drift integrand exponent reaches {np.max(drift_exponent):.4g}, '
                           f'beyond the representable range (limit {MAX_EXPONENT}).')
    integral = cumulative_trapezoid(np.exp(drift_exponent), driver.grid.times, initial=0.)
    return start + (1 - m) * params.a * integral


def solve_polynomial_sde(params: SdeParams,
                         driver: FbmPath,
                         refine: int = DEFAULT_REFINE) -> SamplePath:
    """
    Evaluates the closed form solution
    X_t = e^{bt + cB_t} (x0^{1-m} + (1-m) a int_0^t e^{(m-1)(bs + cB_s)} ds)^{1/(1-m)}
    along a driving fBm path. The time integral is a composite trapezoid on the
    driver grid, which is refine times finer than the returned observation grid.

    Args:
      params (SdeParams): Coefficients of the SDE.
      driver (FbmPath): fBm path on the fine grid with n * refine subintervals.
      refine (int): Ratio of driver grid to observation grid. (Default value = 4)

    Returns:
      SamplePath: Solution at the observation grid points.
    """

    _check_driver(driver, params.H, refine)
    exponent = _exponent(params.b, params.c, driver)
    grid = driver.grid.coarsen(refine)

    if params.a == 0:
        values = params.x0 * np.exp(exponent[::refine])
    else:
        base = drift_term(params, driver)
        values = np.exp(exponent[::refine]) * base[::refine] ** (1. / (1 - params.m))

    if not np.all(np.isfinite(values)) or not np.all(values > 0):
        raise NumericError('Solution left the range of positive finite numbers.')
    values[0] = params.x0
    return SamplePath(grid=grid, values=values, params=params, driver_seed=driver.seed)


def simulate_sample_path(params: SdeParams,
                         grid: GridSpec,
                         seed: int,
                         refine: int = DEFAULT_REFINE,
                         method: SamplingMethod = SamplingMethod.SPECTRAL_CIRCULANT) \
        -> Tuple[SamplePath, FbmPath]:
    """
    Generates the driving fBm once on the refined grid and solves the SDE on it, so
    quadrature and observations come from the same realization.

    Args:
      params (SdeParams): Coefficients of the SDE.
      grid (GridSpec): Observation grid.
      seed (int): Seed of the driver.
      refine (int): Quadrature refinement factor. (Default value = 4)
      method (SamplingMethod): fBm sampling method.

    Returns:
      Tuple[SamplePath, FbmPath]: The observed path and its fine driver.
    """

    driver = generate_fbm_path(grid.refine(refine), params.H, seed, method)
    return solve_polynomial_sde(params, driver, refine), driver


def verhulst_closed_form(xi: float, lambda_: float, sigma: float,
                         driver: FbmPath, refine: int = DEFAULT_REFINE) -> np.ndarray:
    """ X_t = xi e^{lt + sB_t} / (1 + xi int_0^t e^{ls + sB_s} ds) on the coarse grid. """

    exponent = lambda_ * driver.grid.times + sigma * driver.values
    integral = cumulative_trapezoid(np.exp(exponent), driver.grid.times, initial=0.)
    values = xi * np.exp(exponent) / (1. + xi * integral)
    return values[::refine]


def landau_ginzburg_closed_form(xi: float, lambda_: float, sigma: float,
                                driver: FbmPath, refine: int = DEFAULT_REFINE) -> np.ndarray:
    """ X_t = xi e^{lt + sB_t} / sqrt(1 + 2 xi^2 int_0^t e^{2(ls + sB_s)} ds) on the coarse grid. """

    exponent = lambda_ * driver.grid.times + sigma * driver.values
    integral = cumulative_trapezoid(np.exp(2. * exponent), driver.grid.times, initial=0.)
    values = xi * np.exp(exponent) / np.sqrt(1. + 2. * xi ** 2 * integral)
    return values[::refine]


def residual_check(path: SamplePath, driver: FbmPath) -> float:
    """
    Largest deviation of the path from the integral equation
    X_t = x0 + int_0^t (a X^m + b X) ds + c int_0^t X dB^H, both integrals
    replaced by left-point Riemann(-Stieltjes) sums on the observation grid.

    Args:
      path (SamplePath): Solution path.
      driver (FbmPath): Its driving fBm, on the path grid or a nested refinement of it.

    Returns:
      float: max_k of the absolute residual.
    """

    if not math.isclose(driver.grid.T, path.grid.T) or driver.grid.n % path.grid.n != 0:
        raise ValueError(f'Driver grid (n={driver.grid.n}, T={driver.grid.T}) does not contain '
                         f'the path grid (n={path.grid.n}, T={path.grid.T})')
    driver = driver.subsample(driver.grid.n // path.grid.n)
    params = path.params
    x = path.values[:-1]
    drift = (params.a * x ** params.m + params.b * x) * path.grid.dt
    stochastic = params.c * x * np.diff(driver.values)
    residual = path.values[1:] - params.x0 - np.cumsum(drift) - np.cumsum(stochastic)
    return float(max(np.max(np.abs(residual)), abs(path.values[0] - params.x0)))
