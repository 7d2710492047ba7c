from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Union, Optional, Sequence

import numpy as np
import scipy.linalg

from fsde.utils.errors import NumericError
from fsde.utils.io import write_path_csv
from fsde.utils.logging import get_logger

logger = get_logger(__name__)

# relative tolerance for negative circulant eigenvalues before falling back to cholesky
EIGENVALUE_TOLERANCE = 1e-9


class SamplingMethod(Enum):
    SPECTRAL_CIRCULANT = 'spectral-circulant'
    CHOLESKY = 'cholesky'


@dataclass(frozen=True)
class GridSpec:
    """
    Uniform observation grid t_k = kT/n, k = 0..n, on [0, T].

    Args:
        n (int): Number of subintervals (n >= 2).
        T (float): Time horizon (T > 0).
    """

    n: int
    T: float = 1.

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f'Grid needs an integer n >= 2, got n={self.n}')
        if not self.T > 0:
            raise ValueError(f'Grid horizon must be positive, got T={self.T}')
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'T', float(self.T))

    @property
    def dt(self) -> float:
        return self.T / self.n

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.T / self.n

    def refine(self, factor: int) -> 'GridSpec':
        """ Returns the nested grid with factor times as many subintervals. """
        return GridSpec(n=self.n * factor, T=self.T)

    def coarsen(self, factor: int) -> 'GridSpec':
        """ Returns the nested grid with factor times fewer subintervals. """
        if self.n % factor != 0:
            raise ValueError(f'Grid with n={self.n} has no nested subgrid for factor {factor}')
        return GridSpec(n=self.n // factor, T=self.T)


class FbmPath:
    """
    One fractional Brownian motion sample path on a uniform grid.
    """

    def __init__(self,
                 hurst: float,
                 grid: GridSpec,
                 values: np.ndarray,
                 seed: int,
                 method: SamplingMethod) -> None:
        """
        Initializes an FbmPath object.

        Args:
          hurst (float): Hurst index of the path in (0, 1).
          grid (GridSpec): Grid the path is observed on.
          values (np.ndarray): Values B^H_{t_k}, k = 0..n, with values[0] = 0.
          seed (int): Seed the path was generated from.
          method (SamplingMethod): Sampling method actually used.
        """

        self.hurst = hurst
        self.grid = grid
        self.values = values
        self.seed = seed
        self.method = method

    def subsample(self, step: int) -> 'FbmPath':
        """
        Restricts the path to the nested grid containing every step-th point.

        Args:
          step (int): Subsampling step, must divide grid.n.

        Returns:
          FbmPath: The path on the coarser grid.
        """

        return FbmPath(hurst=self.hurst, grid=self.grid.coarsen(step),
                       values=self.values[::step], seed=self.seed, method=self.method)

    def to_csv(self, path: Union[str, Path]) -> None:
        write_path_csv(self.grid.times, self.values, path, value_column='value')


def _check_hurst(H: float) -> None:
    if not 0. < H < 1.:
        raise ValueError(f'Hurst index must lie in (0, 1), got H={H}')


def fbm_covariance(s: float, t: float, H: float) -> float:
    """
    Covariance E(B^H_s B^H_t) = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2 of fractional Brownian motion.

    Args:
      s (float): First time point, s >= 0.
      t (float): Second time point, t >= 0.
      H (float): Hurst index in (0, 1).

    Returns:
      float: The covariance.
    """

    _check_hurst(H)
    if s < 0 or t < 0:
        raise ValueError(f'Time points must be nonnegative, got s={s}, t={t}')
    two_h = 2. * H
    return 0.5 * (s ** two_h + t ** two_h - abs(t - s) ** two_h)


def first_increments(values: Sequence[float]) -> np.ndarray:
    """
    Increments values[k+1] - values[k].

    Args:
      values (Sequence[float]): Path values, at least two.

    Returns:
      np.ndarray: Vector of length len(values) - 1.
    """

    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or len(values) < 2:
        raise ValueError(f'First increments need at least 2 values, got {values.size}')
    return np.diff(values)


def second_order_increments(values: Sequence[float]) -> np.ndarray:
    """
    Second order increments values[k+1] - 2 values[k] + values[k-1].

    Args:
      values (Sequence[float]): Path values, at least three.

    Returns:
      np.ndarray: Vector of length len(values) - 2, entry k-1 belongs to the center point k.
    """

    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or len(values) < 3:
        raise ValueError(f'Second order increments need at least 3 values, got {values.size}')
    return values[2:] - 2. * values[1:-1] + values[:-2]


def _fgn_autocovariance(n: int, H: float, dt: float) -> np.ndarray:
    """ Autocovariance of the grid increments at lags 0..n. """
    j = np.arange(n + 1, dtype=float)
    two_h = 2. * H
    return 0.5 * dt ** two_h * (np.abs(j - 1.) ** two_h - 2. * j ** two_h + (j + 1.) ** two_h)


@lru_cache(maxsize=32)
def _circulant_sqrt_eigenvalues(n: int, H: float, dt: float) -> Optional[np.ndarray]:
    """
    Square roots of the eigenvalues of the 2n circulant embedding of the increment
    covariance (rfft layout, n + 1 values), or None if the embedding is not
    nonnegative definite within tolerance.
    """

    gamma = _fgn_autocovariance(n, H, dt)
    row = np.concatenate([gamma, gamma[1:n][::-1]])
    eigenvalues = np.fft.rfft(row).real
    if eigenvalues.min() < -EIGENVALUE_TOLERANCE * eigenvalues.max():
        return None
    sqrt_eig = np.sqrt(np.maximum(eigenvalues, 0.))
    sqrt_eig.setflags(write=False)
    return sqrt_eig


@lru_cache(maxsize=8)
def _cholesky_factor(n: int, H: float, dt: float) -> np.ndarray:
    gamma = _fgn_autocovariance(n, H, dt)
    cov = scipy.linalg.toeplitz(gamma[:n])
    try:
        factor = scipy.linalg.cholesky(cov, lower=True)
    except np.linalg.LinAlgError as e:
        raise NumericError(f'Cholesky factorization of the increment covariance failed '
                           f'for n={n}, H={H}: {e}')
    factor.setflags(write=False)
    return factor


def _sample_circulant(sqrt_eig: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(2 * n)
    noise = np.empty(n + 1, dtype=np.complex128)
    noise[0] = z[0]
    noise[n] = z[1]
    noise[1:n] = (z[2:n + 1] + 1j * z[n + 1:]) / np.sqrt(2.)
    # irfft divides by 2n, the sqrt(2n) factor restores the embedding covariance
    noise *= sqrt_eig * np.sqrt(2. * n)
    return np.fft.irfft(noise, n=2 * n)[:n]


def generate_fbm_path(grid: GridSpec,
                      H: float,
                      seed: int,
                      method: SamplingMethod = SamplingMethod.SPECTRAL_CIRCULANT) -> FbmPath:
    """
    Samples fractional Brownian motion exactly on a uniform grid. The grid increments
    (fractional Gaussian noise) are drawn by circulant embedding of their stationary
    covariance, or by a Cholesky factorization of the covariance matrix.

    Args:
      grid (GridSpec): Observation grid.
      H (float): Hurst index in (0, 1).
      seed (int): Seed of the random generator, identical inputs give identical paths.
      method (SamplingMethod): Requested sampling method. (Default value = SamplingMethod.SPECTRAL_CIRCULANT)

    Returns:
      FbmPath: The sampled path, method records the method actually used.
    """

    _check_hurst(H)
    method = SamplingMethod(method)
    rng = np.random.default_rng(seed)
    n, dt = grid.n, grid.dt

    if method == SamplingMethod.SPECTRAL_CIRCULANT:
        sqrt_eig = _circulant_sqrt_eigenvalues(n, H, dt)
        if sqrt_eig is None:
            logger.warning(f'Circulant embedding not nonnegative definite for n={n}, H={H}, '
                           f'falling back to cholesky.')
            method = SamplingMethod.CHOLESKY
        else:
            increments = _sample_circulant(sqrt_eig, n, rng)

    if method == SamplingMethod.CHOLESKY:
        factor = _cholesky_factor(n, H, dt)
        increments = factor @ rng.standard_normal(n)

    values = np.zeros(n + 1)
    values[1:] = np.cumsum(increments)
    return FbmPath(hurst=H, grid=grid, values=values, seed=seed, method=method)
