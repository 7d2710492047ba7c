from functools import lru_cache
from typing import Union, Tuple

import numpy as np

from fsde.result import AsymVariances
from fsde.utils.errors import NumericError

DEFAULT_REL_TOL = 1e-12
MAX_TERMS = 10 ** 7

# |l| from which rho is evaluated by its large-l expansion instead of the
# cancelling five-term difference
ASYMPTOTIC_LAG = 40

# coefficients of the central fourth difference in powers of the derivative,
# delta^4 = D^4 + D^6/6 + D^8/80 + 17 D^10/30240 + ...
_DIFFERENCE_SERIES = (1., 1. / 6., 1. / 80., 17. / 30240.)


def _falling_factorial(p: float, k: int) -> float:
    result = 1.
    for i in range(k):
        result *= p - i
    return result


def rho(l: Union[int, np.ndarray], H: float) -> Union[float, np.ndarray]:
    """
    Normalized fourth difference
    (|l-2|^{2H} - 4|l-1|^{2H} + 6|l|^{2H} - 4|l+1|^{2H} + |l+2|^{2H}) / (2H(1-2H)(2-2H)(3-2H)).
    For large |l| the difference is evaluated through its expansion in derivatives of
    |l|^{2H}, which avoids cancellation; rho(l) behaves like -|l|^{2H-4}.

    Args:
      l (Union[int, np.ndarray]): Lag or array of lags.
      H (float): Hurst index in (0, 1), H != 1/2.

    Returns:
      Union[float, np.ndarray]: rho at the given lags.
    """

    if not 0. < H < 1. or H == 0.5:
        raise ValueError(f'rho needs H in (0, 1) without 1/2, got H={H}')
    p = 2. * H
    denominator = p * (1. - p) * (2. - p) * (3. - p)
    lags = np.abs(np.asarray(l, dtype=float))
    difference = np.empty_like(lags)

    near = lags < ASYMPTOTIC_LAG
    x = lags[near]
    difference[near] = (np.abs(x - 2.) ** p - 4. * np.abs(x - 1.) ** p + 6. * x ** p
                        - 4. * (x + 1.) ** p + (x + 2.) ** p)

    x = lags[~near]
    expansion = np.zeros_like(x)
    for k, coefficient in enumerate(_DIFFERENCE_SERIES):
        order = 4 + 2 * k
        expansion += coefficient * _falling_factorial(p, order) * x ** (p - order)
    difference[~near] = expansion

    result = difference / denominator
    return float(result) if np.ndim(l) == 0 else result


def _c_coefficients(H: float) -> Tuple[float, float]:
    """ Returns c1(H) and the signed lag-one term whose square is c2(H). """
    p = 2. * H
    scale = 4. - 2. ** p
    c1 = (p * (p - 1.) * (p - 2.) * (p - 3.) / scale) ** 2
    lag_one = (2. ** (p + 2.) - 7. - 3. ** p) / scale
    return c1, lag_one


def _series_terms(H: float, rel_tol: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Terms l = 2..L of the three series sum rho(l)^2, sum rho(l) rho(l-2) and
    sum rho(l) rho(l-1), cut at the first l where every running term is below
    rel_tol times its partial sum.
    """

    length = 1024
    while True:
        r = rho(np.arange(length + 1), H)
        squares = r[2:] ** 2
        lag_two = r[2:] * r[:-2]
        lag_one = r[2:] * r[1:-1]
        converged = np.ones(len(squares), dtype=bool)
        for terms in (squares, lag_two, lag_one):
            converged &= np.abs(terms) < rel_tol * np.abs(np.cumsum(terms))
        hits = np.flatnonzero(converged)
        if hits.size > 0:
            count = int(hits[0]) + 1
            return squares[:count], lag_two[:count], lag_one[:count]
        if length >= MAX_TERMS:
            raise NumericError(f'Variance series did not converge within {MAX_TERMS} terms for H={H}')
        length = min(4 * length, MAX_TERMS)


@lru_cache(maxsize=4096)
def _asym_variances(H: float, rel_tol: float) -> AsymVariances:
    squares, lag_two, lag_one = _series_terms(H, rel_tol)
    c1, lag_one_coef = _c_coefficients(H)
    c2 = lag_one_coef ** 2
    p = 2. * H

    sigma2 = 2. + c2 + c1 * np.sum(squares)
    sigma1_sq = c2 / 2. + c1 * np.sum(lag_two)
    # the lag-one term enters with the sign of the lag-one correlation (negative root of c2)
    sigma2_sq = 2. * lag_one_coef + c1 * np.sum(lag_one)
    sigma12 = 2. ** (-p) * (3. * sigma2 + sigma1_sq + 4. * sigma2_sq)
    sigma_star2 = 1.5 * sigma2 - 2. * sigma12

    # |rho(l)| l^{4-2H} decreases towards 1, so its value at the last lag bounds the tail
    last = len(squares) + 1
    k = abs(rho(last, H)) * last ** (4. - p)
    tail_bound = c1 * k ** 2 * last ** (2. * p - 7.) / (7. - 2. * p)

    return AsymVariances(H=H, sigma2=float(sigma2), sigma1_sq=float(sigma1_sq),
                         sigma2_sq=float(sigma2_sq), sigma12=float(sigma12),
                         sigma_star2=float(sigma_star2), c1=c1, c2coef=c2,
                         truncation_terms=len(squares), tail_bound=float(tail_bound))


def asym_variances(H: float, rel_tol: float = DEFAULT_REL_TOL) -> AsymVariances:
    """
    Limiting variances of the quadratic variation statistics:
    sigma2 = 2 + c2 + c1 sum_{l>=2} rho(l)^2, sigma1_sq = c2/2 + c1 sum rho(l) rho(l-2),
    sigma2_sq = 2 sqrt(c2) + c1 sum rho(l) rho(l-1) (root signed like the lag-one correlation),
    sigma12 = 2^{-2H}(3 sigma2 + sigma1_sq + 4 sigma2_sq) and
    sigma_star2 = 3/2 sigma2 - 2 sigma12. Results are cached per H rounded to 1e-6.

    Args:
      H (float): Hurst index in (1/2, 1).
      rel_tol (float): Relative size of the last summed term. (Default value = 1e-12)

    Returns:
      AsymVariances: The variances with truncation bookkeeping.
    """

    if not 0.5 < H < 1.:
        raise ValueError(f'Asymptotic variances need H in (1/2, 1), got H={H}')
    if not rel_tol > 0:
        raise ValueError(f'Relative tolerance must be positive, got rel_tol={rel_tol}')
    key = round(H, 6)
    if not 0.5 < key < 1.:
        key = H
    return _asym_variances(key, float(rel_tol))
