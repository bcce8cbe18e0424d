"""Bivariate normal model in its orthogonal parameterization.

The model for pairs (X1, X2) is the usual bivariate normal with means
(mu1, mu2), standard deviations (sigma1, sigma2) and correlation rho.
Inference here works in the orthogonal parameterization

    beta  = rho * sigma2 / sigma1            (regression slope of X2 on X1)
    theta = sigma1 * sigma2 * sqrt(1 - rho^2) (generalized standard deviation,
                                               sqrt of the covariance determinant)
    eta   = sigma2 * sqrt(1 - rho^2) / sigma1 (ratio of the conditional sd of
                                               X2 given X1 to the sd of X1;
                                               also equals sd(X2|X1)^2 / theta)

under which the Fisher information is block diagonal: the (mu1, mu2) block
is separate from a diagonal (beta, theta, eta) block diag(eta^-2, theta^-2,
eta^-2). The log density factors as

    log f = -log(2 pi theta)
            - (x2 - mu2 - beta (x1 - mu1))^2 / (2 theta eta)
            - eta (x1 - mu1)^2 / (2 theta)

which is the form every derivative in this module is taken from.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateDataError, DomainError

__all__ = [
    "OriginalParams",
    "OrthogonalParams",
    "FisherInfo",
    "SufficientStats",
    "to_orthogonal",
    "to_original",
    "fisher_information",
    "log_density",
    "log_density_partial",
    "sample",
    "sufficient_stats",
    "write_dataset",
    "read_dataset",
]


@dataclass(frozen=True)
class OriginalParams:
    """Means, standard deviations, and correlation of the bivariate normal."""

    mu1: float
    mu2: float
    sigma1: float
    sigma2: float
    rho: float

    def __post_init__(self):
        for name in ("mu1", "mu2", "sigma1", "sigma2", "rho"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.sigma1 <= 0.0 or self.sigma2 <= 0.0:
            raise DomainError("standard deviations must be positive")
        if not abs(self.rho) < 1.0:
            raise DomainError(f"correlation must satisfy |rho| < 1, got {self.rho}")


@dataclass(frozen=True)
class OrthogonalParams:
    """Means plus the orthogonal block (beta, theta, eta)."""

    mu1: float
    mu2: float
    beta: float
    theta: float
    eta: float

    def __post_init__(self):
        for name in ("mu1", "mu2", "beta", "theta", "eta"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.theta <= 0.0 or self.eta <= 0.0:
            raise DomainError("theta and eta must be positive")


@dataclass(frozen=True)
class FisherInfo:
    """Per-observation Fisher information in the orthogonal parameterization.

    a_block is the 2x2 information for (mu1, mu2); diag_block holds the
    diagonal information for (beta, theta, eta). Cross blocks vanish.
    """

    a_block: np.ndarray
    diag_block: np.ndarray


@dataclass(frozen=True)
class SufficientStats:
    """Sample size, means, and centered sums of squares and cross products.

    s11, s22, s12 are sums (not divided by n); s22_1 = s22 - s12^2/s11 is
    the residual sum of squares of x2 after regression on x1.
    """

    n: int
    xbar1: float
    xbar2: float
    s11: float
    s22: float
    s12: float
    s22_1: float

    def __post_init__(self):
        if self.n < 3:
            raise DomainError("inference needs n >= 3 observations")
        if not self.s11 > 0.0:
            raise DegenerateDataError("s11 must be positive")
        if self.s22 < 0.0 or self.s22_1 < 0.0:
            raise DomainError("sums of squares cannot be negative")
        if self.s12 * self.s12 > self.s11 * self.s22 * (1.0 + 1e-12):
            raise DomainError("s12^2 exceeds s11 * s22")


def to_orthogonal(p: OriginalParams) -> OrthogonalParams:
    """Map (mu, sigma, rho) to the orthogonal (mu, beta, theta, eta)."""
    root = math.sqrt(1.0 - p.rho * p.rho)
    return OrthogonalParams(
        mu1=p.mu1,
        mu2=p.mu2,
        beta=p.rho * p.sigma2 / p.sigma1,
        theta=p.sigma1 * p.sigma2 * root,
        eta=p.sigma2 * root / p.sigma1,
    )


def to_original(p: OrthogonalParams) -> OriginalParams:
    """Inverse of to_orthogonal; round-trips to ~1e-14 relative."""
    sigma1 = math.sqrt(p.theta / p.eta)
    sigma2 = math.sqrt(p.theta * (p.eta * p.eta + p.beta * p.beta) / p.eta)
    rho = p.beta * sigma1 / sigma2
    return OriginalParams(mu1=p.mu1, mu2=p.mu2, sigma1=sigma1, sigma2=sigma2, rho=rho)


def fisher_information(p: OrthogonalParams) -> FisherInfo:
    """Per-observation Fisher information at p."""
    b, t, e = p.beta, p.theta, p.eta
    a_block = np.array(
        [
            [b * b / (t * e) + e / t, -b / (t * e)],
            [-b / (t * e), 1.0 / (t * e)],
        ]
    )
    diag_block = np.array([e ** -2, t ** -2, e ** -2])
    return FisherInfo(a_block=a_block, diag_block=diag_block)


def _residuals(p: OrthogonalParams, x1, x2):
    """u = x2 - mu2 - beta (x1 - mu1) and v = x1 - mu1."""
    v = np.asarray(x1, dtype=float) - p.mu1
    u = np.asarray(x2, dtype=float) - p.mu2 - p.beta * v
    return u, v


def log_density(p: OrthogonalParams, x1, x2):
    """Log density of one observation; vectorized over x1, x2."""
    u, v = _residuals(p, x1, x2)
    out = (
        -math.log(2.0 * math.pi * p.theta)
        - u * u / (2.0 * p.theta * p.eta)
        - p.eta * v * v / (2.0 * p.theta)
    )
    return float(out) if np.isscalar(x1) and np.isscalar(x2) else out


_AXES = ("beta", "theta", "eta")


def _first_partial(p: OrthogonalParams, x1, x2, axis: int):
    """Closed-form first partial of log f with respect to beta/theta/eta."""
    u, v = _residuals(p, x1, x2)
    t, e = p.theta, p.eta
    if axis == 0:
        return u * v / (t * e)
    if axis == 1:
        return -1.0 / t + u * u / (2.0 * t * t * e) + e * v * v / (2.0 * t * t)
    return u * u / (2.0 * t * e * e) - v * v / (2.0 * t)


def _fd_step(p: OrthogonalParams, axis: int) -> float:
    value = getattr(p, _AXES[axis])
    h = 1e-4 * max(1.0, abs(value))
    if axis > 0:
        # keep theta - 2h, eta - 2h strictly positive
        h = min(h, value / 4.0)
    return h


def _partial(p: OrthogonalParams, x1, x2, orders):
    total = sum(orders)
    if total == 1:
        return _first_partial(p, x1, x2, orders.index(1))
    # peel one derivative off the highest-index axis by a central difference
    axis = max(i for i in range(3) if orders[i] > 0)
    inner = list(orders)
    inner[axis] -= 1
    inner = tuple(inner)
    h = _fd_step(p, axis)
    value = getattr(p, _AXES[axis])
    p_plus = replace(p, **{_AXES[axis]: value + h})
    p_minus = replace(p, **{_AXES[axis]: value - h})
    return (_partial(p_plus, x1, x2, inner) - _partial(p_minus, x1, x2, inner)) / (2.0 * h)


def log_density_partial(p: OrthogonalParams, x1, x2, multi_index):
    """Partial derivative of log f with respect to (beta, theta, eta).

    multi_index is a triple of non-negative derivative orders, one per
    parameter, with total order between 1 and 3. First-order partials are
    the hand-differentiated closed forms; orders 2 and 3 are built by
    nested central differences of those closed forms with step
    1e-4 * max(1, |parameter|), accurate to O(h^2) ~ 1e-8, far below the
    Monte Carlo noise of any moment estimated from them. Vectorized over
    x1, x2.
    """
    orders = tuple(int(k) for k in multi_index)
    if len(orders) != 3 or any(k < 0 for k in orders):
        raise DomainError("multi_index must be three non-negative integers")
    total = sum(orders)
    if not 1 <= total <= 3:
        raise DomainError("total derivative order must be 1, 2, or 3")
    out = _partial(p, x1, x2, orders)
    return float(out) if np.isscalar(x1) and np.isscalar(x2) else out


def sample(p: OriginalParams, n: int, seed: int) -> np.ndarray:
    """Draw n pairs from the model; deterministic given seed.

    Construction: Z1, Z2 iid standard normal,
    X1 = mu1 + sigma1 Z1, X2 = mu2 + sigma2 (rho Z1 + sqrt(1-rho^2) Z2).
    Returns an (n, 2) array.
    """
    if n < 1:
        raise DomainError("sample requires n >= 1")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, 2))
    x1 = p.mu1 + p.sigma1 * z[:, 0]
    x2 = p.mu2 + p.sigma2 * (p.rho * z[:, 0] + math.sqrt(1.0 - p.rho * p.rho) * z[:, 1])
    return np.column_stack([x1, x2])


def sufficient_stats(data) -> SufficientStats:
    """Sufficient statistics of an (n, 2) dataset.

    Raises DegenerateDataError when all x1 coincide (s11 = 0) or the pairs
    lie exactly on a line (s22_1 = 0); either way some posterior would be
    improper.
    """
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("data must be an (n, 2) array of pairs")
    if not np.all(np.isfinite(arr)):
        raise DomainError("data must be finite")
    n = arr.shape[0]
    if n < 3:
        raise DegenerateDataError("inference needs n >= 3 observations")
    xbar1 = float(arr[:, 0].mean())
    xbar2 = float(arr[:, 1].mean())
    d1 = arr[:, 0] - xbar1
    d2 = arr[:, 1] - xbar2
    s11 = float(d1 @ d1)
    s22 = float(d2 @ d2)
    s12 = float(d1 @ d2)
    if s11 <= 0.0:
        raise DegenerateDataError("all x1 values coincide (s11 = 0)")
    s22_1 = s22 - s12 * s12 / s11
    if s22_1 <= 0.0:
        raise DegenerateDataError("pairs are exactly collinear (s22.1 = 0)")
    return SufficientStats(
        n=n, xbar1=xbar1, xbar2=xbar2, s11=s11, s22=s22, s12=s12, s22_1=s22_1
    )


def write_dataset(file, data) -> None:
    """Write pairs as CSV with header x1,x2; file is a path or text handle."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("data must be an (n, 2) array of pairs")
    own = isinstance(file, (str, bytes)) or hasattr(file, "__fspath__")
    handle = open(file, "w", encoding="utf-8", newline="") if own else file
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["x1", "x2"])
        for row in arr:
            writer.writerow([repr(float(row[0])), repr(float(row[1]))])
    finally:
        if own:
            handle.close()


def read_dataset(file) -> np.ndarray:
    """Read a CSV of pairs with header x1,x2 into an (n, 2) array."""
    own = isinstance(file, (str, bytes)) or hasattr(file, "__fspath__")
    handle = open(file, "r", encoding="utf-8", newline="") if own else file
    try:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["x1", "x2"]:
            raise DomainError("dataset CSV must start with header x1,x2")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError) as exc:
                raise DomainError(f"bad dataset row at line {lineno}: {row}") from exc
    finally:
        if own:
            handle.close()
    if not rows:
        raise DomainError("dataset CSV holds no rows")
    return np.array(rows, dtype=float)
