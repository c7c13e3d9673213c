"""First-kind Chebyshev series with trident-quaternion coefficients.

Series live on the native domain tau in [-1, 1]; call sites map physical time
through :class:`TimeMap`. Coefficients are stored densely from degree 0 in a
packed ndarray of shape (n, 3, 4); degrees stay below ~20 here, so neither
sparsity nor FFT transforms pull their weight.

Because trident multiplication is non-commutative, the series product keeps
the operand order: coefficient pairs combine through the linearization
F_j * F_k = (F_{j+k} + F_{|j-k|}) / 2 with tq products taken left-to-right.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import TridentQuaternion, tq_mul_arr
from .errors import InsufficientNodes, OutOfDomain

_DOMAIN_SLACK = 1e-12


@dataclass(frozen=True)
class TimeMap:
    """Affine map between a window [0, t_N] and the Chebyshev domain [-1, 1]."""

    t_N: float

    def __post_init__(self):
        if not self.t_N > 0.0:
            raise ValueError("window length must be positive")

    def to_tau(self, t):
        return 2.0 * np.asarray(t, dtype=float) / self.t_N - 1.0

    def to_time(self, tau):
        return self.t_N * (1.0 + np.asarray(tau, dtype=float)) / 2.0

    @property
    def dt_dtau(self) -> float:
        return self.t_N / 2.0


@dataclass(frozen=True)
class TridentChebSeries:
    """Chebyshev series whose coefficients are trident quaternions."""

    coeffs: np.ndarray  # (n, 3, 4), index i multiplies F_i(tau)

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float)
        if arr.ndim != 3 or arr.shape[1:] != (3, 4) or arr.shape[0] < 1:
            raise ValueError("coefficients must pack to shape (n, 3, 4) with n >= 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def from_coefficients(cls, coeffs) -> "TridentChebSeries":
        return cls(np.stack([c.packed for c in coeffs]))

    @classmethod
    def constant(cls, value: TridentQuaternion) -> "TridentChebSeries":
        return cls(value.packed[None, :, :])

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def coefficient(self, i: int) -> TridentQuaternion:
        return TridentQuaternion.from_packed(self.coeffs[i])

    def padded(self, degree: int) -> "TridentChebSeries":
        """Zero-extend to the given degree (identity if already at least it)."""
        if self.degree >= degree:
            return self
        out = np.zeros((degree + 1, 3, 4))
        out[: self.coeffs.shape[0]] = self.coeffs
        return TridentChebSeries(out)


# ---------------------------------------------------------------------------
# scalar building blocks
# ---------------------------------------------------------------------------

def chebyshev_nodes(P: int) -> np.ndarray:
    """Chebyshev-Gauss nodes cos((k + 1/2) pi / P), k = 0..P-1."""
    k = np.arange(P)
    return np.cos((k + 0.5) * np.pi / P)


def chebyshev_values(tau, max_degree: int) -> np.ndarray:
    """F_i(tau) for i = 0..max_degree, stacked on the first axis."""
    tau = np.asarray(tau, dtype=float)
    out = np.empty((max_degree + 1,) + tau.shape)
    out[0] = 1.0
    if max_degree >= 1:
        out[1] = tau
    for i in range(2, max_degree + 1):
        out[i] = 2.0 * tau * out[i - 1] - out[i - 2]
    return out


def _check_domain(tau):
    if np.any(np.abs(tau) > 1.0 + _DOMAIN_SLACK):
        raise OutOfDomain("tau outside [-1, 1]")


def _antiderivative(i: int, tau, F) -> np.ndarray:
    """Antiderivative of F_i evaluated via F values stacked as in chebyshev_values."""
    if i == 0:
        return np.asarray(tau, dtype=float)
    if i == 1:
        return np.asarray(tau, dtype=float) ** 2 / 2.0
    return F[i + 1] / (2.0 * (i + 1)) - F[i - 1] / (2.0 * (i - 1))


def cheb_definite_integral(i: int, tau_a: float, tau_b: float) -> float:
    """Integral of F_i over [tau_a, tau_b] from the closed-form antiderivative."""
    if tau_b < tau_a:
        raise OutOfDomain("integration bounds must satisfy tau_a <= tau_b")
    _check_domain(np.array([tau_a, tau_b]))
    F = chebyshev_values(np.array([tau_a, tau_b]), max(i + 1, 1))
    vals = _antiderivative(i, np.array([tau_a, tau_b]), F)
    return float(vals[1] - vals[0])


def subinterval_integral_matrix(tau_edges, degree: int) -> np.ndarray:
    """Matrix of integrals of F_i over consecutive [tau_{k-1}, tau_k] cells.

    Shape (len(tau_edges) - 1, degree + 1); row k holds the integrals of each
    basis polynomial over the k-th cell. This is the design matrix for fitting
    a series to incremental (integrated) measurements.
    """
    tau_edges = np.asarray(tau_edges, dtype=float)
    _check_domain(tau_edges)
    F = chebyshev_values(tau_edges, degree + 1)
    anti = np.stack([_antiderivative(i, tau_edges, F) for i in range(degree + 1)])
    return (anti[:, 1:] - anti[:, :-1]).T


# ---------------------------------------------------------------------------
# series operations (packed kernels + typed wrappers)
# ---------------------------------------------------------------------------

def cheb_eval_packed(coeffs: np.ndarray, tau) -> np.ndarray:
    """Clenshaw evaluation; tau may be scalar or an array of query points."""
    tau = np.asarray(tau, dtype=float)
    shape = tau.shape + coeffs.shape[1:]
    tau_e = tau.reshape(tau.shape + (1,) * (coeffs.ndim - 1))
    b1 = np.zeros(shape)
    b2 = np.zeros(shape)
    for k in range(coeffs.shape[0] - 1, 0, -1):
        b1, b2 = coeffs[k] + 2.0 * tau_e * b1 - b2, b1
    return coeffs[0] + tau_e * b1 - b2


def cheb_eval(series: TridentChebSeries, tau: float) -> TridentQuaternion:
    """Evaluate the series at a single point of [-1, 1]."""
    _check_domain(np.asarray(tau))
    return TridentQuaternion.from_packed(cheb_eval_packed(series.coeffs, float(tau)))


def cheb_product_packed(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Packed series product of degree deg(a) + deg(b); order preserved."""
    na, nb = a.shape[0], b.shape[0]
    pair = tq_mul_arr(a[:, None], b[None, :]).reshape(na * nb, 3, 4)
    i = np.arange(na)[:, None]
    j = np.arange(nb)[None, :]
    out = np.zeros((na + nb - 1, 3, 4))
    np.add.at(out, (i + j).ravel(), 0.5 * pair)
    np.add.at(out, np.abs(i - j).ravel(), 0.5 * pair)
    return out


def cheb_product(a: TridentChebSeries, b: TridentChebSeries) -> TridentChebSeries:
    return TridentChebSeries(cheb_product_packed(a.coeffs, b.coeffs))


def cheb_integrate_packed(c: np.ndarray) -> np.ndarray:
    """Packed antiderivative with value 0 at tau = -1; degree grows by one."""
    n = c.shape[0]
    out = np.zeros((n + 1,) + c.shape[1:])
    out[1] += c[0]
    if n > 1:
        out[2] += c[1] / 4.0
    for i in range(2, n):
        out[i + 1] += c[i] / (2.0 * (i + 1))
        out[i - 1] -= c[i] / (2.0 * (i - 1))
    # F_i(-1) = (-1)^i pins the integration constant.
    signs = (-1.0) ** np.arange(1, n + 1)
    out[0] = -np.tensordot(signs, out[1:], axes=(0, 0))
    return out


def cheb_integrate(series: TridentChebSeries) -> TridentChebSeries:
    return TridentChebSeries(cheb_integrate_packed(series.coeffs))


def cheb_differentiate_packed(c: np.ndarray) -> np.ndarray:
    """Packed derivative series (d/dtau), one degree lower."""
    n = c.shape[0]
    if n == 1:
        return np.zeros((1,) + c.shape[1:])
    out = np.zeros((n - 1,) + c.shape[1:])
    # backwards recurrence: c'_{i-1} = c'_{i+1} + 2 i c_i
    for i in range(n - 1, 0, -1):
        if i + 1 < n - 1:
            out[i - 1] = out[i + 1] + 2.0 * i * c[i]
        else:
            out[i - 1] = 2.0 * i * c[i]
    out[0] /= 2.0
    return out


def cheb_differentiate(series: TridentChebSeries) -> TridentChebSeries:
    return TridentChebSeries(cheb_differentiate_packed(series.coeffs))


def cheb_fit_nodes(values, degree: int) -> TridentChebSeries:
    """Discrete cosine projection of samples at the P Chebyshev-Gauss nodes.

    ``values[k]`` samples the target at cos((k + 1/2) pi / P); the projection
    c_i = (2 - delta_{0i}) / P * sum_k cos(i (k + 1/2) pi / P) * values[k]
    reproduces polynomials of degree <= degree exactly whenever P > degree.
    """
    if isinstance(values, np.ndarray):
        packed = np.asarray(values, dtype=float)
    else:
        packed = np.stack([v.packed for v in values])
    P = packed.shape[0]
    if P < degree + 1:
        raise InsufficientNodes(f"{P} nodes cannot support degree {degree}")
    i = np.arange(degree + 1)
    k = np.arange(P)
    cosmat = np.cos(np.outer(i, (k + 0.5) * np.pi / P))
    weights = (2.0 - (i == 0)) / P
    coeffs = weights[:, None, None] * np.tensordot(cosmat, packed, axes=(1, 0))
    return TridentChebSeries(coeffs)


def cheb_truncate(series: TridentChebSeries, m: int) -> TridentChebSeries:
    """Drop coefficients above degree m (identity when already short enough)."""
    if m < 0:
        raise ValueError("truncation degree must be non-negative")
    if series.degree <= m:
        return series
    return TridentChebSeries(series.coeffs[: m + 1])
