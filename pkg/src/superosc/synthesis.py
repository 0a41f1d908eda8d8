"""Construction of superoscillatory functions.

Four constructions live here: the elementary family
``(cos(x/N) + i a sin(x/N))**N``, kernel-based Fourier synthesis of a target
shape, minimum-energy band-limited interpolation through prescribed points,
and periodic cosine series whose energy fraction in a window is maximal.

Sinc convention: ``sinc(x) = sin(pi x) / (pi x)`` (``numpy.sinc``), so a
function built from ``mu * sinc(mu * t)`` is band-limited to ``mu / 2`` Hz.
"""

from dataclasses import dataclass
import warnings

import numpy as np
from scipy import linalg
from scipy.special import gammaln
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_int, check_points, check_positive
from .exceptions import (
    ConditioningWarning,
    DuplicatePointsError,
    QuadratureError,
    RankDeficientError,
    SuperoscError,
)
from .quadrature import DEFAULT_EPSABS, DEFAULT_EPSREL, integrate
from .signal import BandLimitedSpectrum, SampledField

MAX_SAFE_ORDER = 300
CONDITION_THRESHOLD = 1e12
DUPLICATE_SPACING = 1e-9
_LOG_MAX = np.log(np.finfo(float).max) - 1.0


# -- elementary superoscillations ------------------------------------------------


def elementary_coefficients(a, order):
    """Binomial Fourier coefficients of the elementary superoscillation.

    Returns ``(k, c)`` with ``k_m = 1 - 2m/N`` and
    ``c_m = C(N, m) ((1+a)/2)**(N-m) ((1-a)/2)**m``.  Magnitudes are formed in
    log space and the alternating sign is tracked separately, which keeps the
    evaluation finite up to ``MAX_SAFE_ORDER``.
    """
    a = float(a)
    n = check_int(order, "order", minimum=1)
    if not a >= 1.0:
        raise SuperoscError(f"a must be >= 1, got {a}")
    if n > MAX_SAFE_ORDER:
        raise SuperoscError(
            f"order {n} exceeds the overflow-safe order {MAX_SAFE_ORDER} in double precision"
        )
    m = np.arange(n + 1)
    k = 1.0 - 2.0 * m / n
    if a == 1.0:
        c = np.zeros(n + 1)
        c[0] = 1.0
        return k, c
    log_mag = (gammaln(n + 1) - gammaln(m + 1) - gammaln(n - m + 1)
               + (n - m) * np.log((1 + a) / 2) + m * np.log((a - 1) / 2))
    if log_mag.max() > _LOG_MAX:
        raise SuperoscError(
            f"coefficients overflow double precision for a={a}, N={n} "
            f"(largest |c_m| ~ 10^{log_mag.max() / np.log(10):.0f})"
        )
    sign = np.where(m % 2 == 0, 1.0, -1.0)
    return k, sign * np.exp(log_mag)


@dataclass(frozen=True)
class ElementarySuperoscillation:
    """``f(x) = (cos(x/N) + i a sin(x/N))**N``, band-limited to ``|k| <= 1``.

    Near ``x = 0`` it behaves like ``exp(i a x)``: a local wavenumber ``a``
    that exceeds the band limit whenever ``a > 1``.  The period is ``N pi``.
    """

    a: float
    order: int

    def __post_init__(self):
        object.__setattr__(self, "order", check_int(self.order, "order", minimum=1))
        if not float(self.a) >= 1.0:
            raise SuperoscError(f"a must be >= 1, got {self.a}")
        object.__setattr__(self, "a", float(self.a))

    @property
    def period(self):
        return self.order * np.pi

    @property
    def spectrum(self):
        k, c = elementary_coefficients(self.a, self.order)
        return BandLimitedSpectrum(k, c, 1.0)

    def _base(self, x):
        x = np.asarray(x, dtype=float) / self.order
        return np.cos(x), np.sin(x)

    def __call__(self, x):
        c, s = self._base(x)
        return (c + 1j * self.a * s) ** self.order

    def derivative(self, x):
        c, s = self._base(x)
        u = c + 1j * self.a * s
        return u ** (self.order - 1) * (-s + 1j * self.a * c)

    def log_derivative(self, x):
        """``f'/f`` without forming ``f``; its imaginary part is the local wavenumber."""
        c, s = self._base(x)
        return (-s + 1j * self.a * c) / (c + 1j * self.a * s)


def elementary_so(a, order):
    """Elementary superoscillation with speed factor ``a`` and order ``N``."""
    return ElementarySuperoscillation(a, order)


# -- kernel synthesis ---------------------------------------------------------------


def gaussian_weight(width):
    """Weight ``exp(-alpha^2 L^2 / 2) / (2 pi)`` whose plane-wave synthesis is a Gaussian."""
    width = check_positive(width, "width")

    def weight(alpha):
        return np.exp(-0.5 * (alpha * width) ** 2) / (2 * np.pi)

    return weight


def gaussian_target(width):
    """``exp(-x^2 / 2L^2) / (sqrt(2 pi) L)``."""
    width = check_positive(width, "width")

    def target(x):
        return np.exp(-0.5 * (np.asarray(x) / width) ** 2) / (np.sqrt(2 * np.pi) * width)

    return target


def plane_wave_kernel(x, alpha):
    return np.exp(1j * alpha * x)


def elementary_kernel(order):
    """Kernel ``K(x; alpha) = (cos(x/N) + i alpha sin(x/N))**N``."""
    order = check_int(order, "order", minimum=1)

    def kernel(x, alpha):
        return (np.cos(x / order) + 1j * alpha * np.sin(x / order)) ** order

    return kernel


def _log_sin(z):
    # log(sin z) without overflow for large |Im z|; branch irrelevant after exp.
    # sin z = exp(-iz) (i/2) (1 - exp(2iz)) for Im z > 0, mirrored below.
    upper = z.imag > 0
    lead = np.where(upper, -1j * z, 1j * z)
    tail = np.where(upper, 2j * z, -2j * z)
    corr = np.where(upper, np.log(0.5j), np.log(-0.5j))
    return lead + np.log1p(-np.exp(tail)) + corr


def helmholtz_kernel(delta):
    """Superoscillatory kernel built from a complex-shifted 3-D Helmholtz solution.

    ``K(x; alpha) = (2/delta) exp(-1/delta) sin(R)/R`` with
    ``R^2 = (x - i alpha/delta)^2 + (alpha^2 - 1)/delta^2``.  ``sin(R)/R`` is
    the angular average of unit-wavenumber plane waves, so ``K`` is
    band-limited to ``|k| <= 1`` in ``x``; for ``x << 1`` and small ``delta``
    it reduces to ``exp(i alpha x)``.
    """
    delta = check_positive(delta, "delta")
    log_pref = np.log(2.0 / delta) - 1.0 / delta

    def kernel(x, alpha):
        x = np.asarray(x, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        r2 = (x - 1j * alpha / delta) ** 2 + (alpha ** 2 - 1) / delta ** 2
        r = np.sqrt(r2 + 0j)
        small = np.abs(r) < 1e-8
        safe = np.where(small, 1.0, r)
        val = np.exp(log_pref + _log_sin(safe) - np.log(safe))
        return np.where(small, np.exp(log_pref) * (1 - r2 / 6), val)

    return kernel


def synthesize_from_kernel(weight, kernel, alpha_range, x, *, epsabs=DEFAULT_EPSABS,
                           epsrel=DEFAULT_EPSREL, limit=4000):
    """Evaluate ``g(x) = int w(alpha) K(x; alpha) d alpha`` on a uniform grid.

    The alpha-subdivision is shared across grid points but every point is
    held to its own tolerance.  Raises :class:`QuadratureError` (carrying the
    worst grid point) when the integral does not converge.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size > 1 and not np.allclose(np.diff(x), x[1] - x[0], rtol=1e-9, atol=0):
        raise SuperoscError("x grid must be uniformly spaced and increasing")
    lo, hi = alpha_range

    def integrand(alpha):
        return weight(alpha)[:, None] * kernel(x[None, :], alpha[:, None])

    try:
        res = integrate(integrand, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit)
    except QuadratureError as exc:
        raise QuadratureError(
            f"{exc} (worst grid point x={x[exc.worst_index]!r})",
            worst_index=exc.worst_index, estimate=exc.estimate, error=exc.error,
        ) from exc
    dx = x[1] - x[0] if x.size > 1 else 1.0
    return SampledField((x[0],), (dx,), res.value)


@dataclass(frozen=True)
class GaussianSynthesis:
    """Superoscillatory Gaussian compared with its target.

    ``window`` is the contiguous grid interval around ``x = 0`` where the
    relative error stays below ``rtol``; amplitudes are maxima of ``|g|``
    inside and outside that window.
    """

    field: SampledField
    target: np.ndarray
    window: tuple
    in_window_amplitude: float
    sidelobe_amplitude: float
    rtol: float

    @property
    def sidelobe_ratio(self):
        return self.sidelobe_amplitude / self.in_window_amplitude


def agreement_window(x, values, target, rtol):
    """Largest contiguous index range containing ``x ~ 0`` with relative error < ``rtol``."""
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        rel = np.abs(values - target) / np.abs(target)
    i0 = int(np.argmin(np.abs(x)))
    if not rel[i0] < rtol:
        raise SuperoscError("synthesis does not match the target at x = 0")
    lo = i0
    while lo > 0 and rel[lo - 1] < rtol:
        lo -= 1
    hi = i0
    while hi < x.size - 1 and rel[hi + 1] < rtol:
        hi += 1
    return lo, hi


def synthesize_gaussian(width, x, *, kernel="helmholtz", delta=0.005, order=20,
                        alpha_extent=14.0, rtol=0.05):
    """Superoscillatory synthesis of a narrow Gaussian of width ``width``.

    ``alpha_extent`` truncates the weight at ``|alpha| <= alpha_extent / L``
    (the Gaussian weight is below ``exp(-alpha_extent**2 / 2)`` beyond).
    """
    x = np.asarray(x, dtype=float)
    kernels = {
        "helmholtz": lambda: helmholtz_kernel(delta),
        "elementary": lambda: elementary_kernel(order),
        "plane": lambda: plane_wave_kernel,
    }
    if kernel not in kernels:
        raise SuperoscError(f"unknown kernel {kernel!r}; choose from {sorted(kernels)}")
    amax = alpha_extent / width
    fld = synthesize_from_kernel(gaussian_weight(width), kernels[kernel](), (-amax, amax), x)
    target = gaussian_target(width)(x)
    g = fld.values
    lo, hi = agreement_window(x, g, target, rtol)
    inside = np.abs(g[lo:hi + 1]).max()
    outside_mask = np.ones(x.size, dtype=bool)
    outside_mask[lo:hi + 1] = False
    outside = np.abs(g[outside_mask]).max() if outside_mask.any() else 0.0
    return GaussianSynthesis(fld, target, (float(x[lo]), float(x[hi])),
                             float(inside), float(outside), rtol)


# -- minimum-energy interpolation ----------------------------------------------------


def _warn_conditioning(owner, cond, threshold, what):
    if cond > threshold:
        msg = f"{what} condition number {cond:.3e} exceeds {threshold:.1e}"
        owner.warnings_.append(msg)
        warnings.warn(msg, ConditioningWarning, stacklevel=3)


class MinEnergyInterpolator(RegressorMixin, BaseEstimator):
    """Minimum-energy band-limited interpolant through prescribed points.

    The fitted function is ``f(t) = mu * sum_k a_k sinc(mu (t - t_k))``,
    band-limited to ``mu / 2`` Hz, with ``f(t_i) = A_i``.  Among all
    finite-energy functions with that band limit passing through the points
    it has the least energy ``int |f|^2 dt``.

    Parameters
    ----------
    bandwidth : float
        ``mu``; the interpolant is band-limited to ``mu / 2`` Hz.
    ridge : float, default 0
        Tikhonov term added to the Gram matrix.  Zero means exact
        interpolation; ill-conditioning is reported, never silently damped.
    cond_threshold : float, default 1e12
        Gram condition numbers above this add an entry to ``warnings_``.

    Attributes
    ----------
    knots_ : ndarray
        Sorted interpolation abscissae.
    coef_ : ndarray
        The ``a_k``.
    gram_ : ndarray
        ``S_jk = sinc(mu (t_j - t_k))``.
    energy_ : float
        Closed-form total energy ``mu * a^T S a``.
    condition_number_ : float
    warnings_ : list of str
    """

    def __init__(self, bandwidth=1.0, ridge=0.0, cond_threshold=CONDITION_THRESHOLD):
        self.bandwidth = bandwidth
        self.ridge = ridge
        self.cond_threshold = cond_threshold

    def fit(self, X, y):
        mu = check_positive(self.bandwidth, "bandwidth")
        ridge = check_positive(self.ridge, "ridge", strict=False)
        t, values = check_points(X, y)
        values = values.astype(float)
        order = np.argsort(t, kind="stable")
        t, values = t[order], values[order]
        gaps = np.diff(t)
        close = np.flatnonzero(gaps < DUPLICATE_SPACING / mu)
        if close.size:
            pairs = [(float(t[i]), float(t[i + 1])) for i in close]
            raise DuplicatePointsError(
                f"interpolation points closer than {DUPLICATE_SPACING}/mu: {pairs}", pairs
            )
        self.warnings_ = []
        gram = np.sinc(mu * (t[:, None] - t[None, :]))
        self.condition_number_ = float(np.linalg.cond(gram))
        _warn_conditioning(self, self.condition_number_, self.cond_threshold, "Gram matrix")
        try:
            factor = linalg.cho_factor(gram + ridge * np.eye(t.size))
        except linalg.LinAlgError as exc:
            i = int(np.argmin(gaps)) if gaps.size else 0
            raise SuperoscError(
                f"Gram system is singular; nearest points t={t[i]!r}, t={t[i + 1]!r}"
            ) from exc
        self.knots_ = t
        self.coef_ = linalg.cho_solve(factor, values) / mu
        self.gram_ = gram
        self.energy_ = float(mu * self.coef_ @ gram @ self.coef_)
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        t = check_points(X)
        mu = self.bandwidth
        return mu * np.sinc(mu * (t[:, None] - self.knots_[None, :])) @ self.coef_

    def spectral_energy(self, *, epsabs=0.0, epsrel=1e-12):
        """Energy by quadrature of ``|F(nu)|^2`` over the pass band ``|nu| < mu/2``.

        Independent of the Gram closed form: ``mu sinc(mu t)`` transforms to
        the unit box of width ``mu``, so ``F(nu) = sum_k a_k exp(-2 pi i nu t_k)``.
        """
        check_is_fitted(self, "coef_")
        half = 0.5 * self.bandwidth
        t, a = self.knots_, self.coef_

        def spectrum_sq(nu):
            return np.abs(np.exp(-2j * np.pi * np.outer(nu, t)) @ a) ** 2

        return float(integrate(spectrum_sq, -half, half, epsabs=epsabs, epsrel=epsrel).value)

    def energy_of(self, knots, coef):
        """Closed-form energy of ``mu * sum_k coef_k sinc(mu (t - knots_k))``."""
        mu = self.bandwidth
        knots = np.asarray(knots, dtype=float)
        gram = np.sinc(mu * (knots[:, None] - knots[None, :]))
        return float(mu * coef @ gram @ coef)

    def to_record(self):
        check_is_fitted(self, "coef_")
        return {
            "params": {"bandwidth": self.bandwidth, "ridge": self.ridge,
                       "points": [[float(t), float(v)] for t, v in
                                  zip(self.knots_, self.predict(self.knots_))]},
            "coefficients": self.coef_.tolist(),
            "metrics": {"energy": self.energy_, "condition_number": self.condition_number_},
            "warnings": list(self.warnings_),
        }


def min_energy_interpolant(points, bandwidth, **kwargs):
    """Fit a :class:`MinEnergyInterpolator` to ``[(t_i, A_i), ...]``."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] > 1 and np.any(np.diff(pts[:, 0]) <= 0):
        if np.any(np.abs(np.diff(np.sort(pts[:, 0]))) < DUPLICATE_SPACING / bandwidth):
            pass  # reported by fit with the offending pairs
        else:
            raise SuperoscError("interpolation times must be strictly increasing")
    return MinEnergyInterpolator(bandwidth, **kwargs).fit(pts[:, 0], pts[:, 1])


# -- yield optimisation ----------------------------------------------------------------


def cosine_gram(halfwidth, degree):
    """``G_nm = int_{-a}^{a} cos(n t) cos(m t) dt`` for ``0 <= n, m <= degree``."""
    n = np.arange(degree + 1)
    a = float(halfwidth)
    return a * (np.sinc((n[:, None] - n[None, :]) * a / np.pi)
                + np.sinc((n[:, None] + n[None, :]) * a / np.pi))


def dependent_rows(matrix, rtol=None):
    """Indices of rows that are linear combinations of the other rows."""
    matrix = np.atleast_2d(matrix)
    _, r, piv = linalg.qr(matrix.T, pivoting=True, mode="economic")
    diag = np.abs(np.diag(r))
    if rtol is None:
        rtol = max(matrix.shape) * np.finfo(float).eps
    rank = int(np.count_nonzero(diag > rtol * (diag[0] if diag.size else 0)))
    return sorted(int(i) for i in piv[rank:])


class YieldOptimizer(RegressorMixin, BaseEstimator):
    """Periodic cosine series with maximal energy fraction in ``[-a, a]``.

    Fits ``f(t) = sum_{n=0}^{N} b_n cos(n t)`` (period ``2 pi``) through the
    constraint points ``f(t_j) = A_j`` while maximising the yield
    ``Y = int_{-a}^{a} |f|^2 / int_{-pi}^{pi} |f|^2``.

    The affine feasible set ``b = b0 + Z y`` (least-norm particular solution
    plus an orthonormal null-space basis) is homogenised as ``b = s b0 + Z y``
    so that ``Y`` becomes a generalized Rayleigh quotient in ``(y, s)``; the
    largest eigenpair of the symmetric-definite pencil is rescaled to
    ``s = 1``.  Both quadratic forms are assembled in closed form.

    Parameters
    ----------
    halfwidth : float
        ``a`` in ``(0, pi]``.
    degree : int
        ``N``; the series has ``N + 1`` cosine terms.
    ridge : float, default 0
        Adds ``ridge * |b|^2`` to the denominator energy (off by default).
    cond_threshold : float, default 1e12

    Attributes
    ----------
    coef_ : ndarray of shape (degree + 1,)
    yield_ : float
    no_freedom_ : bool
        True when the constraints determine the series uniquely.
    null_basis_ : ndarray
    condition_number_ : float
    warnings_ : list of str
    """

    def __init__(self, halfwidth=0.5, degree=4, ridge=0.0, cond_threshold=CONDITION_THRESHOLD):
        self.halfwidth = halfwidth
        self.degree = degree
        self.ridge = ridge
        self.cond_threshold = cond_threshold

    def fit(self, X, y):
        a = check_positive(self.halfwidth, "halfwidth")
        if a > np.pi:
            raise SuperoscError(f"halfwidth must be in (0, pi], got {a}")
        deg = check_int(self.degree, "degree", minimum=0)
        ridge = check_positive(self.ridge, "ridge", strict=False)
        t, values = check_points(X, y)
        values = values.astype(float)
        if np.any(np.abs(t) > a * (1 + 1e-12)):
            raise SuperoscError("constraint points must lie inside [-halfwidth, halfwidth]")
        if t.size > deg + 1:
            raise SuperoscError(f"{t.size} constraints exceed the {deg + 1} available coefficients")

        n = np.arange(deg + 1)
        cons = np.cos(np.outer(t, n))
        dependent = dependent_rows(cons)
        if dependent:
            raise RankDeficientError(
                f"constraints {dependent} are linearly dependent on the others", dependent
            )
        self.warnings_ = []
        sv = linalg.svdvals(cons)
        self.condition_number_ = float(sv[0] / sv[-1])
        _warn_conditioning(self, self.condition_number_, self.cond_threshold, "constraint matrix")

        inner = cosine_gram(a, deg)
        total = cosine_gram(np.pi, deg) + ridge * np.eye(deg + 1)
        b0 = linalg.lstsq(cons, values)[0]
        null = linalg.null_space(cons)
        self.null_basis_ = null
        self.no_freedom_ = null.shape[1] == 0

        if self.no_freedom_:
            coef = b0
        else:
            homogeneous = not np.any(values)
            basis = null if homogeneous else np.column_stack([null, b0])
            p_red = basis.T @ inner @ basis
            q_red = basis.T @ total @ basis
            _, vecs = linalg.eigh(p_red, q_red)
            u = vecs[:, -1]
            if homogeneous:
                coef = basis @ u
            else:
                s = u[-1]
                if abs(s) < 1e-13 * np.linalg.norm(u):
                    raise SuperoscError(
                        "yield supremum is approached only at infinity along the null space"
                    )
                coef = basis @ (u / s)
        self.coef_ = coef
        self.degree_ = deg
        self.yield_ = float(coef @ inner @ coef / (coef @ total @ coef))
        self._inner = inner
        self._total = total
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        t = np.asarray(X, dtype=float).ravel()
        return np.cos(np.outer(t, np.arange(self.degree_ + 1))) @ self.coef_

    def yield_of(self, coef):
        return float(coef @ self._inner @ coef / (coef @ self._total @ coef))

    def projected_gradient_norm(self):
        """Norm of the yield gradient projected onto the constraint null space."""
        check_is_fitted(self, "coef_")
        b = self.coef_
        denom = b @ self._total @ b
        grad = 2.0 * (self._inner @ b - self.yield_ * (self._total @ b)) / denom
        return float(np.linalg.norm(self.null_basis_.T @ grad)) if not self.no_freedom_ else 0.0

    def to_record(self):
        check_is_fitted(self, "coef_")
        return {
            "params": {"halfwidth": self.halfwidth, "degree": self.degree, "ridge": self.ridge},
            "coefficients": self.coef_.tolist(),
            "metrics": {"Y": self.yield_, "condition_number": self.condition_number_,
                        "no_freedom": self.no_freedom_},
            "warnings": list(self.warnings_),
        }


def optimize_yield(constraints, halfwidth, degree, **kwargs):
    """Fit a :class:`YieldOptimizer` to constraint pairs ``[(t_j, A_j), ...]``."""
    pts = np.asarray(constraints, dtype=float).reshape(-1, 2)
    return YieldOptimizer(halfwidth, degree, **kwargs).fit(pts[:, 0], pts[:, 1])
