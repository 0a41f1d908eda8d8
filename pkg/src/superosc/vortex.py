"""Optical vortices, their local momentum and the superkick momentum distribution.

A probe atom with Gaussian wavefunction centred at ``(x0, 0, 0)`` absorbs
from the vortex field ``(x + i y)^m exp(i k0 z)``; to first order its state
becomes ``E(r) psi_init(r)``.  With the forward transform
``int f(r) exp(-i k.r) dr`` the momentum density is exactly

    N^2 exp(-(kz - k0)^2 s^2) (kx^2 + (ky + x0/s^2)^2)^m exp(-(kx^2 + ky^2) s^2)

with ``s = sigma``.  Its transverse peak sits at positive ``ky``, along the
local momentum ``+m/x0`` of the field at the probe centre.
"""

from dataclasses import dataclass
from math import comb, gamma

import numpy as np
from scipy import optimize

from ._validation import check_int, check_positive
from .analysis import LocalWavenumber
from .exceptions import SingularityError, SuperoscError
from .signal import SampledField, dft_oracle

MIN_SPAN_SIGMAS = 8.0
MIN_POINTS = 128


@dataclass(frozen=True)
class VortexProbe:
    """Vortex order ``m``, axial wavenumber ``k0``, probe width ``sigma``, offset ``x0``."""

    m: int
    k0: float
    sigma: float
    x0: float

    def __post_init__(self):
        object.__setattr__(self, "m", check_int(self.m, "m", minimum=0))
        object.__setattr__(self, "k0", check_positive(self.k0, "k0"))
        object.__setattr__(self, "sigma", check_positive(self.sigma, "sigma"))
        object.__setattr__(self, "x0", float(self.x0))

    @property
    def shift(self):
        """``x0 / sigma^2``, the offset inside the polynomial factor."""
        return self.x0 / self.sigma ** 2


def _split(r):
    r = np.asarray(r, dtype=float)
    if r.shape[-1] != 3:
        raise SuperoscError("positions must be 3-vectors")
    return r[..., 0], r[..., 1], r[..., 2]


def vortex_field(m, k0):
    """Return ``E(r) = (x + i y)^m exp(i k0 z)`` (unit normalization)."""
    m = check_int(m, "m", minimum=0)

    def field(r):
        x, y, z = _split(r)
        return (x + 1j * y) ** m * np.exp(1j * k0 * z)

    return field


def vortex_gradient(m, k0):
    """Analytic gradient of :func:`vortex_field`, shape ``(..., 3)``."""
    m = check_int(m, "m", minimum=0)

    def grad(r):
        x, y, z = _split(r)
        w = x + 1j * y
        axial = np.exp(1j * k0 * z)
        dw = m * w ** (m - 1) * axial if m else np.zeros_like(w) * axial
        return np.stack([dw, 1j * dw, 1j * k0 * w ** m * axial], axis=-1)

    return grad


def vortex_local_momentum(m, k0, r):
    """``(m / r_perp) e_phi + k0 e_z``.

    Raises
    ------
    SingularityError
        On the vortex core ``r_perp = 0``.
    """
    x, y, z = _split(r)
    rho2 = x ** 2 + y ** 2
    if np.any(rho2 == 0):
        raise SingularityError("local momentum undefined on vortex core (r_perp = 0)")
    vec = np.stack([-m * y / rho2, m * x / rho2, np.full(np.shape(z), float(k0))], axis=-1)
    return LocalWavenumber(vec)


# -- closed form ------------------------------------------------------------------


def _gauss_moment(p, sigma):
    """``int k^p exp(-sigma^2 k^2) dk``."""
    if p % 2:
        return 0.0
    return gamma((p + 1) / 2) / sigma ** (p + 1)


def _shifted_moment(q, py, c, sigma):
    """``int ky^py (ky + c)^q exp(-sigma^2 ky^2) dky``."""
    return sum(comb(q, i) * c ** (q - i) * _gauss_moment(i + py, sigma) for i in range(q + 1))


def transverse_moment(p, px=0, py=0):
    """``int kx^px ky^py (kx^2 + (ky + c)^2)^m exp(-s^2 (kx^2 + ky^2))`` in closed form."""
    m, s, c = p.m, p.sigma, p.shift
    return sum(comb(m, j) * _gauss_moment(2 * j + px, s) * _shifted_moment(2 * (m - j), py, c, s)
               for j in range(m + 1))


def normalization(p):
    """``N^2`` making the momentum density integrate to one."""
    return 1.0 / (transverse_moment(p) * np.sqrt(np.pi) / p.sigma)


def transverse_density(p, kx, ky):
    """Transverse marginal ``int |psi(k)|^2 dkz``, normalized to one."""
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    s2 = p.sigma ** 2
    poly = (kx ** 2 + (ky + p.shift) ** 2) ** p.m
    return poly * np.exp(-(kx ** 2 + ky ** 2) * s2) / transverse_moment(p)


def kz_marginal(p, kz):
    """Axial marginal: Gaussian centred at ``k0`` with variance ``1 / (2 sigma^2)``."""
    kz = np.asarray(kz, dtype=float)
    return p.sigma / np.sqrt(np.pi) * np.exp(-((kz - p.k0) * p.sigma) ** 2)


def superkick_distribution(p, k):
    """Normalized momentum density ``|psi(k)|^2`` at 3-vectors ``k``."""
    kx, ky, kz = _split(k)
    return transverse_density(p, kx, ky) * kz_marginal(p, kz)


def mean_transverse_kick(p):
    """``(<kx>, <ky>)`` from closed-form Gaussian moments; ``<kx>`` vanishes by parity."""
    norm = transverse_moment(p)
    return np.array([0.0, transverse_moment(p, py=1) / norm])


def transverse_peak(p):
    """Location of the transverse density maximum (grid search, then local polish)."""
    s = p.sigma
    reach = (abs(p.shift) * s + np.sqrt(p.m + 1) + 4) / s
    g = np.linspace(-reach, reach, 401)
    kx, ky = np.meshgrid(g, g, indexing="ij")
    dens = transverse_density(p, kx, ky)
    i, j = np.unravel_index(np.argmax(dens), dens.shape)
    res = optimize.minimize(lambda v: -transverse_density(p, v[0], v[1]),
                            [g[i], g[j]], method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    return np.array(res.x)


# -- FFT oracle -----------------------------------------------------------------------


def superkick_fft_oracle(p, n=256, span=None):
    """Transverse momentum density of ``E(r) psi_init(r)`` by discrete Fourier transform.

    The field is sampled on an ``n x n`` grid of side ``span`` (default
    ``20 sigma``) centred on the probe; the squared DFT is normalized so that
    ``sum(density) * dk^2 = 1``.  Independent of the closed form.

    Raises
    ------
    SuperoscError
        If the grid spans less than ``8 sigma`` or has fewer than 128 points.
    """
    n = check_int(n, "n")
    span = 20.0 * p.sigma if span is None else check_positive(span, "span")
    if span < MIN_SPAN_SIGMAS * p.sigma or n < MIN_POINTS:
        raise SuperoscError(
            f"under-resolved oracle grid: need span >= {MIN_SPAN_SIGMAS} sigma "
            f"({MIN_SPAN_SIGMAS * p.sigma}) and >= {MIN_POINTS} points per axis; "
            f"got span {span}, n {n}"
        )
    dx = span / n
    xs = p.x0 + dx * (np.arange(n) - n // 2)
    ys = dx * (np.arange(n) - n // 2)
    x, y = np.meshgrid(xs, ys, indexing="ij")
    init = np.exp(-((x - p.x0) ** 2 + y ** 2) / (2 * p.sigma ** 2))
    psi = SampledField((xs[0], ys[0]), (dx, dx), (x + 1j * y) ** p.m * init)
    mom = dft_oracle(psi)
    dens = np.abs(mom.values) ** 2
    dk = mom.spacing[0] * mom.spacing[1]
    return SampledField(mom.origin, mom.spacing, dens / (dens.sum() * dk))


def oracle_l1(p, n=256, span=None):
    """L1 distance between the closed-form transverse density and the FFT oracle."""
    fft = superkick_fft_oracle(p, n, span)
    kx, ky = np.meshgrid(*fft.axes(), indexing="ij")
    closed = transverse_density(p, kx, ky)
    cell = fft.spacing[0] * fft.spacing[1]
    closed = closed / (closed.sum() * cell)
    return float(np.abs(fft.values.real - closed).sum() * cell)


def kz_marginal_numeric(p, kz, n=241):
    """Integrate the 3-D density over the transverse plane on a fine grid."""
    s = p.sigma
    reach = (abs(p.shift) * s + np.sqrt(p.m + 1) + 8) / s
    g = np.linspace(-reach, reach, n)
    kx, ky = np.meshgrid(g, g, indexing="ij")
    dk = g[1] - g[0]
    out = []
    for z in np.atleast_1d(kz):
        k = np.stack([kx, ky, np.full_like(kx, z)], axis=-1)
        out.append(superkick_distribution(p, k).sum() * dk * dk)
    return np.array(out)


def summary(p):
    return {
        "m": p.m, "sigma": p.sigma, "x0": p.x0, "k0": p.k0,
        "mean_kick": mean_transverse_kick(p).tolist(),
        "peak_location": transverse_peak(p).tolist(),
    }
