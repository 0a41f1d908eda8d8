"""Band-limited spectra, sampled fields, energies and the DFT oracle.

Units: hbar = 1 throughout the package, so wavenumbers and momenta are the
same quantity.
"""

from dataclasses import dataclass, field
from functools import reduce
import operator

import numpy as np

from ._validation import check_int, check_interval, check_positive
from .exceptions import SuperoscError
from .quadrature import DEFAULT_EPSABS, DEFAULT_EPSREL, integrate

_BAND_RTOL = 1e-12


@dataclass(frozen=True)
class BandLimitedSpectrum:
    """Discrete spectrum ``f(x) = sum_m c_m exp(i k_m x)`` with ``|k_m| <= k_max``."""

    wavenumbers: np.ndarray
    coefficients: np.ndarray
    band_limit: float

    def __post_init__(self):
        k = np.array(self.wavenumbers, dtype=float).ravel()
        c = np.array(self.coefficients, dtype=complex).ravel()
        if k.shape != c.shape:
            raise SuperoscError("wavenumbers and coefficients differ in length")
        kmax = check_positive(self.band_limit, "band_limit", strict=False)
        if not (np.all(np.isfinite(k)) and np.all(np.isfinite(c))):
            raise SuperoscError("spectrum contains non-finite entries")
        if k.size and np.max(np.abs(k)) > kmax * (1 + _BAND_RTOL):
            raise SuperoscError(
                f"component at |k|={np.max(np.abs(k))} exceeds band limit {kmax}"
            )
        if np.unique(k).size != k.size:
            raise SuperoscError("wavenumbers must be distinct")
        k.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "wavenumbers", k)
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "band_limit", kmax)

    def __call__(self, x):
        return evaluate_spectrum(self, x)

    def derivative(self, x):
        """Exact derivative ``sum_m i k_m c_m exp(i k_m x)``."""
        x = np.asarray(x, dtype=float)
        phase = np.exp(1j * np.multiply.outer(x, self.wavenumbers))
        return phase @ (1j * self.wavenumbers * self.coefficients)

    def scaled(self, alpha):
        return BandLimitedSpectrum(self.wavenumbers, alpha * self.coefficients, self.band_limit)

    def __add__(self, other):
        if not isinstance(other, BandLimitedSpectrum):
            return NotImplemented
        merged = {}
        for k, c in zip(np.concatenate([self.wavenumbers, other.wavenumbers]),
                        np.concatenate([self.coefficients, other.coefficients])):
            merged[k] = merged.get(k, 0) + c
        ks = np.array(sorted(merged))
        return BandLimitedSpectrum(ks, np.array([merged[k] for k in ks]),
                                   max(self.band_limit, other.band_limit))


def evaluate_spectrum(spec, x):
    """Evaluate ``sum_m c_m exp(i k_m x)`` at scalar or array ``x``."""
    x = np.asarray(x, dtype=float)
    phase = np.exp(1j * np.multiply.outer(x, spec.wavenumbers))
    out = phase @ spec.coefficients
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class SampledField:
    """Complex values on a regular lattice.

    ``values`` has one axis per dimension (C order); coordinate ``d`` of
    lattice index ``i`` is ``origin[d] + i * spacing[d]``.
    """

    origin: tuple
    spacing: tuple
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        origin = tuple(float(o) for o in np.atleast_1d(self.origin))
        spacing = tuple(float(s) for s in np.atleast_1d(self.spacing))
        if values.ndim < 1:
            raise SuperoscError("values must have at least one axis")
        if len(origin) != values.ndim or len(spacing) != values.ndim:
            raise SuperoscError(
                f"origin/spacing need {values.ndim} entries, got {len(origin)}/{len(spacing)}"
            )
        if any(not (s > 0 and np.isfinite(s)) for s in spacing):
            raise SuperoscError(f"spacing must be strictly positive, got {spacing}")
        values.flags.writeable = False
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "values", values)

    @property
    def dimension(self):
        return self.values.ndim

    @property
    def extents(self):
        return self.values.shape

    @property
    def size(self):
        return reduce(operator.mul, self.extents, 1)

    def axes(self):
        return [o + s * np.arange(n) for o, s, n in zip(self.origin, self.spacing, self.extents)]

    def coordinates(self):
        """Lattice coordinates, shape ``(size, D)`` in C order."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @classmethod
    def from_function(cls, func, axes):
        """Sample ``func(*coords)`` on the tensor grid spanned by uniform ``axes``."""
        axes = [np.asarray(a, dtype=float) for a in axes]
        spacing = []
        for a in axes:
            if a.size < 2:
                raise SuperoscError("each axis needs at least two points")
            d = np.diff(a)
            if not np.allclose(d, d[0], rtol=1e-9, atol=0):
                raise SuperoscError("axes must be uniformly spaced")
            spacing.append(d[0])
        mesh = np.meshgrid(*axes, indexing="ij")
        return cls(tuple(a[0] for a in axes), tuple(spacing), func(*mesh))


def energy(source, interval, *, epsabs=DEFAULT_EPSABS, epsrel=DEFAULT_EPSREL):
    """Energy ``int_lo^hi |f(t)|^2 dt``.

    ``source`` may be a :class:`BandLimitedSpectrum`, a vectorized callable,
    or a 1-D :class:`SampledField`.  Callables and spectra go through the
    adaptive quadrature; a sampled field can only be integrated on its own
    lattice (composite Simpson over the samples inside the interval).
    """
    lo, hi = check_interval(*interval)
    if isinstance(source, SampledField):
        if source.dimension != 1:
            raise SuperoscError("energy of a sampled field requires a 1-D field")
        if not np.all(np.isfinite(source.values)):
            raise SuperoscError("field contains non-finite values")
        from scipy.integrate import simpson

        t = source.axes()[0]
        inside = (t >= lo - 1e-12 * source.spacing[0]) & (t <= hi + 1e-12 * source.spacing[0])
        if np.count_nonzero(inside) < 2:
            raise SuperoscError("interval contains fewer than two samples")
        return float(simpson(np.abs(source.values[inside]) ** 2, x=t[inside]))

    func = source

    def integrand(t):
        v = func(t)
        if not np.all(np.isfinite(v)):
            raise SuperoscError("field evaluated to non-finite values")
        return np.abs(v) ** 2

    return float(integrate(integrand, lo, hi, epsabs=epsabs, epsrel=epsrel).value)


def dft_oracle(field, inverse=False, origin=None):
    """Unitary discrete Fourier transform of a sampled field.

    Forward convention ``F(k) = sum_r f(r) exp(-i k.r) / sqrt(n)``.  The
    momentum grid is centred (zero frequency in the middle, as after
    ``fftshift``) with spacing ``2*pi / (n * dx)`` per axis.  ``inverse=True``
    undoes a previous forward call; momentum space does not record the
    position-space origin, so pass ``origin`` to restore it (default zero).
    """
    if any(n < 2 for n in field.extents):
        raise SuperoscError("DFT oracle needs at least two points per axis")
    axes = tuple(range(field.dimension))
    if not inverse:
        values = np.fft.fftshift(np.fft.fftn(field.values, norm="ortho"), axes=axes)
        spacing = tuple(2 * np.pi / (n * dx) for n, dx in zip(field.extents, field.spacing))
        origin = tuple(-(n // 2) * dk for n, dk in zip(field.extents, spacing))
        return SampledField(origin, spacing, values)
    values = np.fft.ifftn(np.fft.ifftshift(field.values, axes=axes), norm="ortho")
    spacing = tuple(2 * np.pi / (n * dk) for n, dk in zip(field.extents, field.spacing))
    if origin is None:
        origin = (0.0,) * field.dimension
    return SampledField(origin, spacing, values)


MAX_SEED = 2**64 - 1


def check_seed(seed):
    """Validate a 64-bit unsigned seed."""
    seed = check_int(seed, "seed", minimum=0)
    if seed > MAX_SEED:
        raise SuperoscError("seed must fit in 64 bits")
    return seed


def make_rng(seed, *partition):
    """Counter-based generator for substream ``partition`` of ``seed``.

    The stream is a Philox generator keyed through ``SeedSequence(seed,
    spawn_key=partition)``.  Distinct partition tuples give statistically
    independent streams, so Monte Carlo batch ``i`` always draws from
    ``make_rng(seed, tag, i)`` regardless of how batches are scheduled.
    """
    seq = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(p) for p in partition))
    return np.random.Generator(np.random.Philox(seq))
