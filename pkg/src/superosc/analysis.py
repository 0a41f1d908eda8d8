"""Local wavenumbers, superoscillatory regions, yields and random-wave statistics."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._validation import check_int, check_positive
from .exceptions import SingularityError, SuperoscError
from .signal import energy, make_rng

SINGULAR_INTENSITY = 1e-300
BATCH_COARSE = 16
BATCH_FINE = 16
LATTICE_CELLS = 64
# |k| must beat k_max by more than rounding to count as superoscillatory
K_MARGIN = 1e-12
_MC_TAG = 1


@dataclass(frozen=True)
class LocalWavenumber:
    """Local wavenumber vector(s); the last axis of ``vector`` runs over dimensions."""

    vector: np.ndarray

    @property
    def magnitude(self):
        return np.linalg.norm(self.vector, axis=-1)


def local_wavenumber(psi, grad):
    """Current-density form ``Im(conj(psi) grad psi) / |psi|^2``.

    Parameters
    ----------
    psi : complex or array
    grad : array, shape ``psi.shape + (D,)``
        Gradient of ``psi`` (a scalar ``psi`` may take a 1-D ``grad``).

    Raises
    ------
    SingularityError
        If ``|psi|^2 < 1e-300`` anywhere: the wavenumber diverges there.
    """
    psi = np.asarray(psi, dtype=complex)
    grad = np.asarray(grad, dtype=complex)
    if grad.ndim == psi.ndim:
        grad = grad[..., None]
    intensity = np.abs(psi) ** 2
    if np.any(intensity < SINGULAR_INTENSITY):
        raise SingularityError("local wavenumber undefined at phase singularity (|psi|^2 < 1e-300)")
    k = np.imag(np.conj(psi)[..., None] * grad) / intensity[..., None]
    return LocalWavenumber(k)


def phase_gradient(func, points, h):
    """Finite-difference phase gradient of ``func`` at ``points``.

    Central differences with step ``h`` per axis; each half step's phase
    difference is wrapped to ``(-pi, pi]`` so no unwrapping of ``arg psi``
    is ever needed.

    Parameters
    ----------
    func : callable
        Maps an array of shape ``(n, D)`` to ``n`` complex values.
    points : array, shape ``(n, D)`` or ``(n,)`` for D = 1
    h : float
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    centre = func(pts)
    if np.any(np.abs(centre) ** 2 < SINGULAR_INTENSITY):
        raise SingularityError("phase gradient undefined at phase singularity")
    out = np.empty(pts.shape)
    for d in range(pts.shape[1]):
        step = np.zeros(pts.shape[1])
        step[d] = h
        fwd = np.angle(func(pts + step) * np.conj(centre))
        back = np.angle(centre * np.conj(func(pts - step)))
        out[:, d] = (fwd + back) / (2 * h)
    return LocalWavenumber(out)


@dataclass(frozen=True)
class SORegion:
    """Interval where ``|k| > k_max``; ``singular`` marks a zero-width phase singularity."""

    lo: float
    hi: float
    singular: bool = False

    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, x):
        return self.lo <= x <= self.hi


def _wavenumber_1d(psi, dpsi, h):
    """Return ``k(x)`` (nan at singularities) for a 1-D callable field."""

    def k_of(x):
        x = np.asarray(x, dtype=float)
        v = psi(x)
        sing = np.abs(v) ** 2 < SINGULAR_INTENSITY
        safe = np.where(sing, 1.0, v)
        if dpsi is not None:
            k = np.imag(np.conj(safe) * dpsi(x)) / np.abs(safe) ** 2
        else:
            fwd = np.angle(psi(x + h) * np.conj(safe))
            back = np.angle(safe * np.conj(psi(x - h)))
            k = (fwd + back) / (2 * h)
        return np.where(sing, np.nan, np.abs(k))

    return k_of


def detect_so_regions(psi, x, k_max, *, dpsi=None, xtol=1e-6):
    """Maximal intervals of the grid ``x`` where the local wavenumber exceeds ``k_max``.

    Parameters
    ----------
    psi : callable
        Vectorized 1-D field.
    x : array
        Uniform grid; its spacing must be at most ``1 / (8 k_max)``.
    k_max : float
    dpsi : callable, optional
        Exact derivative; without it central differences with step equal to
        the grid spacing are used.
    xtol : float
        Endpoints are bisected down to ``xtol`` times the grid spacing.

    Returns
    -------
    list of SORegion
        Sorted by position.  Grid points at a phase singularity come back as
        zero-width regions with ``singular=True``.
    """
    k_max = check_positive(k_max, "k_max")
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 2:
        raise SuperoscError("scan grid needs at least two points")
    h = x[1] - x[0]
    if not (h > 0 and np.allclose(np.diff(x), h, rtol=1e-9, atol=0)):
        raise SuperoscError("scan grid must be uniform and increasing")
    if h > 1.0 / (8 * k_max) * (1 + 1e-12):
        raise SuperoscError(
            f"grid spacing {h} does not resolve 1/k_max with 8 points (need <= {1 / (8 * k_max)})"
        )
    k_of = _wavenumber_1d(psi, dpsi, h)
    threshold = k_max * (1 + K_MARGIN)
    kx = k_of(x)
    singular = np.isnan(kx)
    above = np.where(singular, False, kx > threshold)

    def refine(inside, outside):
        inside, outside = inside.copy(), outside.copy()
        while np.any(np.abs(inside - outside) > xtol * h):
            mid = 0.5 * (inside + outside)
            km = k_of(mid)
            up = np.isnan(km) | (km > threshold)
            inside = np.where(up, mid, inside)
            outside = np.where(up, outside, mid)
        return inside

    regions = []
    idx = np.flatnonzero(above)
    if idx.size:
        breaks = np.flatnonzero(np.diff(idx) > 1)
        starts = idx[np.r_[0, breaks + 1]]
        ends = idx[np.r_[breaks, idx.size - 1]]
        lo = x[starts].copy()
        hi = x[ends].copy()
        left = starts > 0
        right = ends < x.size - 1
        if np.any(left):
            lo[left] = refine(x[starts[left]], x[starts[left] - 1])
        if np.any(right):
            hi[right] = refine(x[ends[right]], x[ends[right] + 1])
        regions = [SORegion(float(a), float(b)) for a, b in zip(lo, hi)]
    regions += [SORegion(float(x[i]), float(x[i]), True) for i in np.flatnonzero(singular)]
    return sorted(regions, key=lambda r: (r.lo, r.hi))


def scan_table(psi, x, k_max, *, dpsi=None):
    """Rows ``(x, Re psi, Im psi, |k|, is_super)`` for a 1-D scan; ``|k|`` is inf at singularities."""
    x = np.asarray(x, dtype=float).ravel()
    h = x[1] - x[0] if x.size > 1 else 1.0
    v = psi(x)
    k = _wavenumber_1d(psi, dpsi, h)(x)
    k = np.where(np.isnan(k), np.inf, k)
    return np.column_stack([x, v.real, v.imag, k, (k > k_max * (1 + K_MARGIN)).astype(float)])


# -- yield ----------------------------------------------------------------------------


def measure_yield(evaluator, a):
    """Energy fraction of a ``2 pi``-periodic function inside ``[-a, a]``."""
    a = check_positive(a, "a")
    if a > np.pi * (1 + 1e-15):
        raise SuperoscError(f"a must lie in (0, pi], got {a}")
    total = energy(evaluator, (-np.pi, np.pi))
    if total == 0:
        raise SuperoscError("function has zero energy over the period")
    return energy(evaluator, (-a, a)) / total


# -- random waves ---------------------------------------------------------------------


@dataclass(frozen=True)
class PlaneWaveEnsemble:
    """``psi(r) = sum_n a_n exp(i k0 u_n . r)`` with unit directions ``u_n``.

    Every member solves the Helmholtz equation ``lap psi + k0^2 psi = 0``.
    """

    amplitudes: np.ndarray
    directions: np.ndarray
    k0: float

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex).ravel()
        dirs = np.array(self.directions, dtype=float)
        if dirs.ndim == 1:
            dirs = dirs[:, None]
        if dirs.shape[0] != amp.size:
            raise SuperoscError("need one direction per amplitude")
        if not np.allclose(np.linalg.norm(dirs, axis=1), 1.0, rtol=0, atol=1e-12):
            raise SuperoscError("directions must be unit vectors")
        k0 = check_positive(self.k0, "k0")
        amp.flags.writeable = False
        dirs.flags.writeable = False
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "k0", k0)

    @property
    def dimension(self):
        return self.directions.shape[1]

    @property
    def wavevectors(self):
        return self.k0 * self.directions

    def _phases(self, r):
        r = np.asarray(r, dtype=float)
        if self.dimension == 1 and (r.ndim == 0 or r.shape[-1] != 1):
            r = r[..., None]
        return np.exp(1j * (r @ self.wavevectors.T))

    def __call__(self, r):
        return self._phases(r) @ self.amplitudes

    def gradient(self, r):
        return (self._phases(r) * self.amplitudes) @ (1j * self.wavevectors)

    def laplacian(self, r):
        return -self.k0 ** 2 * self(r)


def random_directions(rng, n, dimension):
    if dimension == 1:
        return rng.choice([-1.0, 1.0], size=(n, 1))
    v = rng.standard_normal((n, dimension))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_amplitudes(rng, n):
    """I.i.d. circular complex Gaussian, ``E|a|^2 = 1``."""
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)


def random_wave(dimension, n_terms, k0, seed, *, partition=(0,)):
    """Random monochromatic wave; deterministic in ``(seed, partition)``."""
    dimension = check_int(dimension, "dimension", minimum=1)
    n_terms = check_int(n_terms, "n_terms", minimum=2)
    rng = make_rng(seed, *partition)
    amp = random_amplitudes(rng, n_terms)
    return PlaneWaveEnsemble(amp, random_directions(rng, n_terms, dimension), k0)


def so_fraction_closed(dimension):
    """``1 - (D / (D + 1))**(D / 2)``: chance that ``|k| > k0`` at a random point."""
    d = check_int(dimension, "dimension", minimum=1)
    return float(-np.expm1(0.5 * d * np.log1p(-1.0 / (d + 1))))


@dataclass(frozen=True)
class MCResult:
    estimate: float
    stderr: float
    samples: int
    batches: int

    def as_tuple(self):
        return self.estimate, self.stderr


def _batch_fraction(dimension, n_terms, k0, seed, b):
    # Coarse lattice cells times fine offsets: each of the P1*P2 points is
    # exactly uniform on the cube, and psi factorises into two small matmuls.
    rng = make_rng(seed, _MC_TAG, b)
    amp = random_amplitudes(rng, n_terms)
    kv = k0 * random_directions(rng, n_terms, dimension)
    side = 4 * 2 * np.pi / k0
    cell = side / LATTICE_CELLS
    coarse = rng.integers(0, LATTICE_CELLS, size=(BATCH_COARSE, dimension)) * cell - side / 2
    fine = rng.random((BATCH_FINE, dimension)) * cell
    ec = np.exp(1j * (coarse @ kv.T)) * amp
    ef = np.exp(1j * (fine @ kv.T))
    psi = ec @ ef.T
    jsq = np.zeros(psi.shape)
    for d in range(dimension):
        jsq += np.imag(np.conj(psi) * ((ec * (1j * kv[:, d])) @ ef.T)) ** 2
    return float(np.mean(jsq > (k0 * np.abs(psi) ** 2) ** 2))


def so_fraction_mc(dimension, n_terms, k0, n_samples, seed, *, threads=1):
    """Monte Carlo probability that the local wavenumber exceeds ``k0``.

    Samples come in batches of ``16 x 16`` points, each batch with a fresh
    random ensemble drawn from its own substream ``(seed, 1, batch)``; the
    standard error comes from the spread of batch means.  ``n_samples`` is
    rounded up to whole batches.  Results do not depend on ``threads``.
    The comparison ``|J| > k0 |psi|^2`` avoids dividing by ``|psi|^2``.
    """
    dimension = check_int(dimension, "dimension", minimum=1)
    n_terms = check_int(n_terms, "n_terms", minimum=2)
    k0 = check_positive(k0, "k0")
    n_samples = check_int(n_samples, "n_samples", minimum=1000)
    threads = check_int(threads, "threads", minimum=1)
    per_batch = BATCH_COARSE * BATCH_FINE
    n_batches = -(-n_samples // per_batch)

    def run(b):
        return _batch_fraction(dimension, n_terms, k0, seed, b)

    if threads == 1:
        means = np.array([run(b) for b in range(n_batches)])
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            means = np.array(list(pool.map(run, range(n_batches))))
    est = float(means.mean())
    err = float(means.std(ddof=1) / np.sqrt(n_batches)) if n_batches > 1 else float("nan")
    return MCResult(est, err, n_batches * per_batch, n_batches)


def so_fraction_direct(dimension, n_terms, k0, n_samples, seed, *, n_ensembles=100):
    """Reference estimator: direct evaluation at i.i.d. uniform points.

    Slower than :func:`so_fraction_mc` but shares no sampling shortcut with
    it, so the two can be compared.
    """
    per = -(-n_samples // n_ensembles)
    side = 4 * 2 * np.pi / k0
    means = []
    for e in range(n_ensembles):
        wave = random_wave(dimension, n_terms, k0, seed, partition=(2, e))
        rng = make_rng(seed, 3, e)
        r = (rng.random((per, dimension)) - 0.5) * side
        k = local_wavenumber(wave(r), wave.gradient(r)).magnitude
        means.append(np.mean(k > k0))
    means = np.array(means)
    return MCResult(float(means.mean()), float(means.std(ddof=1) / np.sqrt(n_ensembles)),
                    per * n_ensembles, n_ensembles)
