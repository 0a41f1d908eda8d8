"""Two-state vectors, weak values and pointer supershifts (hbar = 1, spin = sigma / 2)."""

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from ._validation import check_int, check_positive, check_state, normalized
from .analysis import MCResult
from .exceptions import OrthogonalSelectionError, SuperoscError
from .signal import SampledField, dft_oracle, make_rng
from .synthesis import elementary_coefficients

ORTHOGONAL_OVERLAP = 1e-14
SPIN_BATCH = 1 << 20
_SPIN_TAG = 2

SX = np.array([[0, 1], [1, 0]], dtype=complex) / 2
SY = np.array([[0, -1j], [1j, 0]], dtype=complex) / 2
SZ = np.array([[1, 0], [0, -1]], dtype=complex) / 2
UP_Z = np.array([1, 0], dtype=complex)
UP_X = np.array([1, 1], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class HermitianOperator:
    """Bounded observable with a cached eigendecomposition."""

    matrix: np.ndarray
    eigenvalues: np.ndarray = field(init=False, repr=False)
    eigenvectors: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise SuperoscError(f"operator must be a square matrix, got shape {m.shape}")
        if not np.allclose(m, m.conj().T, rtol=0, atol=1e-12):
            raise SuperoscError("operator is not Hermitian to 1e-12")
        vals, vecs = np.linalg.eigh(m)
        for arr in (m, vals, vecs):
            arr.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)

    @classmethod
    def diagonal(cls, values):
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def a_min(self):
        return float(self.eigenvalues[0])

    @property
    def a_max(self):
        return float(self.eigenvalues[-1])

    @property
    def spectral_radius(self):
        return float(np.max(np.abs(self.eigenvalues)))

    def __add__(self, other):
        return HermitianOperator(self.matrix + other.matrix)

    def __rmul__(self, scalar):
        if np.iscomplexobj(scalar) and np.imag(scalar) != 0:
            raise SuperoscError("Hermitian operators only scale by real numbers")
        return HermitianOperator(float(np.real(scalar)) * self.matrix)


@dataclass(frozen=True)
class TwoStateVector:
    """Pre-selected ``|Psi>`` and post-selected ``<Phi|``.

    ``post`` is stored as the ket ``|Phi>``; the bra is its conjugate.
    """

    pre: np.ndarray
    post: np.ndarray

    def __post_init__(self):
        pre = check_state(self.pre, "pre-selection")
        post = check_state(self.post, "post-selection")
        if pre.size != post.size:
            raise SuperoscError("pre- and post-selection differ in dimension")
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "post", post)

    @classmethod
    def from_unnormalized(cls, pre, post):
        return cls(normalized(pre), normalized(post))

    @property
    def overlap(self):
        """``<Phi|Psi>``."""
        return complex(np.vdot(self.post, self.pre))


def expectation(op, psi):
    """``<Psi|A|Psi>`` as a quadratic form."""
    psi = check_state(psi, "state")
    return float(np.real(np.vdot(psi, op.matrix @ psi)))


def expectation_eigensum(op, psi):
    """``sum_j a_j |<phi_j|Psi>|^2`` from the eigendecomposition."""
    psi = check_state(psi, "state")
    return float(op.eigenvalues @ np.abs(op.eigenvectors.conj().T @ psi) ** 2)


def weak_value(tsv, op):
    """``A_w = <Phi|A|Psi> / <Phi|Psi>``.

    Raises
    ------
    OrthogonalSelectionError
        If ``|<Phi|Psi>| < 1e-14``.
    """
    overlap = tsv.overlap
    if abs(overlap) < ORTHOGONAL_OVERLAP:
        raise OrthogonalSelectionError(
            f"orthogonal pre/post-selection: |<Phi|Psi>| = {abs(overlap):.3e}"
        )
    return complex(np.vdot(tsv.post, op.matrix @ tsv.pre) / overlap)


def _diagonal_spin():
    return HermitianOperator((SX + SZ) / np.sqrt(2))


def collective_spin_weak_value(n_particles):
    """Weak value of ``sum_i (S_x + S_z)_i / sqrt 2`` for ``prod |up_z>`` to ``prod <up_x|``.

    Product selections make the weak value additive over particles, so the
    result is ``N`` times the one-particle value ``sqrt(2) / 2``, beyond the
    largest eigenvalue ``N / 2``.
    """
    n = check_int(n_particles, "n_particles", minimum=1)
    return n * weak_value(TwoStateVector(UP_Z, UP_X), _diagonal_spin()).real


def collective_spin_weak_value_tensor(n_particles):
    """Brute-force version on the full ``2**N``-dimensional space (small N only)."""
    n = check_int(n_particles, "n_particles", minimum=1)
    if n > 12:
        raise SuperoscError("tensor evaluation limited to N <= 12")
    single = _diagonal_spin().matrix
    eye = np.eye(2)
    total = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for i in range(n):
        factors = [single if j == i else eye for j in range(n)]
        total += reduce(np.kron, factors)
    pre = reduce(np.kron, [UP_Z] * n)
    post = reduce(np.kron, [UP_X] * n)
    return weak_value(TwoStateVector(pre, post), HermitianOperator(total))


# -- pointer ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PointerModel:
    """Gaussian pointer ``phi(q) = exp(-q^2 / 2 Delta^2) / (Delta sqrt(2 pi))``.

    ``coupling`` is the impulsive coupling ``lambda``; the system's
    eigenvalue ``A_n`` shifts the pointer by ``lambda A_n``.
    """

    width: float
    coupling: float
    grid: np.ndarray = field(repr=False)

    def __post_init__(self):
        width = check_positive(self.width, "width")
        grid = np.array(self.grid, dtype=float).ravel()
        if grid.size < 2:
            raise SuperoscError("pointer grid needs at least two points")
        d = np.diff(grid)
        if not (d[0] > 0 and np.allclose(d, d[0], rtol=1e-9, atol=0)):
            raise SuperoscError("pointer grid must be uniform and increasing")
        grid.flags.writeable = False
        object.__setattr__(self, "width", width)
        object.__setattr__(self, "coupling", float(self.coupling))
        object.__setattr__(self, "grid", grid)

    @classmethod
    def covering(cls, width, coupling, op, *, spacing=None, margin=8.0):
        """Pointer whose grid spans ``lambda A_max + margin * Delta`` on both sides."""
        reach = abs(coupling) * op.spectral_radius + margin * width
        spacing = spacing or width / 20
        n = int(np.ceil(reach / spacing))
        return cls(width, coupling, spacing * np.arange(-n, n + 1))

    def initial(self, q):
        q = np.asarray(q, dtype=float)
        return np.exp(-0.5 * (q / self.width) ** 2) / (self.width * np.sqrt(2 * np.pi))

    def check_covers(self, op):
        reach = abs(self.coupling) * op.spectral_radius + 8 * self.width
        if self.grid[0] > -reach or self.grid[-1] < reach:
            raise SuperoscError(
                f"pointer grid [{self.grid[0]}, {self.grid[-1]}] must cover [-{reach}, {reach}]"
            )


@dataclass(frozen=True)
class PointerState:
    """Final pointer wavefunction with the ingredients that produced it."""

    field: SampledField
    amplitudes: np.ndarray
    eigenvalues: np.ndarray
    weak_value: complex
    overlap: complex

    @property
    def q(self):
        return self.field.axes()[0]

    @property
    def values(self):
        return self.field.values

    def peak(self):
        j = int(np.argmax(np.abs(self.values)))
        return float(self.q[j]), float(np.abs(self.values[j]))


def pointer_amplitudes(tsv, op):
    """``C_n = <f|n><n|i>`` over the eigenbasis of ``op``."""
    vecs = op.eigenvectors
    return (tsv.post.conj() @ vecs) * (vecs.conj().T @ tsv.pre)


def pointer_final_state(pm, tsv, op):
    """``psi(q) = sum_n C_n phi(q - lambda A_n)``, unnormalized.

    Orthogonal selections give a valid near-zero field; the weak value is
    then reported as ``nan``.
    """
    pm.check_covers(op)
    amps = pointer_amplitudes(tsv, op)
    vals = op.eigenvalues
    psi = pm.initial(pm.grid[None, :] - pm.coupling * vals[:, None]).T @ amps
    overlap = tsv.overlap
    try:
        aw = weak_value(tsv, op)
    except OrthogonalSelectionError:
        aw = complex(np.nan, np.nan)
    fld = SampledField((pm.grid[0],), (pm.grid[1] - pm.grid[0],), psi)
    return PointerState(fld, amps, vals, aw, overlap)


def supershift_error(pm, tsv, op):
    """L2 distance between the final pointer and ``<f|i> phi(q - lambda Re A_w)``.

    Measured relative to the norm of the shifted reference pointer, which
    stays well defined while the true final state is still spread over the
    eigenvalue copies.
    """
    state = pointer_final_state(pm, tsv, op)
    if np.linalg.norm(state.values) == 0:
        raise SuperoscError("final pointer state has zero norm")
    shifted = state.overlap * pm.initial(pm.grid - pm.coupling * state.weak_value.real)
    return float(np.linalg.norm(state.values - shifted) / np.linalg.norm(shifted))


def pointer_momentum_variance(width):
    """``<p^2> = 1 / (2 Delta^2)`` for the Gaussian pointer."""
    return 0.5 / check_positive(width, "width") ** 2


def pointer_momentum_shift(pm, tsv, op):
    """First-order momentum kick ``2 lambda Im(A_w) <p^2>``."""
    aw = weak_value(tsv, op)
    return 2 * pm.coupling * aw.imag * pointer_momentum_variance(pm.width)


def mean_momentum(fld):
    """``<p>`` of a 1-D wavefunction, from its DFT."""
    mom = dft_oracle(fld)
    p = mom.axes()[0]
    dens = np.abs(mom.values) ** 2
    return float(p @ dens / dens.sum())


def superweak_probability(eigenvalues, weights=None):
    """Probability that a weak value lands outside ``[-A_max, A_max]``.

    ``1 - A_max / sqrt(<A^2> + A_max^2)``, the tail mass of the Cauchy law
    followed by weak values of random selections.
    """
    vals = np.asarray(eigenvalues, dtype=float).ravel()
    if vals.size == 0:
        raise SuperoscError("eigenvalue list is empty")
    if weights is None:
        weights = np.full(vals.size, 1.0 / vals.size)
    weights = np.asarray(weights, dtype=float).ravel()
    if weights.shape != vals.shape or np.any(weights < 0):
        raise SuperoscError("weights must be non-negative, one per eigenvalue")
    if abs(weights.sum() - 1) > 1e-12:
        raise SuperoscError(f"weights must sum to 1, got {weights.sum()}")
    a_max = np.max(np.abs(vals))
    if a_max == 0:
        raise SuperoscError("spectrum is identically zero")
    second = weights @ vals ** 2
    return float(1 - a_max / np.sqrt(second + a_max ** 2))


# -- spin tails -------------------------------------------------------------------------


def _bloch_samples(rng, n):
    # Haar states of a qubit are uniform on the Bloch sphere.  The weak value
    # of S_z only needs both z components and the relative azimuth.
    az = rng.uniform(-1.0, 1.0, n)
    bz = rng.uniform(-1.0, 1.0, n)
    dphi = rng.uniform(0.0, 2 * np.pi, n)
    return az, bz, dphi


def spin_weak_values(n_samples, seed, *, batch=0):
    """Weak values of ``S_z`` for independent Haar pre/post qubit states.

    Bloch-vector form ``(a_z + b_z + i (a x b)_z) / |a + b|^2``: no matrix
    division, so nearly orthogonal selections keep their large values.
    """
    rng = make_rng(seed, _SPIN_TAG, batch)
    az, bz, dphi = _bloch_samples(rng, n_samples)
    rho = np.sqrt((1 - az ** 2) * (1 - bz ** 2))
    dot = az * bz + rho * np.cos(dphi)
    cross = rho * np.sin(dphi)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (az + bz + 1j * cross) / (2 * (1 + dot))


def spin_tail_fractions(thresholds, n_samples, seed, *, modulus=False):
    """Tail fractions ``P(|S_w| > s)`` for several thresholds on one common sample set.

    Uses ``|Re S_w|`` unless ``modulus`` is set.  Returns ``(estimates,
    stderrs)``; the standard error is binomial since samples are independent.
    """
    thresholds = np.atleast_1d(np.asarray(thresholds, dtype=float))
    if np.any(thresholds < 0):
        raise SuperoscError("thresholds must be >= 0")
    n = check_int(n_samples, "n_samples", minimum=10_000)
    counts = np.zeros(thresholds.size)
    done, b = 0, 0
    while done < n:
        m = min(SPIN_BATCH, n - done)
        w = spin_weak_values(m, seed, batch=b)
        mag = np.abs(w) if modulus else np.abs(w.real)
        mag = np.where(np.isnan(mag), np.inf, mag)
        mag.sort()
        counts += m - np.searchsorted(mag, thresholds, side="right")
        done += m
        b += 1
    est = counts / n
    return est, np.sqrt(est * (1 - est) / n)


def spin_tail_mc(threshold, n_samples, seed, *, modulus=False):
    """Monte Carlo ``P(|Re S_w| > s)`` (or ``|S_w|`` with ``modulus=True``)."""
    s = check_positive(threshold, "threshold", strict=False)
    est, err = spin_tail_fractions([s], n_samples, seed, modulus=modulus)
    return MCResult(float(est[0]), float(err[0]), int(n_samples), -(-int(n_samples) // SPIN_BATCH))


def spin_tail_exact(threshold):
    """Exact ``P(|Re S_w| > s)`` for Haar-random qubit selections."""
    s = np.asarray(threshold, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(s < 0.5, 1 - 4 * s / 3, 1 / (12 * s ** 2))


# -- the pointer-sweep demonstration --------------------------------------------------


def fig5_selections(target=27.0, levels=10):
    """Selections for the ``A_n = n`` (``|n| <= levels``) pointer demonstration.

    The pre-selection is uniform.  The post-selection amplitudes are the
    elementary-superoscillation coefficients ``c_m(a)`` of order ``2 levels``
    with ``m = levels - n``; since ``sum c_m k_m = a`` the weak value is
    exactly ``levels * a``, so ``a = target / levels``.
    """
    levels = check_int(levels, "levels", minimum=1)
    a = float(target) / levels
    if a < 1:
        raise SuperoscError("target weak value must be at least the largest eigenvalue")
    n = np.arange(-levels, levels + 1)
    _, c = elementary_coefficients(a, 2 * levels)
    post = c[levels - n]
    pre = np.ones(n.size)
    return HermitianOperator.diagonal(n), TwoStateVector.from_unnormalized(pre, post)


def fig5_sweep(widths=tuple(range(1, 11)), *, target=27.0, coupling=1.0, q_extent=120.0,
               spacing=0.05):
    """Pointer sweep over Gaussian widths; one record per width."""
    op, tsv = fig5_selections(target)
    n = int(round(q_extent / spacing))
    grid = spacing * np.arange(-n, n + 1)
    rows = []
    for width in widths:
        pm = PointerModel(width, coupling, grid)
        state = pointer_final_state(pm, tsv, op)
        q_peak, amp = state.peak()
        rows.append({
            "width": float(width),
            "supershift_error": supershift_error(pm, tsv, op),
            "peak_q": q_peak,
            "peak_amplitude": amp,
            "state": state,
        })
    return op, tsv, rows
