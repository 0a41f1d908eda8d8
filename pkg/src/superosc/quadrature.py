"""Globally adaptive Gauss-Kronrod (7/15) quadrature for vector-valued integrands.

One subdivision of the integration interval is shared by every output
component, but convergence is judged per component, so a single call can
integrate a family of integrands whose magnitudes differ by many orders (for
example a synthesis integral evaluated on a whole spatial grid).

The node/weight tables and the local error heuristic follow QUADPACK's QK15.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_interval
from .exceptions import QuadratureError

DEFAULT_EPSABS = 1e-12
DEFAULT_EPSREL = 1e-9
DEFAULT_LIMIT = 2000

# Kronrod abscissae on [0, 1), descending; even indices are Kronrod-only,
# odd indices (and the centre) are shared with the 7-point Gauss rule.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
_g = np.zeros(8)
_g[[1, 3, 5, 7]] = _WG
GAUSS_WEIGHTS = np.concatenate([_g[:7], [_g[7]], _g[6::-1]])
del _g

_EPMACH = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny


@dataclass(frozen=True)
class QuadResult:
    """Outcome of :func:`integrate`.

    ``value`` and ``error`` carry the output shape of the integrand.
    ``roundoff_limited`` flags components whose requested tolerance was
    below the achievable floor set by cancellation in the integrand; they
    are accepted at that floor.
    """

    value: np.ndarray
    error: np.ndarray
    n_intervals: int
    n_evaluations: int
    roundoff_limited: np.ndarray


def _qk15(f, centers, halves, out_shape):
    x = centers[:, None] + halves[:, None] * NODES[None, :]
    fx = np.asarray(f(x.ravel()))
    k = centers.shape[0]
    fx = fx.reshape((k, 15) + out_shape)
    if not np.all(np.isfinite(fx)):
        bad = x.ravel()[~np.isfinite(fx.reshape(k * 15, -1)).all(axis=1)]
        raise QuadratureError(f"integrand is not finite at t={bad[0]!r}")
    wk = KRONROD_WEIGHTS.reshape((1, 15) + (1,) * len(out_shape))
    wg = GAUSS_WEIGHTS.reshape((1, 15) + (1,) * len(out_shape))
    h = np.abs(halves).reshape((k,) + (1,) * len(out_shape))
    resk = (wk * fx).sum(axis=1)
    resg = (wg * fx).sum(axis=1)
    reskh = 0.5 * resk
    resabs = (wk * np.abs(fx)).sum(axis=1) * h
    resasc = (wk * np.abs(fx - reskh[:, None])).sum(axis=1) * h
    value = resk * h
    err = np.abs(resk - resg) * h
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    floor = 50.0 * _EPMACH * resabs
    err = np.where(resabs > _UFLOW / (50.0 * _EPMACH), np.maximum(floor, err), err)
    return value, err, floor


def integrate(f, lo, hi, *, epsabs=DEFAULT_EPSABS, epsrel=DEFAULT_EPSREL,
              limit=DEFAULT_LIMIT, vectorized=True):
    """Integrate ``f`` over the finite interval ``[lo, hi]``.

    Parameters
    ----------
    f : callable
        Maps a 1-D array of abscissae of length ``n`` to an array of shape
        ``(n,)`` or ``(n, *out_shape)``, real or complex.  With
        ``vectorized=False`` it is called once per abscissa instead.
    lo, hi : float
        Finite limits, ``lo < hi``.
    epsabs, epsrel : float
        Each output component ``j`` must satisfy
        ``error_j <= max(epsabs, epsrel * |value_j|)``.
    limit : int
        Maximum number of subintervals before giving up.

    Returns
    -------
    QuadResult

    Raises
    ------
    QuadratureError
        When the tolerance cannot be met within ``limit`` subintervals; the
        exception carries the worst component's estimate.
    """
    lo, hi = check_interval(lo, hi)
    if not vectorized:
        scalar_f = f

        def f(x):
            return np.array([scalar_f(xi) for xi in x])

    centers = np.array([0.5 * (lo + hi)])
    halves = np.array([0.5 * (hi - lo)])
    probe = np.asarray(f(np.array([centers[0]])))
    out_shape = probe.shape[1:]

    value, err, floor = _qk15(f, centers, halves, out_shape)
    n_eval = 15
    min_half = 64 * _EPMACH * max(abs(lo), abs(hi), hi - lo)

    while True:
        total = value.sum(axis=0)
        total_err = err.sum(axis=0)
        total_floor = floor.sum(axis=0)
        tol = np.maximum(epsabs, epsrel * np.abs(total))
        tol_eff = np.maximum(tol, 2.0 * total_floor)
        if np.all(total_err <= tol_eff):
            break
        k = centers.shape[0]
        ratio = (err / tol_eff).reshape(k, -1).max(axis=1)
        ratio[halves < min_half] = 0.0
        unconverged = (total_err > tol_eff).ravel()
        if k >= limit or not np.any(ratio > 0):
            worst = int(np.argmax(np.where(unconverged, (total_err / tol_eff).ravel(), -1)))
            raise QuadratureError(
                f"quadrature did not converge after {k} subintervals; "
                f"component {worst}: estimate {total.ravel()[worst]!r}, "
                f"error {total_err.ravel()[worst]:.3e}",
                worst_index=worst,
                estimate=total.ravel()[worst],
                error=float(total_err.ravel()[worst]),
            )
        n_split = min(max(1, k // 4), limit - k, int(np.count_nonzero(ratio > 0)))
        order = np.argsort(ratio)[::-1][:n_split]
        keep = np.setdiff1d(np.arange(k), order)
        new_h = 0.5 * halves[order]
        new_c = np.concatenate([centers[order] - new_h, centers[order] + new_h])
        new_h = np.concatenate([new_h, new_h])
        v_new, e_new, f_new = _qk15(f, new_c, new_h, out_shape)
        n_eval += 15 * new_c.shape[0]
        centers = np.concatenate([centers[keep], new_c])
        halves = np.concatenate([halves[keep], new_h])
        value = np.concatenate([value[keep], v_new])
        err = np.concatenate([err[keep], e_new])
        floor = np.concatenate([floor[keep], f_new])

    return QuadResult(
        value=total if out_shape else total[()],
        error=total_err if out_shape else total_err[()],
        n_intervals=int(centers.shape[0]),
        n_evaluations=n_eval,
        roundoff_limited=(2.0 * total_floor > tol),
    )
