"""Instantaneous spectrum of the sweep Hamiltonian and minimum-gap search.

Eigenvalues come from the closed-form trigonometric solution of the
characteristic cubic, which keeps them exactly invariant under phase triples
with the same combination phi12 + phi23 - phi13.  The minimum gap between
the two highest (or two lowest) levels over [-T, T] is located by a uniform
scan followed by golden-section refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ComplexMatrix3, SystemParams, char_poly_coeffs

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2

# Refinement target for the bracket length: |b - a| * kappa <= KT_RESOLUTION.
KT_RESOLUTION = 1e-8
# Gaps below this are indistinguishable from a true crossing at the above
# resolution (transversal slope <= 2*kappa) and are reported as exactly 0.
ZERO_GAP_SNAP = 5e-8

DEFAULT_SCAN_POINTS = 4001


@dataclass
class SpectrumPoint:
    """Sorted instantaneous eigenvalues at one time, eps1 >= eps2 >= eps3."""

    t: float
    eps1: float
    eps2: float
    eps3: float


@dataclass
class GapResult:
    """Minimum gap over the sweep window.

    gap    : min of the level separation, >= 0 (0 for a true crossing)
    t_min  : minimizing time in [-T, T] (smallest such time on ties)
    margin : gap / sqrt(kappa), the adiabaticity figure of merit
    """

    gap: float
    t_min: float
    margin: float


def _cubic_roots_descending(c2, c1, c0):
    """Real roots of x^3 + c2 x^2 + c1 x + c0, descending order.

    Assumes all roots real (Hermitian input).  Inputs broadcast; returns
    three arrays (or scalars).  A single Newton polish sharpens each root.
    """
    c2 = np.asarray(c2, dtype=float)
    c1 = np.asarray(c1, dtype=float)
    c0 = np.asarray(c0, dtype=float)
    p = c1 - c2 * c2 / 3.0
    q = c0 - c2 * c1 / 3.0 + 2.0 * c2**3 / 27.0
    m = np.sqrt(np.maximum(-p / 3.0, 0.0))
    denom = 2.0 * m**3
    safe = denom > 0.0
    arg = np.where(safe, -q / np.where(safe, denom, 1.0), 1.0)
    arg = np.clip(arg, -1.0, 1.0)
    phi = np.arccos(arg) / 3.0
    shift = -c2 / 3.0
    roots = []
    for k in range(3):
        x = shift + 2.0 * m * np.cos(phi - 2.0 * math.pi * k / 3.0)
        # one Newton step on the monic cubic; skipped near multiple roots
        f = ((x + c2) * x + c1) * x + c0
        df = (3.0 * x + 2.0 * c2) * x + c1
        ok = np.abs(df) > 1e-30
        x = np.where(ok, x - f / np.where(ok, df, 1.0), x)
        roots.append(x)
    e1, e2, e3 = roots
    # polish can reorder nearly degenerate roots; restore descending order
    lo = np.minimum(np.minimum(e1, e2), e3)
    hi = np.maximum(np.maximum(e1, e2), e3)
    mid = e1 + e2 + e3 - lo - hi
    if hi.ndim == 0:
        return float(hi), float(mid), float(lo)
    return hi, mid, lo


def eigenvalues_sorted(matrix: ComplexMatrix3):
    """Eigenvalues of a Hermitian 3x3 matrix, descending.

    Uses the closed-form trigonometric solution of the characteristic cubic.
    Rejects input whose hermitian tag is unset or whose entries are not
    Hermitian to within 1e-12 relative.
    """
    if not matrix.hermitian:
        raise ValueError("eigenvalues_sorted requires a Hermitian matrix")
    m = matrix.data
    scale = max(1.0, float(np.abs(m).max()))
    if float(np.abs(m - m.conj().T).max()) > 1e-12 * scale:
        raise ValueError("matrix tagged hermitian but entries are not")
    d0 = m[0, 0].real
    d1 = m[1, 1].real
    d2 = m[2, 2].real
    a01 = abs(m[0, 1]) ** 2
    a02 = abs(m[0, 2]) ** 2
    a12 = abs(m[1, 2]) ** 2
    c2 = -(d0 + d1 + d2)
    c1 = d0 * d1 + d0 * d2 + d1 * d2 - a01 - a02 - a12
    det = (
        d0 * (d1 * d2 - a12)
        - (m[0, 1] * (np.conj(m[0, 1]) * d2 - m[1, 2] * np.conj(m[0, 2]))).real
        + (m[0, 2] * (np.conj(m[0, 1]) * np.conj(m[1, 2]) - d1 * np.conj(m[0, 2]))).real
    )
    c0 = -det
    return _cubic_roots_descending(c2, c1, c0)


def model_eigenvalues(params: SystemParams, t):
    """Sorted eigenvalues of the sweep Hamiltonian; ``t`` scalar or array."""
    _, c2, c1, c0 = char_poly_coeffs(params, t)
    return _cubic_roots_descending(c2, c1, c0)


def spectrum_at(params: SystemParams, t: float) -> SpectrumPoint:
    """The sorted instantaneous spectrum at one time."""
    e1, e2, e3 = model_eigenvalues(params, t)
    return SpectrumPoint(t=float(t), eps1=e1, eps2=e2, eps3=e3)


def gap_top(params: SystemParams, t: float) -> float:
    """Separation eps1 - eps2 of the two highest levels at time t."""
    e1, e2, _ = model_eigenvalues(params, t)
    return float(e1 - e2)


def _gap_bottom(params: SystemParams, t: float) -> float:
    _, e2, e3 = model_eigenvalues(params, t)
    return float(e2 - e3)


def _golden_minimize(f, a: float, b: float, tol: float):
    """Golden-section search for the minimum of f on [a, b].

    Returns (t_best, f_best) among all evaluated points, then the midpoint
    of the final bracket if it does better.
    """
    if b <= a:
        return a, f(a)
    h = b - a
    n = max(1, int(math.ceil(math.log(tol / h) / math.log(_INV_PHI)))) if h > tol else 1
    c = a + _INV_PHI_SQ * h
    d = a + _INV_PHI * h
    yc = f(c)
    yd = f(d)
    best_t, best_y = (c, yc) if yc <= yd else (d, yd)
    for _ in range(n - 1):
        if yc < yd:
            b, d, yd = d, c, yc
            h *= _INV_PHI
            c = a + _INV_PHI_SQ * h
            yc = f(c)
            if yc < best_y:
                best_t, best_y = c, yc
        else:
            a, c, yc = c, d, yd
            h *= _INV_PHI
            d = a + _INV_PHI * h
            yd = f(d)
            if yd < best_y:
                best_t, best_y = d, yd
    mid = 0.5 * (a + b)
    ymid = f(mid)
    if ymid < best_y:
        best_t, best_y = mid, ymid
    return best_t, best_y


def _min_gap_generic(params: SystemParams, which: str, scan_points: int) -> GapResult:
    T = params.horizon
    ts = np.linspace(-T, T, scan_points)
    e1, e2, e3 = model_eigenvalues(params, ts)
    gaps = (e1 - e2) if which == "top" else (e2 - e3)
    i = int(np.argmin(gaps))  # first minimum = smallest t on ties
    a = ts[max(i - 1, 0)]
    b = ts[min(i + 1, scan_points - 1)]
    f = (lambda t: gap_top(params, t)) if which == "top" else (lambda t: _gap_bottom(params, t))
    t_best, g_best = _golden_minimize(f, float(a), float(b), KT_RESOLUTION / params.kappa)
    if gaps[i] < g_best:
        t_best, g_best = float(ts[i]), float(gaps[i])
    if g_best < ZERO_GAP_SNAP:
        g_best = 0.0
    return GapResult(gap=g_best, t_min=t_best, margin=g_best / math.sqrt(params.kappa))


def min_gap(params: SystemParams, scan_points: int = DEFAULT_SCAN_POINTS) -> GapResult:
    """Global minimum of eps1 - eps2 over t in [-T, T].

    Uniform scan (default 4001 points) plus golden-section refinement of the
    best bracket down to a kappa-scaled time resolution of 1e-8.
    """
    return _min_gap_generic(params, "top", scan_points)


def min_gap_reverse(params: SystemParams, scan_points: int = DEFAULT_SCAN_POINTS) -> GapResult:
    """Global minimum of eps2 - eps3 over t in [-T, T].

    This is the figure of merit for running the transfer backwards (carrier
    on the lowest level); it equals min_gap of the parameter set with
    delta -> -delta and every coupling phase shifted by pi.
    """
    return _min_gap_generic(params, "bottom", scan_points)
