"""Independent crossing approximation for the detuned three-level sweep.

A nonzero detuning splits the bare-level degeneracy into three pairwise
crossings.  Each is treated as an isolated two-level linear crossing with
transfer probability 1 - exp(-2*pi*Omega^2/slope); the composed estimate
follows the population path selected by the sign of the detuning, with an
exponential attenuation for the time spent on the decaying middle level.

The composition ignores corrections of order xi = max(Omega)/|delta|
(second-order couplings mediated by the far-detuned level), so it is only
meaningful for |delta| well above every coupling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import SystemParams

REGIME_NEGATIVE = "negative-delta"
REGIME_POSITIVE = "positive-delta"
REGIME_INVALID = "invalid"

# Marker pair for the simultaneous triple crossing at delta = 0.
TRIPLE_CROSSING = (1, 2, 3)

DEFAULT_VALIDITY_RATIO = 5.0


@dataclass
class CrossingEvent:
    """One pairwise bare-level crossing.

    pair           : the two levels involved (or the triple-crossing marker)
    time           : crossing instant, one of {delta/kappa, 0, -delta/kappa}
    relative_slope : |d(E_i - E_j)/dt|, 2*kappa for the outer (1,3) pair
                     and kappa otherwise
    coupling       : the direct coupling magnitude of the pair
    p_adiabatic    : isolated two-level transfer probability
    """

    pair: tuple
    time: float
    relative_slope: float
    coupling: float
    p_adiabatic: float


@dataclass
class IcaPrediction:
    """Composed transfer estimate with its validity bookkeeping."""

    p3: float
    perturbation_scale: float
    regime: str


def lz_probability(coupling: float, relative_slope: float) -> float:
    """Adiabatic transfer probability of an isolated two-level crossing.

    Standard linear-crossing result 1 - exp(-2*pi*coupling^2/slope) for
    bare energies separating at the given relative slope.
    """
    if coupling < 0.0:
        raise ValueError(f"coupling must be >= 0, got {coupling}")
    if relative_slope <= 0.0:
        raise ValueError(f"relative slope must be > 0, got {relative_slope}")
    return -math.expm1(-2.0 * math.pi * coupling * coupling / relative_slope)


def _event(params: SystemParams, pair, time: float) -> CrossingEvent:
    slope = 2.0 * params.kappa if pair in ((1, 3), TRIPLE_CROSSING) else params.kappa
    coupling = {
        (1, 2): params.omega12,
        (2, 3): params.omega23,
        (1, 3): params.omega13,
        TRIPLE_CROSSING: params.omega13,
    }[pair]
    return CrossingEvent(
        pair=pair,
        time=time,
        relative_slope=slope,
        coupling=coupling,
        p_adiabatic=lz_probability(coupling, slope),
    )


def crossing_schedule(params: SystemParams) -> list:
    """Ordered pairwise crossings selected by the sign of the detuning.

    delta < 0: (2,3) at delta/kappa, (1,3) at 0, (1,2) at -delta/kappa;
    delta > 0: the pair order reverses; delta = 0 collapses to a single
    triple-crossing marker at t = 0.
    """
    if params.delta == 0.0:
        return [_event(params, TRIPLE_CROSSING, 0.0)]
    tc = params.delta / params.kappa
    if params.delta < 0.0:
        return [
            _event(params, (2, 3), tc),
            _event(params, (1, 3), 0.0),
            _event(params, (1, 2), -tc),
        ]
    return [
        _event(params, (1, 2), -tc),
        _event(params, (1, 3), 0.0),
        _event(params, (2, 3), tc),
    ]


def ica_predict(
    params: SystemParams, validity_ratio: float = DEFAULT_VALIDITY_RATIO
) -> IcaPrediction:
    """Composed crossing-by-crossing estimate of the transfer efficiency.

    delta < 0: only the direct (1,3) crossing moves population; the other
    two act on empty states, and the middle level stays unpopulated, so the
    estimate is independent of its decay rate.

    delta > 0: the population rides the middle level between the first and
    last crossing and decays there, giving
    p12 * p23 * exp(-2*gamma2 * 2*delta/kappa).

    |delta| below ``validity_ratio`` times the largest coupling is tagged
    invalid: the crossings are no longer well separated and the estimate is
    not meaningful (the prediction value is still reported).
    """
    max_omega = params.max_coupling()
    scale = math.inf if params.delta == 0.0 else max_omega / abs(params.delta)
    if params.delta == 0.0:
        return IcaPrediction(p3=0.0, perturbation_scale=scale, regime=REGIME_INVALID)

    schedule = crossing_schedule(params)
    if params.delta < 0.0:
        p3 = schedule[1].p_adiabatic  # the (1,3) event
        regime = REGIME_NEGATIVE
    else:
        dwell = 2.0 * params.delta / params.kappa
        attenuation = math.exp(-2.0 * params.gamma2 * dwell)
        p3 = schedule[0].p_adiabatic * schedule[2].p_adiabatic * attenuation
        regime = REGIME_POSITIVE
    if abs(params.delta) < validity_ratio * max_omega:
        regime = REGIME_INVALID
    return IcaPrediction(p3=p3, perturbation_scale=scale, regime=regime)
