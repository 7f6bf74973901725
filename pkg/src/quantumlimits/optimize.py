"""Noise minimisation strategies.

All four strategies reduce to closed forms in the band moments of the
susceptibility:

``sql``            vacuum input, best laser intensity: ``4 B hbar sqrt(<|chi|^2>)``
``caves``          phase squeezing by ``K``: same noise at intensity ``I_sql / K``
``per_frequency``  correlated squeezing chosen at every frequency:
                   ``4 B hbar <|chi_I|>``
``broadband``      one correlated squeezed state for the whole band:
                   ``4 B hbar sqrt(<|chi|^2> - <chi_R>^2)``

The squeezing optimisers minimise ``A S_qq + C S_pq + D S_pp`` subject to
``S_pp S_qq - S_pq^2 >= 1``; the minimum ``sqrt(4AD - C^2)`` is reached on
the boundary.  When that needs more squeezing than ``r_max`` the infimum is
still reported, with ``attained=False`` and the value reachable at
``r_max`` alongside.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .bandavg import Delta, band_moments, band_rule
from .errors import NumericalError
from .quadrature import MAX_EVALS, RTOL
from .spectra import FrequencySqueezed, StaticSqueezed, Vacuum, squeeze_spectra

R_MAX = 12.0


@dataclass
class StrategyResult:
    strategy: str
    delta_s2_min: float
    attained: bool
    optimal_intensity: float
    equivalent_tau: float
    delta_s2_bounded: float
    squeeze_state: dict
    port_b: object = field(default=None, repr=False)
    diagnostics: list = field(default_factory=list)

    def to_dict(self):
        state = {k: (v.tolist() if isinstance(v, np.ndarray) else v)
                 for k, v in self.squeeze_state.items()}
        return {
            "strategy": self.strategy,
            "delta_s2_min": self.delta_s2_min,
            "attained": self.attained,
            "optimal_intensity": self.optimal_intensity,
            "equivalent_tau": self.equivalent_tau,
            "delta_s2_bounded": self.delta_s2_bounded,
            "squeeze_state": state,
            "diagnostics": list(self.diagnostics),
        }


def equivalent_tau(delta_s2, mass, hbar):
    """Time ``tau`` with ``delta_s2 = hbar tau / M``."""
    if not (mass > 0 and hbar > 0):
        raise NumericalError("mass and hbar must be positive")
    return mass * delta_s2 / hbar


def sql(laser, mech, f, rtol=RTOL, max_evals=MAX_EVALS):
    """Standard quantum limit: vacuum dark port, intensity optimised.

    Noise is ``a / I + b I`` with ``a = 2B/(4 k0^2)`` and
    ``b = 8 B hbar^2 k0^2 <|chi|^2>``, minimal at ``I = sqrt(a/b)``.
    """
    m = band_moments(f, mech, rtol, max_evals)
    chi2 = _require_finite_positive(m.chi2, "mean |chi|^2")
    hbar, k0 = laser.hbar, laser.k0
    delta = 4.0 * m.bandwidth * hbar * math.sqrt(chi2)
    intensity = 1.0 / (4.0 * hbar * k0 * k0 * math.sqrt(chi2))
    return StrategyResult(
        "sql", delta, True, intensity, equivalent_tau(delta, mech.mass, hbar), delta,
        {"spp": 1.0, "sqq": 1.0, "spq": 0.0, "r": 0.0, "theta": 0.0}, Vacuum())


def caves(laser, mech, f, K=1.0, rtol=RTOL, max_evals=MAX_EVALS):
    """Static phase squeezing ``S_pp = K, S_qq = 1/K``.

    Photon-counting noise drops by ``K`` and radiation pressure rises by
    ``K``, so the optimum moves to ``I_sql / K`` with unchanged noise.
    """
    if not (K > 0 and math.isfinite(K)):
        raise NumericalError(f"squeeze factor K must be finite and > 0, got {K!r}")
    base = sql(laser, mech, f, rtol, max_evals)
    port = StaticSqueezed.from_factor(K)
    return StrategyResult(
        "caves", base.delta_s2_min, True, base.optimal_intensity / K,
        base.equivalent_tau, base.delta_s2_min,
        {"spp": K, "sqq": 1.0 / K, "spq": 0.0, "r": port.r, "theta": port.theta,
         "K": K}, port)


def minimize_quadratic_form(A, C, D, root, r_max=R_MAX):
    """Minimise ``A S_qq + C S_pq + D S_pp`` over minimum-uncertainty states.

    ``root`` must be ``sqrt(4AD - C^2)``, supplied by the caller because it
    usually has a cancellation-free analytic form.  Vectorised.

    Returns ``(value, spp, sqq, spq, r, theta, attained)``.  Where the
    unconstrained optimum needs ``r > r_max`` (always when ``root == 0``),
    the state is clamped to ``r_max`` along the optimal axis and ``value``
    is what that state achieves.
    """
    A, C, D, root = np.broadcast_arrays(*(np.asarray(v, dtype=float)
                                          for v in (A, C, D, root)))
    # form matrix [[D, C/2], [C/2, A]] in (p, q); eigenvalues lam1 >= lam2
    lam1 = 0.5 * (A + D) + np.hypot(0.5 * (A - D), 0.5 * C)
    lam2 = 0.25 * root * root / lam1
    with np.errstate(divide="ignore"):
        # lam1 >= lam2 up to rounding; keep r out of negative round-off
        r_opt = np.maximum(0.25 * np.log(lam1 / lam2), 0.0)
    attained = r_opt <= r_max
    r = np.where(attained, r_opt, r_max)
    # the anti-squeezed quadrature lies along the lam2 eigenvector
    theta = np.mod(-(0.5 * np.arctan2(C, D - A) + 0.5 * np.pi), np.pi)
    spp, sqq, spq = (np.asarray(v) for v in squeeze_spectra(r, theta))
    with np.errstate(divide="ignore", invalid="ignore"):
        spq_opt = -C / root
        spp_opt = np.sqrt(A * (1.0 + spq_opt ** 2) / D)
        sqq_opt = (1.0 + spq_opt ** 2) / spp_opt
    spp = np.where(attained, spp_opt, spp)
    sqq = np.where(attained, sqq_opt, sqq)
    spq = np.where(attained, spq_opt, spq)
    bounded = lam1 * np.exp(-2.0 * r) + lam2 * np.exp(2.0 * r)
    value = np.where(attained, root, bounded)
    out = (value, spp, sqq, spq, r, theta, attained)
    if np.ndim(value) == 0:
        return tuple(float(v) for v in out[:-1]) + (bool(attained),)
    return out


def per_frequency_optimum(laser, mech, f, r_max=R_MAX, rtol=RTOL, max_evals=MAX_EVALS):
    """Correlated squeezing optimised independently at every frequency.

    At each frequency the minimum of the noise spectrum is ``2 hbar |chi_I|``
    whatever the intensity, so the band result is ``4 B hbar <|chi_I|>``.
    The optimum state is reported on the quadrature nodes and as a
    :class:`FrequencySqueezed` usable as ``port_b``.
    """
    intensity = laser.require_intensity()
    hbar, k0 = laser.hbar, laser.k0
    m = band_moments(f, mech, rtol, max_evals)
    B = m.bandwidth
    delta = 4.0 * B * hbar * m.abs_chi_i

    def pointwise(w):
        chi = np.asarray(mech.chi(w))
        A = np.full(np.shape(w), 1.0 / (4.0 * k0 * k0 * intensity))
        C = 2.0 * hbar * chi.real
        D = 4.0 * hbar ** 2 * k0 ** 2 * intensity * (chi.real ** 2 + chi.imag ** 2)
        return minimize_quadratic_form(A, C, D, 2.0 * hbar * np.abs(chi.imag), r_max)

    def state(w):
        _, _, _, _, r, theta, _ = pointwise(np.atleast_1d(w))
        return r.reshape(np.shape(w)), theta.reshape(np.shape(w))

    rule = band_rule(f, lambda w: pointwise(w)[0], mech.poles(), mech.breakpoints(),
                     rtol, max_evals)
    value, spp, sqq, spq, r, theta, ok = pointwise(rule.nodes)
    bounded = 2.0 * B * float(rule.mean(value))
    attained = bool(np.all(ok))
    diagnostics = []
    if m.abs_chi_i == 0.0:
        diagnostics.append("susceptibility is purely reactive over the band: the "
                           "bound is an infimum needing unbounded squeezing")
    elif not attained:
        diagnostics.append(f"optimum needs squeeze factor above r_max={r_max:g} at "
                           f"{int(np.sum(~ok))} of {ok.size} nodes")
    return StrategyResult(
        "per_frequency", delta, attained, intensity,
        equivalent_tau(delta, mech.mass, hbar), bounded,
        {"omega": rule.nodes, "spp": spp, "sqq": sqq, "spq": spq, "r": r,
         "theta": theta},
        FrequencySqueezed(state, "per_frequency_optimum"), diagnostics)


def broadband_optimum(laser, mech, f, r_max=R_MAX, rtol=RTOL, max_evals=MAX_EVALS):
    """Best single (frequency-independent) correlated squeezed state.

    Band-averaging turns the noise into ``A' S_qq + C' S_pq + D' S_pp`` with
    ``A' = 2B/(4 k0^2 I)``, ``C' = 4 B hbar <chi_R>`` and
    ``D' = 8 B hbar^2 k0^2 I <|chi|^2>``; the intensity cancels in
    ``4 A' D'`` so only the optimal state depends on it.
    """
    intensity = laser.require_intensity()
    hbar, k0 = laser.hbar, laser.k0
    m = band_moments(f, mech, rtol, max_evals)
    B = m.bandwidth
    var = m.chi_variance
    if not math.isfinite(var) or var < -1e-12 * m.chi2:
        raise NumericalError(
            f"band moments inconsistent: <|chi|^2> - <chi_R>^2 = {var:.3e} < 0")
    var = max(var, 0.0)
    A = 2.0 * B / (4.0 * k0 * k0 * intensity)
    C = 4.0 * B * hbar * m.chi_r
    D = 8.0 * B * hbar ** 2 * k0 ** 2 * intensity * m.chi2
    root = 4.0 * B * hbar * math.sqrt(var)
    # 4 A' D' carries no intensity dependence
    four_ad = 16.0 * B * B * hbar * hbar * m.chi2
    if not math.isclose(4.0 * A * D, four_ad, rel_tol=1e-12):
        raise NumericalError("intensity failed to cancel in the broadband optimum")
    value, spp, sqq, spq, r, theta, attained = minimize_quadratic_form(A, C, D, root,
                                                                      r_max)
    diagnostics = []
    if isinstance(f, Delta):
        diagnostics.append("delta filter: broadband and per-frequency optima coincide")
    if not attained:
        diagnostics.append(f"optimum needs squeeze factor above r_max={r_max:g}")
    return StrategyResult(
        "broadband", root, attained, intensity,
        equivalent_tau(root, mech.mass, hbar), value,
        {"spp": spp, "sqq": sqq, "spq": spq, "r": r, "theta": theta},
        StaticSqueezed(r, theta), diagnostics)


def _require_finite_positive(v, name):
    if not (math.isfinite(v) and v > 0):
        raise NumericalError(f"{name} must be finite and positive over the band, got {v!r}")
    return v
