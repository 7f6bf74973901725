"""Detection filters, bandwidth and band averages.

A filter ``G(Omega)`` is even, with lobes at ``+-omega_s`` where it equals 1.
The bandwidth is defined by ``2B = integral dOmega/2pi G``, and the band
average of ``F`` is its mean under the distribution ``G / (4 pi B)``.  By
evenness all integrals are done on ``[0, inf)``.

Averages are computed on a :class:`BandRule`, a set of nodes and normalised
weights found by adaptive quadrature.  Quantities averaged through one rule
share nodes, so linear identities between them hold to rounding error.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.special import erf

from . import _core
from .errors import ConfigError, SingularityError
from .noise import interferometer_noise_spectrum
from .quadrature import MAX_EVALS, RTOL, adaptive_rule
from .spectra import EPS_FEAS

# Effective support ends where G drops below this fraction of its peak.
TRUNCATION = 1e-12


class BandFilter:
    kind = None
    code = -1

    def gain(self, omega):
        w = np.abs(np.asarray(omega, dtype=float))
        out = self._gain(w)
        return float(out) if out.ndim == 0 else out

    def support(self):
        """``(lo, hi)`` on the positive axis outside of which ``G`` is negligible."""
        h = self._half_support()
        return max(self.omega_s - h, 0.0), self.omega_s + h

    def breakpoints(self):
        return (self.omega_s,)

    @property
    def width(self):
        """The shape parameter passed to the compiled kernel."""
        raise NotImplementedError

    def _check(self, width_name):
        if not (math.isfinite(self.omega_s) and self.omega_s > 0):
            raise ConfigError("filters need two lobes at +-omega_s with omega_s > 0",
                              "omega_s")
        w = getattr(self, width_name)
        if not (math.isfinite(w) and w > 0):
            raise ConfigError(f"must be finite and > 0, got {w!r}", width_name)


@dataclass(frozen=True)
class Delta(BandFilter):
    """Narrow-band limit: averages collapse to ``F(omega_s)``.

    ``b_label`` is the bandwidth to use in ``delta_s2 = 2B * mean``.
    """

    omega_s: float
    b_label: float
    kind = "delta"

    def __post_init__(self):
        self._check("b_label")

    def _gain(self, w):
        return (w == self.omega_s).astype(float)

    def support(self):
        return self.omega_s, self.omega_s

    def bandwidth(self):
        return self.b_label

    def to_dict(self):
        return {"type": self.kind, "omega_s": self.omega_s, "b_label": self.b_label}


@dataclass(frozen=True)
class Gaussian(BandFilter):
    omega_s: float
    sigma: float
    kind = "gaussian"
    code = 0

    def __post_init__(self):
        self._check("sigma")

    @property
    def width(self):
        return self.sigma

    def _gain(self, w):
        return np.exp(-0.5 * ((w - self.omega_s) / self.sigma) ** 2)

    def _half_support(self):
        return self.sigma * math.sqrt(-2.0 * math.log(TRUNCATION))

    def breakpoints(self):
        s, c = self.sigma, self.omega_s
        return (c - 3 * s, c - s, c, c + s, c + 3 * s)

    def bandwidth(self):
        # integral_0^inf exp(-(x-c)^2/2s^2) dx = s sqrt(pi/2) (1 + erf(c/(s sqrt 2)))
        lobe = self.sigma * math.sqrt(0.5 * math.pi) * (
            1.0 + float(erf(self.omega_s / (self.sigma * math.sqrt(2.0)))))
        return lobe / (2.0 * math.pi)

    def to_dict(self):
        return {"type": self.kind, "omega_s": self.omega_s, "sigma": self.sigma}


@dataclass(frozen=True)
class Lorentzian(BandFilter):
    omega_s: float
    gamma: float
    kind = "lorentzian"
    code = 1

    def __post_init__(self):
        self._check("gamma")

    @property
    def width(self):
        return self.gamma

    def _gain(self, w):
        d = w - self.omega_s
        return self.gamma ** 2 / (d * d + self.gamma ** 2)

    def _half_support(self):
        return self.gamma * math.sqrt(1.0 / TRUNCATION - 1.0)

    def breakpoints(self):
        c, g = self.omega_s, self.gamma
        pts = [c]
        for k in range(6):
            pts += [c - g * 10.0 ** k, c + g * 10.0 ** k]
        return tuple(pts)

    def bandwidth(self):
        lobe = self.gamma * (0.5 * math.pi + math.atan(self.omega_s / self.gamma))
        return lobe / (2.0 * math.pi)

    def to_dict(self):
        return {"type": self.kind, "omega_s": self.omega_s, "gamma": self.gamma}


@dataclass(frozen=True)
class Rect(BandFilter):
    omega_s: float
    halfwidth: float
    kind = "rect"
    code = 2

    def __post_init__(self):
        self._check("halfwidth")

    @property
    def width(self):
        return self.halfwidth

    def _gain(self, w):
        return (np.abs(w - self.omega_s) <= self.halfwidth).astype(float)

    def _half_support(self):
        return self.halfwidth

    def bandwidth(self):
        lo, hi = self.support()
        return (hi - lo) / (2.0 * math.pi)

    def to_dict(self):
        return {"type": self.kind, "omega_s": self.omega_s, "halfwidth": self.halfwidth}


def filter_from_dict(cfg, path="filter"):
    if not isinstance(cfg, dict) or "type" not in cfg:
        raise ConfigError("expected an object with a 'type' field", path)
    kind = cfg["type"]
    classes = {"delta": (Delta, "b_label"), "gaussian": (Gaussian, "sigma"),
               "lorentzian": (Lorentzian, "gamma"), "rect": (Rect, "halfwidth")}
    if kind not in classes:
        raise ConfigError(f"unknown filter type {kind!r}", f"{path}.type")
    cls, width = classes[kind]
    try:
        return cls(float(cfg["omega_s"]), float(cfg[width]))
    except KeyError as exc:
        raise ConfigError(f"missing field {exc.args[0]!r}", path) from None
    except ConfigError as exc:
        raise ConfigError(str(exc), path) from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), path) from None


def bandwidth(f, method="closed", rtol=RTOL):
    """Detection bandwidth ``B``.

    ``method="quadrature"`` integrates the gain numerically instead of using
    the closed form (the Delta filter always returns its label).
    """
    if method == "closed" or isinstance(f, Delta):
        return f.bandwidth()
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    rule = adaptive_rule(lambda x: f.gain(x)[None, :], _edges(f), rtol)
    return float(rule.integrals[0]) / (2.0 * math.pi)


@dataclass(frozen=True)
class BandRule:
    """Nodes on ``[0, inf)`` with weights summing to one."""

    nodes: np.ndarray
    weights: np.ndarray
    bandwidth: float
    n_evals: int = 0

    def mean(self, values):
        return np.asarray(values, dtype=float) @ self.weights


def _edges(f, extra=()):
    lo, hi = f.support()
    pts = {lo, hi}
    pts.update(p for p in (*f.breakpoints(), *extra) if lo < p < hi)
    return np.array(sorted(pts))


def check_poles(f, poles):
    lo, hi = f.support()
    for p in poles:
        if lo <= p <= hi:
            raise SingularityError(
                f"integrand has a pole at omega={p:g} inside the filter support "
                f"[{lo:g}, {hi:g}]", omega=p)


def band_rule(f, probe, poles=(), breakpoints=(), rtol=RTOL, max_evals=MAX_EVALS):
    """Adapt a rule on ``G * probe`` and ``G``.

    ``probe`` maps frequencies to an array ``(k, n)`` (or ``(n,)``) of the
    functions that will be averaged on the rule.
    """
    if isinstance(f, Delta):
        return BandRule(np.array([f.omega_s]), np.array([1.0]), f.bandwidth(), 1)
    check_poles(f, poles)

    def integrand(x):
        g = f.gain(x)
        p = np.atleast_2d(probe(x))
        return np.vstack([g[None, :], g[None, :] * p])

    rule = adaptive_rule(integrand, _edges(f, breakpoints), rtol, max_evals)
    gw = rule.weights * f.gain(rule.nodes)
    return BandRule(rule.nodes, gw / gw.sum(), f.bandwidth(), rule.n_evals)


def band_average(f, F, poles=(), breakpoints=(), rtol=RTOL, max_evals=MAX_EVALS):
    """Mean of ``F`` under ``G / (4 pi B)``.

    ``F`` is vectorised over frequency and may return several components
    (shape ``(k, n)``), in which case a length-``k`` array is returned.
    Known poles of ``F`` must be listed; one inside the support raises
    :class:`SingularityError`.
    """
    if isinstance(f, Delta):
        check_poles(f, poles)
        out = np.asarray(F(np.array([f.omega_s])), dtype=float)
        return float(out[0]) if out.ndim == 1 else out[:, 0]
    rule = band_rule(f, F, poles, breakpoints, rtol, max_evals)
    out = rule.mean(F(rule.nodes))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class FilteredNoise:
    """Band-integrated noise.

    ``delta_s2`` is ``2B`` times the band average of the total spectrum;
    ``pc, xc, rp, ef`` are the separately averaged terms, whose sum
    ``delta_s2_terms`` must agree with it.
    """

    delta_s2: float
    pc: float
    xc: float
    rp: float
    ef: float
    bandwidth: float
    rule: BandRule

    @property
    def delta_s2_terms(self):
        return self.pc + self.xc + self.rp + self.ef


def filtered_noise(laser, mech, port_b, extra, f, rtol=RTOL, max_evals=MAX_EVALS,
                   eps=EPS_FEAS):
    intensity = laser.require_intensity()
    hbar, k0 = laser.hbar, laser.k0

    def components(x):
        spp, sqq, spq = port_b.evaluate(x)
        chi = np.asarray(mech.chi(x))
        chi2 = chi.real ** 2 + chi.imag ** 2
        sff = extra.evaluate(x)
        total = interferometer_noise_spectrum(laser, mech, port_b, extra, x, eps).total
        return np.vstack([np.broadcast_to(v, np.shape(x)) for v in
                          (sqq, chi.real * spq, chi2 * spp, chi2 * sff, total)])

    breaks = (*mech.breakpoints(), *port_b.breakpoints(), *extra.breakpoints())
    rule = band_rule(f, components, mech.poles(), breaks, rtol, max_evals)
    m_sqq, m_xs, m_ps, m_fs, m_total = rule.mean(components(rule.nodes))
    B = rule.bandwidth
    pc = 2 * B / (4 * k0 ** 2 * intensity) * m_sqq
    xc = 4 * B * hbar * m_xs
    rp = 8 * B * hbar ** 2 * k0 ** 2 * intensity * m_ps
    ef = 2 * B * m_fs
    return FilteredNoise(float(2 * B * m_total), float(pc), float(xc), float(rp),
                         float(ef), B, rule)


@dataclass(frozen=True)
class Moments:
    """Band averages of the susceptibility used by the optimisers."""

    chi_r: float
    chi_r2: float
    chi_i2: float
    abs_chi_i: float
    bandwidth: float
    n_evals: int = 0
    compiled: bool = False

    @property
    def chi2(self):
        """``mean(|chi|^2)``."""
        return self.chi_r2 + self.chi_i2

    @property
    def chi_variance(self):
        """``mean(|chi|^2) - mean(chi_R)^2``, non-negative up to rounding."""
        return (self.chi_r2 - self.chi_r * self.chi_r) + self.chi_i2


def band_moments(f, mech, rtol=RTOL, max_evals=MAX_EVALS, use_compiled=None):
    """Band averages of ``chi_R``, ``chi_R^2``, ``chi_I^2`` and ``|chi_I|``.

    Analytic filters with damped-harmonic or free-mass mirrors go through
    the compiled kernel when it is available (``use_compiled`` overrides);
    tabulated responses through the Python quadrature.
    """
    check_poles(f, mech.poles())
    if isinstance(f, Delta):
        chi = mech.chi(f.omega_s)
        return Moments(chi.real, chi.real ** 2, chi.imag ** 2, abs(chi.imag),
                       f.bandwidth(), 1, False)
    edges = _edges(f, mech.breakpoints())
    mech_code = _mech_code(mech)
    if use_compiled is None:
        use_compiled = _core.HAVE_COMPILED
    if mech_code is not None and f.code >= 0:
        impl = _core.compiled() if use_compiled else _core.fallback
        integrals, n_evals = impl.band_moments(
            f.code, f.omega_s, f.width, mech_code, mech.mass,
            getattr(mech, "omega_m", 0.0), getattr(mech, "gamma", 0.0),
            edges, rtol, max_evals)
        compiled = bool(use_compiled)
    else:
        def integrand(x):
            g = f.gain(x)
            chi = np.asarray(mech.chi(x))
            cr, ci = chi.real, chi.imag
            return np.vstack([g, g * cr, g * cr * cr, g * ci * ci, g * np.abs(ci)])

        rule = adaptive_rule(integrand, edges, rtol, max_evals)
        integrals, n_evals = rule.integrals, rule.n_evals
        compiled = False
    m = np.asarray(integrals[1:]) / integrals[0]
    return Moments(*(float(v) for v in m), f.bandwidth(), int(n_evals), compiled)


def _mech_code(mech):
    from .mechanics import DampedHarmonic, FreeMass
    if isinstance(mech, DampedHarmonic):
        return 0
    if isinstance(mech, FreeMass):
        return 1
    return None

