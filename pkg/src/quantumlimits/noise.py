"""Noise spectra of the position estimate.

Spectra are two-sided: a variance is ``integral dOmega/2pi S(Omega)`` over
the whole real line.  :func:`one_sided_asd` converts for plotting.

The estimate noise splits into four terms:

``pc``  photon counting, phase fluctuations of the dark-port field
``xc``  correlation between photon counting and radiation pressure
``rp``  radiation pressure, amplitude fluctuations moving the mirrors
``ef``  extra (non-quantum) force noise
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import ConfigError, DomainError
from .spectra import EPS_FEAS, check_feasible

HBAR_SI = 1.0545718e-34
C_SI = 299792458.0


@dataclass(frozen=True)
class LaserParams:
    """Carrier parameters.

    ``intensity`` is the mean photon flux (photons/s) entering the bright
    port; strategies that choose it themselves accept ``None``.
    """

    hbar: float
    omega0: float
    c: float
    intensity: float = None

    def __post_init__(self):
        for name in ("hbar", "omega0", "c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"must be finite and > 0, got {v!r}", name)
        if self.intensity is not None and not (math.isfinite(self.intensity)
                                               and self.intensity > 0):
            raise ConfigError(f"must be finite and > 0, got {self.intensity!r}",
                              "intensity")

    @classmethod
    def natural(cls, k0=1.0, intensity=None, hbar=1.0):
        """Natural units: ``c = 1`` so ``omega0 = k0``."""
        return cls(hbar, k0, 1.0, intensity)

    @classmethod
    def si(cls, omega0, intensity=None):
        return cls(HBAR_SI, omega0, C_SI, intensity)

    @property
    def k0(self):
        return self.omega0 / self.c

    def with_intensity(self, intensity):
        return LaserParams(self.hbar, self.omega0, self.c, intensity)

    def require_intensity(self):
        if self.intensity is None:
            raise ConfigError("laser intensity is required here", "laser.intensity")
        return self.intensity


class ExtraForceSpectrum:
    """Force noise ``S_ff(Omega)`` in N^2 s, even in ``Omega``."""

    kind = None

    def evaluate(self, omega):
        w = np.abs(np.asarray(omega, dtype=float))
        out = self._evaluate(w)
        return float(out) if out.ndim == 0 else out

    def breakpoints(self):
        return ()


@dataclass(frozen=True)
class ZeroForce(ExtraForceSpectrum):
    kind = "zero"

    def _evaluate(self, w):
        return np.zeros_like(w)

    def to_dict(self):
        return {"type": self.kind}


@dataclass(frozen=True)
class ConstantForce(ExtraForceSpectrum):
    value: float
    kind = "constant"

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value >= 0):
            raise ConfigError(f"must be finite and >= 0, got {self.value!r}", "value")

    def _evaluate(self, w):
        return np.full_like(w, self.value)

    def to_dict(self):
        return {"type": self.kind, "value": self.value}


@dataclass(frozen=True, eq=False)
class TabulatedForce(ExtraForceSpectrum):
    omega: np.ndarray
    sff: np.ndarray
    kind = "tabulated"

    def __post_init__(self):
        om = np.array(self.omega, dtype=float)
        sff = np.array(self.sff, dtype=float)
        if om.ndim != 1 or om.size < 2 or sff.shape != om.shape:
            raise ConfigError("omega and sff must be equal-length lists (>= 2 points)")
        if om[0] < 0 or np.any(np.diff(om) <= 0):
            raise ConfigError("grid must be non-negative and strictly increasing", "omega")
        if not (np.all(np.isfinite(sff)) and np.all(sff >= 0)):
            raise ConfigError("S_ff must be finite and >= 0", "sff")
        om.setflags(write=False)
        sff.setflags(write=False)
        object.__setattr__(self, "omega", om)
        object.__setattr__(self, "sff", sff)

    def _evaluate(self, w):
        lo, hi = self.omega[0], self.omega[-1]
        if np.any(w < lo) or np.any(w > hi):
            raise DomainError(f"|omega| outside tabulated range [{lo:g}, {hi:g}]")
        return np.interp(w, self.omega, self.sff)

    def breakpoints(self):
        return tuple(self.omega.tolist())

    def to_dict(self):
        return {"type": self.kind, "omega": self.omega.tolist(), "sff": self.sff.tolist()}


def force_from_dict(cfg, path="extra_force"):
    if cfg is None:
        return ZeroForce()
    if not isinstance(cfg, dict) or "type" not in cfg:
        raise ConfigError("expected an object with a 'type' field", path)
    kind = cfg["type"]
    try:
        if kind == "zero":
            return ZeroForce()
        if kind == "constant":
            return ConstantForce(float(cfg["value"]))
        if kind == "tabulated":
            return TabulatedForce(cfg["omega"], cfg["sff"])
    except KeyError as exc:
        raise ConfigError(f"missing field {exc.args[0]!r}", path) from None
    except ConfigError as exc:
        raise ConfigError(str(exc), path) from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), path) from None
    raise ConfigError(f"unknown extra force type {kind!r}", f"{path}.type")


@dataclass(frozen=True)
class NoiseBudget:
    """Per-frequency decomposition, all in m^2 s."""

    omega: np.ndarray
    pc: np.ndarray
    xc: np.ndarray
    rp: np.ndarray
    ef: np.ndarray

    @property
    def total(self):
        return self.pc + self.xc + self.rp + self.ef

    def rows(self):
        """Iterate ``(omega, pc, xc, rp, ef, total)`` tuples of floats."""
        cols = [np.atleast_1d(np.asarray(c, dtype=float))
                for c in (self.omega, self.pc, self.xc, self.rp, self.ef, self.total)]
        return zip(*(c.tolist() for c in cols))


def _budget(laser, mech, spectra, extra, omega, pc_gain, xc_gain, eps):
    intensity = laser.require_intensity()
    k0, hbar = laser.k0, laser.hbar
    w = np.asarray(omega, dtype=float)
    spp, sqq, spq = spectra.evaluate(w)
    check_feasible(spp, sqq, spq, eps=eps, omega=w)
    chi = np.asarray(mech.chi(w))
    chi2 = chi.real ** 2 + chi.imag ** 2
    sff = extra.evaluate(w)
    pc = sqq / (pc_gain * k0 ** 2 * intensity)
    xc = xc_gain * hbar * chi.real * spq
    rp = chi2 * 4.0 * hbar ** 2 * k0 ** 2 * intensity * spp
    ef = chi2 * sff
    return NoiseBudget(w, *(np.asarray(a, dtype=float) for a in (pc, xc, rp, ef)))


def interferometer_noise_spectrum(laser, mech, port_b, extra, omega, eps=EPS_FEAS):
    """Noise spectrum of the differential arm-length estimate.

    ``port_b`` are the spectra entering the dark port.  Raises
    :class:`~quantumlimits.errors.ConstraintError` if they are unphysical.
    """
    # delta s = dq/(2 k0 sqrt I) + chi 2 hbar k0 sqrt I dp + chi df;
    # squaring gives 1/(4 k0^2 I), cross 2 * (1/2)(2 hbar) chi_R = 2 hbar chi_R
    return _budget(laser, mech, port_b, extra, omega, 4.0, 2.0, eps)


def single_mirror_noise_spectrum(laser, mech, field, extra, omega, eps=EPS_FEAS):
    """Noise spectrum of the position estimate for one illuminated mirror.

    Reading the reflected phase at ``2 k0 z`` halves the shot-noise
    amplitude relative to the interferometer, so ``pc`` is four times
    smaller and the cross term half as large.
    """
    # delta z = dq/(4 k0 sqrt I) + chi 2 hbar k0 sqrt I dp + chi df;
    # cross term 2 * (1/(4 k0 sqrt I)) * (2 hbar k0 sqrt I) chi_R S_pq = hbar chi_R S_pq
    return _budget(laser, mech, field, extra, omega, 16.0, 1.0, eps)


def signal_transfer(mech, mass, omega):
    """Factor ``-M omega^2 chi(omega)`` multiplying the true signal."""
    w = np.asarray(omega, dtype=float)
    out = -mass * w * w * np.asarray(mech.chi(w))
    return complex(out) if np.ndim(out) == 0 else out


def linearized_intensity_phase(p_mean, dp=0.0, dq=0.0):
    """Photon flux and its fluctuations from quadrature amplitudes.

    Returns ``(I, dI, dphi)`` with ``I = <p>^2/4``, ``dI = sqrt(I) dp`` and
    ``dphi = dq / (2 sqrt(I))``.
    """
    if not p_mean > 0:
        raise DomainError(f"linearisation needs a positive mean amplitude, got {p_mean!r}")
    intensity = 0.25 * p_mean * p_mean
    root = math.sqrt(intensity)
    return intensity, root * dp, dq / (2.0 * root)


def one_sided_asd(s_two_sided):
    """Amplitude spectral density per sqrt(Hz) from a two-sided spectrum.

    With ``dOmega/2pi = df`` the one-sided PSD is twice the two-sided one.
    """
    return np.sqrt(2.0 * np.asarray(s_two_sided, dtype=float))
