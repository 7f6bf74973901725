"""Mechanical susceptibility of the mirrors.

``chi(omega)`` is the displacement per unit force at analysis frequency
``omega``; its real part is the reactive response and its imaginary part the
dissipative one.  Every model satisfies ``chi(-w) == conj(chi(w))``.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import ConfigError, DomainError, SingularityError

FIDELITY_GRID = 257


class Susceptibility:
    kind = None

    def chi(self, omega):
        """Complex response at ``omega`` (scalar or array)."""
        w = np.asarray(omega, dtype=float)
        if not np.all(np.isfinite(w)):
            raise DomainError("susceptibility evaluated at non-finite frequency")
        out = self._chi(w)
        return complex(out) if out.ndim == 0 else out

    def poles(self):
        """Real frequencies (>= 0) where ``chi`` diverges."""
        return ()

    def breakpoints(self):
        """Frequencies where ``chi`` varies sharply; hints for quadrature."""
        return ()

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class DampedHarmonic(Susceptibility):
    """``chi = 1 / (M (omega_m^2 - omega^2 - i gamma omega))``."""

    mass: float
    omega_m: float
    gamma: float
    kind = "damped_harmonic"

    def __post_init__(self):
        _positive(self.mass, "mass")
        _nonnegative(self.omega_m, "omega_m")
        _nonnegative(self.gamma, "gamma")

    def _chi(self, w):
        den = self.mass * ((self.omega_m ** 2 - w * w) - 1j * self.gamma * w)
        _raise_on_zero(den, w, self)
        return 1.0 / den

    def poles(self):
        if self.gamma == 0:
            return (self.omega_m,)
        if self.omega_m == 0:
            return (0.0,)
        return ()

    def breakpoints(self):
        if self.omega_m == 0:
            return ()
        pts = [self.omega_m]
        if self.gamma > 0:
            pts += [max(self.omega_m - self.gamma, 0.0), self.omega_m + self.gamma]
        return tuple(pts)

    def to_dict(self):
        return {"type": self.kind, "mass": self.mass,
                "omega_m": self.omega_m, "gamma": self.gamma}


@dataclass(frozen=True)
class FreeMass(Susceptibility):
    """Unbound mirror, ``chi = -1 / (M omega^2)``."""

    mass: float
    kind = "free_mass"

    def __post_init__(self):
        _positive(self.mass, "mass")

    def _chi(self, w):
        # same operation order as DampedHarmonic with omega_m = gamma = 0
        den = self.mass * -(w * w)
        _raise_on_zero(den, w, self)
        return (1.0 / den).astype(complex)

    def poles(self):
        return (0.0,)

    def to_dict(self):
        return {"type": self.kind, "mass": self.mass}


@dataclass(frozen=True, eq=False)
class TabulatedSusceptibility(Susceptibility):
    """Measured response on a non-negative frequency grid.

    Real and imaginary parts are interpolated linearly and independently;
    negative frequencies use the conjugate.  ``mass`` is the nominal mirror
    mass used for the signal transfer ``-M omega^2 chi``.
    """

    omega: np.ndarray
    chi_re: np.ndarray
    chi_im: np.ndarray
    mass: float
    kind = "tabulated"

    def __post_init__(self):
        _positive(self.mass, "mass")
        for name in ("omega", "chi_re", "chi_im"):
            a = np.array(getattr(self, name), dtype=float)
            if a.ndim != 1 or not np.all(np.isfinite(a)):
                raise ConfigError("must be a finite one-dimensional list", name)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.omega.size < 2:
            raise ConfigError("need at least two grid points", "omega")
        if self.chi_re.size != self.omega.size or self.chi_im.size != self.omega.size:
            raise ConfigError("chi_re/chi_im length differs from omega")
        if self.omega[0] < 0 or np.any(np.diff(self.omega) <= 0):
            raise ConfigError("grid must be non-negative and strictly increasing", "omega")

    def _chi(self, w):
        a = np.abs(w)
        lo, hi = self.omega[0], self.omega[-1]
        if np.any(a < lo) or np.any(a > hi):
            raise DomainError(f"|omega| outside tabulated range [{lo:g}, {hi:g}]")
        re = np.interp(a, self.omega, self.chi_re)
        im = np.sign(w) * np.interp(a, self.omega, self.chi_im)
        return re + 1j * im

    def breakpoints(self):
        return tuple(self.omega.tolist())

    def to_dict(self):
        return {"type": self.kind, "mass": self.mass, "omega": self.omega.tolist(),
                "chi_re": self.chi_re.tolist(), "chi_im": self.chi_im.tolist()}


def chi(s, omega):
    return s.chi(omega)


@dataclass(frozen=True)
class FidelityReport:
    max_deviation: float
    worst_omega: float
    tolerance: float
    passed: bool


def signal_fidelity_check(s, omega_s, bandwidth, tol=1e-2, n=FIDELITY_GRID):
    """Check ``-M omega^2 chi(omega) ~ 1`` across ``omega_s +- 2B``.

    The deviation ``|-M w^2 chi(w) - 1|`` is maximised over ``n`` uniformly
    spaced frequencies including both band edges.
    """
    if not (bandwidth > 0 and omega_s > 2 * bandwidth):
        raise DomainError(
            f"need omega_s > 2B > 0, got omega_s={omega_s:g}, B={bandwidth:g}")
    if n < 2:
        raise DomainError("fidelity grid needs at least two points")
    w = np.linspace(omega_s - 2 * bandwidth, omega_s + 2 * bandwidth, n)
    dev = np.abs(-s.mass * w * w * s.chi(w) - 1.0)
    i = int(np.argmax(dev))
    return FidelityReport(float(dev[i]), float(w[i]), tol, bool(dev[i] <= tol))


def recoil_damping_min(hbar, k0, intensity, mass):
    """Recoil damping floor ``hbar k0 I / M``.

    Implemented exactly as the textbook expression reads.  With ``I`` in
    photons per second the result is not a rate, so treat it as advisory.
    """
    for name, v in (("hbar", hbar), ("k0", k0), ("mass", mass)):
        _positive(v, name)
    _nonnegative(intensity, "intensity")
    return hbar * k0 * intensity / mass


def susceptibility_from_dict(cfg, path="mechanics"):
    if not isinstance(cfg, dict) or "type" not in cfg:
        raise ConfigError("expected an object with a 'type' field", path)
    kind = cfg["type"]
    try:
        if kind == "damped_harmonic":
            return DampedHarmonic(float(cfg["mass"]), float(cfg["omega_m"]),
                                  float(cfg["gamma"]))
        if kind == "free_mass":
            return FreeMass(float(cfg["mass"]))
        if kind == "tabulated":
            return TabulatedSusceptibility(cfg["omega"], cfg["chi_re"], cfg["chi_im"],
                                           float(cfg["mass"]))
    except KeyError as exc:
        raise ConfigError(f"missing field {exc.args[0]!r}", path) from None
    except ConfigError as exc:
        raise ConfigError(str(exc), path) from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), path) from None
    raise ConfigError(f"unknown susceptibility type {kind!r}", f"{path}.type")


def _raise_on_zero(den, w, s):
    # a subnormal denominator is as good as zero: 1/den overflows
    zero = np.abs(den) < np.finfo(float).tiny
    if np.any(zero):
        where = float(np.atleast_1d(w)[np.argmax(np.atleast_1d(zero))])
        raise SingularityError(f"{s.kind} susceptibility is singular at omega={where:g}",
                               omega=where)


def _positive(v, name):
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
        raise ConfigError(f"must be finite and > 0, got {v!r}", name)


def _nonnegative(v, name):
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
        raise ConfigError(f"must be finite and >= 0, got {v!r}", name)
