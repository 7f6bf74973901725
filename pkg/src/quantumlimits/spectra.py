"""Quadrature fluctuation spectra of the field entering the dark input port.

A spectrum here is the triple ``(S_pp, S_qq, S_pq)`` of amplitude, phase
and cross spectra, normalised so that vacuum is ``(1, 1, 0)``.  All spectra
are even in the analysis frequency; every evaluator works on ``|omega|``.

Sign convention for the squeezed family::

    S_pp = cosh 2r + sinh 2r cos 2theta
    S_qq = cosh 2r - sinh 2r cos 2theta
    S_pq = -sinh 2r sin 2theta

so ``theta = 0`` squeezes the phase quadrature (Caves' configuration with
``K = exp(2r)``).
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import ConfigError, ConstraintError, DomainError

EPS_FEAS = 1e-9


def squeeze_spectra(r, theta):
    """Spectra induced by squeeze factor ``r`` at angle ``theta``.

    Written in the form ``e^{-2r} cos^2 + e^{2r} sin^2`` rather than
    ``cosh - sinh`` so the squeezed quadrature keeps full relative precision
    at large ``r``.  ``theta = 0`` gives ``(e^{2r}, e^{-2r}, 0)``.
    """
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    em, ep = np.exp(-2.0 * r), np.exp(2.0 * r)
    c, s = np.cos(theta), np.sin(theta)
    spp = ep * c * c + em * s * s
    sqq = em * c * c + ep * s * s
    spq = -np.sinh(2.0 * r) * np.sin(2.0 * theta)
    return _unwrap(spp), _unwrap(sqq), _unwrap(spq)


def squeeze_params(spp, sqq, spq):
    """Invert :func:`squeeze_spectra` for a saturated triple.

    Returns ``(r, theta)`` with ``theta`` in ``[0, pi)``.  Triples above the
    Heisenberg bound are mapped through their determinant-normalised form.
    """
    spp = np.asarray(spp, dtype=float)
    sqq = np.asarray(sqq, dtype=float)
    spq = np.asarray(spq, dtype=float)
    det = spp * sqq - spq * spq
    # a saturated triple only reaches det = 1 up to rounding of spp*sqq
    pure = np.abs(det - 1.0) <= 8 * np.finfo(float).eps * np.abs(spp * sqq)
    scale = np.sqrt(np.where(pure | (det <= 0), 1.0, det))
    # sinh 2r cos 2theta = (spp - sqq)/2, sinh 2r sin 2theta = -spq
    x, y = 0.5 * (spp - sqq) / scale, -spq / scale
    r = 0.5 * np.arcsinh(np.hypot(x, y))
    theta = np.mod(0.5 * np.arctan2(y, x), np.pi)
    return _unwrap(r), _unwrap(theta)


def heisenberg_margin(spp, sqq, spq):
    """``S_pp S_qq - S_pq^2 - 1``.

    Non-negative for physical spectra; zero for minimum-uncertainty states.
    Accepts scalars or arrays.
    """
    spp = np.asarray(spp, dtype=float)
    sqq = np.asarray(sqq, dtype=float)
    spq = np.asarray(spq, dtype=float)
    return _unwrap(spp * sqq - spq * spq - 1.0)


def check_feasible(spp, sqq, spq, eps=EPS_FEAS, omega=None):
    """Raise :class:`ConstraintError` where the Heisenberg bound is violated.

    The tolerance is ``eps`` scaled by ``max(1, S_pp S_qq)``: strongly
    squeezed states cannot be represented closer than that in floating point.
    """
    margin = np.atleast_1d(heisenberg_margin(spp, sqq, spq))
    scale = np.maximum(1.0, np.abs(np.atleast_1d(spp) * np.atleast_1d(sqq)))
    bad = margin < -eps * scale
    positive = (np.atleast_1d(spp) > 0) & (np.atleast_1d(sqq) > 0)
    bad = bad | ~positive
    if np.any(bad):
        i = int(np.argmax(bad))
        where = ""
        if omega is not None:
            where = f" at omega={float(np.atleast_1d(omega)[i]):.6g}"
        raise ConstraintError(
            f"spectra violate the Heisenberg inequality{where}: "
            f"margin={float(margin[i]):.3e} (tolerance {eps:g})"
        )


class QuadratureSpectra:
    """Base for spectra models.  Subclasses implement ``_evaluate``."""

    kind = None

    def evaluate(self, omega):
        """Return ``(S_pp, S_qq, S_pq)`` at ``|omega|``."""
        w = np.abs(np.asarray(omega, dtype=float))
        if not np.all(np.isfinite(w)):
            raise DomainError("spectra evaluated at non-finite frequency")
        return self._evaluate(w)

    def breakpoints(self):
        """Frequencies where the model is not smooth (used by quadrature)."""
        return ()

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Vacuum(QuadratureSpectra):
    kind = "vacuum"

    def _evaluate(self, w):
        one = _unwrap(np.ones_like(w))
        return one, one, _unwrap(np.zeros_like(w))

    def to_dict(self):
        return {"type": self.kind}


@dataclass(frozen=True)
class StaticSqueezed(QuadratureSpectra):
    """Frequency-independent minimum-uncertainty squeezing."""

    r: float
    theta: float = 0.0
    kind = "static_squeezed"

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r >= 0):
            raise ConfigError(f"squeeze factor must be finite and >= 0, got {self.r}", "r")
        if not math.isfinite(self.theta):
            raise ConfigError("squeeze angle must be finite", "theta")

    @classmethod
    def from_factor(cls, K):
        """Caves' phase squeezing ``S_pp = K``, ``S_qq = 1/K``, ``S_pq = 0``.

        ``K < 1`` squeezes amplitude instead, represented by ``theta = pi/2``.
        """
        if not K > 0:
            raise ConfigError(f"squeeze factor K must be > 0, got {K}", "K")
        if K >= 1:
            return cls(0.5 * math.log(K), 0.0)
        return cls(-0.5 * math.log(K), 0.5 * math.pi)

    def _evaluate(self, w):
        spp, sqq, spq = squeeze_spectra(self.r, self.theta)
        full = np.ones_like(w)
        return _unwrap(spp * full), _unwrap(sqq * full), _unwrap(spq * full)

    def to_dict(self):
        return {"type": self.kind, "r": self.r, "theta": self.theta}


@dataclass(frozen=True)
class FrequencySqueezed(QuadratureSpectra):
    """Squeezing whose parameters vary with frequency.

    ``state`` maps an array of non-negative frequencies to ``(r, theta)``
    arrays.  Optimisers return this variant so the optimum can be fed back
    into :func:`quantumlimits.bandavg.filtered_noise` unchanged.
    """

    state: object = field(compare=False)
    label: str = ""
    kind = "frequency_squeezed"

    def _evaluate(self, w):
        r, theta = self.state(w)
        return squeeze_spectra(r, theta)

    def to_dict(self):
        raise ConfigError("frequency-dependent squeezing is not serialisable; "
                          "tabulate it first", "port_b")


@dataclass(frozen=True, eq=False)
class TabulatedSpectra(QuadratureSpectra):
    """Spectra sampled on a strictly increasing non-negative grid.

    Piecewise-linear in between, no extrapolation.
    """

    omega: np.ndarray
    spp: np.ndarray
    sqq: np.ndarray
    spq: np.ndarray
    kind = "tabulated"

    def __post_init__(self):
        arrays = {}
        for name in ("omega", "spp", "sqq", "spq"):
            a = np.array(getattr(self, name), dtype=float)
            if a.ndim != 1:
                raise ConfigError("must be a one-dimensional list", name)
            a.setflags(write=False)
            arrays[name] = a
            object.__setattr__(self, name, a)
        n = arrays["omega"].size
        if n < 2:
            raise ConfigError("need at least two grid points", "omega")
        for name in ("spp", "sqq", "spq"):
            if arrays[name].size != n:
                raise ConfigError(f"length {arrays[name].size} differs from omega ({n})", name)
        om = arrays["omega"]
        if om[0] < 0 or np.any(np.diff(om) <= 0):
            raise ConfigError("grid must be non-negative and strictly increasing", "omega")
        if not all(np.all(np.isfinite(a)) for a in arrays.values()):
            raise ConfigError("table contains non-finite values")
        if np.any(arrays["spp"] <= 0) or np.any(arrays["sqq"] <= 0):
            raise ConfigError("S_pp and S_qq must be positive")

    @property
    def range(self):
        return float(self.omega[0]), float(self.omega[-1])

    def _evaluate(self, w):
        lo, hi = self.range
        if np.any(w < lo) or np.any(w > hi):
            raise DomainError(
                f"|omega| outside tabulated range [{lo:g}, {hi:g}]")
        return (_unwrap(np.interp(w, self.omega, self.spp)),
                _unwrap(np.interp(w, self.omega, self.sqq)),
                _unwrap(np.interp(w, self.omega, self.spq)))

    def breakpoints(self):
        return tuple(self.omega.tolist())

    def to_dict(self):
        return {"type": self.kind, "omega": self.omega.tolist(),
                "spp": self.spp.tolist(), "sqq": self.sqq.tolist(),
                "spq": self.spq.tolist()}


def evaluate(spectra, omega):
    return spectra.evaluate(omega)


def spectra_from_dict(cfg, path="port_b"):
    if not isinstance(cfg, dict) or "type" not in cfg:
        raise ConfigError("expected an object with a 'type' field", path)
    kind = cfg["type"]
    try:
        if kind == "vacuum":
            return Vacuum()
        if kind == "static_squeezed":
            if "K" in cfg:
                return StaticSqueezed.from_factor(float(cfg["K"]))
            return StaticSqueezed(float(cfg["r"]), float(cfg.get("theta", 0.0)))
        if kind == "tabulated":
            return TabulatedSpectra(cfg["omega"], cfg["spp"], cfg["sqq"], cfg["spq"])
    except KeyError as exc:
        raise ConfigError(f"missing field {exc.args[0]!r}", path) from None
    except ConfigError as exc:
        raise ConfigError(str(exc), path) from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), path) from None
    raise ConfigError(f"unknown spectra type {kind!r}", f"{path}.type")


def _unwrap(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a
