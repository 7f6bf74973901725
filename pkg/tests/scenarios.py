"""Seeded random scenario generators shared by the test modules (natural units)."""
from dataclasses import dataclass
import math

import numpy as np

from quantumlimits import (ConstantForce, DampedHarmonic, Delta, FreeMass, Gaussian,
                           LaserParams, Lorentzian, Rect, StaticSqueezed, Vacuum,
                           ZeroForce, signal_fidelity_check)


@dataclass(frozen=True)
class Case:
    laser: LaserParams
    mechanics: object
    filter: object
    port_b: object = Vacuum()
    extra_force: object = ZeroForce()


def log_uniform(rng, lo, hi):
    return float(10.0 ** rng.uniform(math.log10(lo), math.log10(hi)))


def random_mechanics(rng, omega_s=1.0, free_fraction=0.3):
    mass = log_uniform(rng, 0.3, 3.0)
    if rng.random() < free_fraction:
        return FreeMass(mass)
    return DampedHarmonic(mass, omega_s * rng.uniform(0.05, 2.0),
                          omega_s * log_uniform(rng, 1e-3, 0.3))


def random_filter(rng, mech, omega_s=1.0, kinds=("delta", "gaussian", "lorentzian", "rect"),
                  scale=(0.01, 0.1)):
    """A filter whose support keeps clear of the susceptibility poles."""
    kinds = [k for k in kinds if not (k == "lorentzian" and mech.poles())]
    kind = kinds[rng.integers(len(kinds))]
    width = omega_s * log_uniform(rng, *scale)
    if kind == "delta":
        return Delta(omega_s, width)
    if kind == "gaussian":
        return Gaussian(omega_s, width)
    if kind == "lorentzian":
        return Lorentzian(omega_s, 0.2 * width)
    return Rect(omega_s, width)


def random_laser(rng, intensity=None):
    return LaserParams.natural(k0=log_uniform(rng, 0.5, 2.0), intensity=intensity)


def random_case(rng, **kw):
    mech = random_mechanics(rng)
    return Case(random_laser(rng), mech, random_filter(rng, mech, **kw))


def fidelity_case(rng, free_fraction=0.3):
    """A scenario on which the signal-fidelity check passes.

    Mechanical frequencies sit at or below ``1e-3`` of the signal frequency
    and the band is narrow enough that the check's ``+-2B`` window stays inside
    the flat part of the response.
    """
    while True:
        omega_s = log_uniform(rng, 0.3, 3.0)
        mass = log_uniform(rng, 0.3, 3.0)
        if rng.random() < free_fraction:
            mech = FreeMass(mass)
        else:
            mech = DampedHarmonic(mass, omega_s * log_uniform(rng, 1e-6, 1e-3),
                                  omega_s * log_uniform(rng, 1e-6, 1e-3))
        f = random_filter(rng, mech, omega_s, kinds=("delta", "gaussian", "rect"),
                          scale=(1e-3, 0.05))
        if signal_fidelity_check(mech, omega_s, f.bandwidth()).passed:
            return Case(random_laser(rng), mech, f)


def random_port(rng):
    u = rng.random()
    if u < 0.3:
        return Vacuum()
    return StaticSqueezed(rng.uniform(0.0, 2.5), rng.uniform(0.0, math.pi))


def random_force(rng):
    if rng.random() < 0.5:
        return ZeroForce()
    return ConstantForce(log_uniform(rng, 1e-3, 10.0))
