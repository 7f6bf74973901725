"""Pure-Python band-moment kernel, used when the extension is not built.

Same contract and same partition logic as ``_kernels.pyx``.
"""
import numpy as np

from .quadrature import adaptive_rule

GAUSSIAN, LORENTZIAN, RECT = 0, 1, 2
DAMPED, FREE = 0, 1


def gain(filter_code, omega_s, width, x):
    d = np.abs(x) - omega_s
    if filter_code == GAUSSIAN:
        return np.exp(-0.5 * (d / width) ** 2)
    if filter_code == LORENTZIAN:
        return width * width / (d * d + width * width)
    if filter_code == RECT:
        return (np.abs(d) <= width).astype(float)
    raise ValueError(f"unknown filter code {filter_code}")


def chi(mech_code, mass, omega_m, gamma, x):
    if mech_code == DAMPED:
        re = mass * (omega_m * omega_m - x * x)
        im = -mass * gamma * x
    elif mech_code == FREE:
        re = -mass * x * x
        im = np.zeros_like(x)
    else:
        raise ValueError(f"unknown mechanics code {mech_code}")
    den = re * re + im * im
    return re / den, -im / den


def band_moments(filter_code, omega_s, width, mech_code, mass, omega_m, gamma,
                 edges, rtol, max_evals):
    """Integrals of ``G * (1, chi_R, chi_R^2, chi_I^2, |chi_I|)`` and the evaluation count."""

    def integrand(x):
        g = gain(filter_code, omega_s, width, x)
        cr, ci = chi(mech_code, mass, omega_m, gamma, x)
        return np.vstack([g, g * cr, g * cr * cr, g * ci * ci, g * np.abs(ci)])

    rule = adaptive_rule(integrand, edges, rtol, max_evals)
    return rule.integrals, rule.n_evals
