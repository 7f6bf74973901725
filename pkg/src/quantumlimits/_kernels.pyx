# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled band-moment kernel.

Integrates ``G * (1, chi_R, chi_R^2, chi_I^2, |chi_I|)`` with the same globally
adaptive Gauss-Kronrod scheme as ``quadrature.adaptive_rule``, but with the
filter and susceptibility evaluated inline instead of through Python calls.
"""
from libc.math cimport exp, fabs, isfinite
from libc.stdlib cimport malloc, realloc, free
import numpy as np

from .errors import QuadratureError
from .quadrature import NODES, KRONROD, GAUSS

DEF NCOMP = 5
DEF TINY = 1e-300

cdef double XK[15]
cdef double WK[15]
cdef double WG[15]
for _i in range(15):
    XK[_i] = NODES[_i]
    WK[_i] = KRONROD[_i]
    WG[_i] = GAUSS[_i]


cdef inline double _gain(int code, double c, double width, double x) nogil:
    cdef double d = fabs(x) - c
    if code == 0:
        return exp(-0.5 * (d / width) * (d / width))
    if code == 1:
        return width * width / (d * d + width * width)
    return 1.0 if fabs(d) <= width else 0.0


cdef inline void _eval(double* out, int fcode, double c, double width, int mcode,
                       double mass, double om, double gamma, double x) nogil:
    cdef double re, im, den, g, cr, ci
    g = _gain(fcode, c, width, x)
    if mcode == 0:
        re = mass * (om * om - x * x)
        im = -mass * gamma * x
    else:
        re = -mass * x * x
        im = 0.0
    den = re * re + im * im
    cr = re / den
    ci = -im / den
    out[0] = g
    out[1] = g * cr
    out[2] = g * cr * cr
    out[3] = g * ci * ci
    out[4] = g * fabs(ci)


cdef void _panel(double a, double b, double* k, double* e, double* s, int fcode,
                 double c, double width, int mcode, double mass, double om,
                 double gamma) nogil:
    cdef double mid = 0.5 * (a + b)
    cdef double h = 0.5 * (b - a)
    cdef double v[NCOMP]
    cdef double g[NCOMP]
    cdef int n, j
    for j in range(NCOMP):
        k[j] = 0.0
        g[j] = 0.0
        s[j] = 0.0
    for n in range(15):
        _eval(v, fcode, c, width, mcode, mass, om, gamma, mid + h * XK[n])
        for j in range(NCOMP):
            k[j] += WK[n] * v[j]
            g[j] += WG[n] * v[j]
            s[j] += WK[n] * fabs(v[j])
    for j in range(NCOMP):
        k[j] *= h
        s[j] *= h
        e[j] = fabs(k[j] - h * g[j])


cdef double* _grow(double* buf, Py_ssize_t n) except NULL:
    cdef double* out = <double*> realloc(buf, n * sizeof(double))
    if not out:
        raise MemoryError()
    return out


def band_moments(int filter_code, double omega_s, double width, int mech_code,
                 double mass, double omega_m, double gamma, edges, double rtol,
                 long max_evals):
    """Integrals of ``G * (1, chi_R, chi_R^2, chi_I^2, |chi_I|)`` and the evaluation count."""
    cdef double[:] ed = np.ascontiguousarray(edges, dtype=np.float64)
    cdef Py_ssize_t npan = ed.shape[0] - 1
    cdef Py_ssize_t cap = npan + 64
    cdef Py_ssize_t i, p, best
    cdef int j
    cdef long evals
    cdef double worst, ratio, a, b, m
    cdef double tot_k[NCOMP]
    cdef double tot_e[NCOMP]
    cdef double tot_s[NCOMP]
    cdef double tol[NCOMP]
    cdef bint done
    cdef double* lo
    cdef double* hi
    cdef double* K
    cdef double* E
    cdef double* S
    if npan < 1:
        raise ValueError("breakpoints must be strictly increasing, at least two")
    if filter_code not in (0, 1, 2) or mech_code not in (0, 1):
        raise ValueError("unknown filter or mechanics code")
    lo = <double*> malloc(cap * sizeof(double))
    hi = <double*> malloc(cap * sizeof(double))
    K = <double*> malloc(cap * NCOMP * sizeof(double))
    E = <double*> malloc(cap * NCOMP * sizeof(double))
    S = <double*> malloc(cap * NCOMP * sizeof(double))
    if not (lo and hi and K and E and S):
        free(lo); free(hi); free(K); free(E); free(S)
        raise MemoryError()
    try:
        for i in range(npan):
            lo[i] = ed[i]
            hi[i] = ed[i + 1]
            _panel(lo[i], hi[i], &K[i * NCOMP], &E[i * NCOMP], &S[i * NCOMP],
                   filter_code, omega_s, width, mech_code, mass, omega_m, gamma)
        evals = 15 * npan
        while True:
            for j in range(NCOMP):
                tot_k[j] = 0.0
                tot_e[j] = 0.0
                tot_s[j] = 0.0
            for i in range(npan):
                for j in range(NCOMP):
                    tot_k[j] += K[i * NCOMP + j]
                    tot_e[j] += E[i * NCOMP + j]
                    tot_s[j] += S[i * NCOMP + j]
            for j in range(NCOMP):
                if not (isfinite(tot_k[j]) and isfinite(tot_e[j])):
                    raise QuadratureError("integrand is not finite inside the band")
            done = True
            for j in range(NCOMP):
                tol[j] = rtol * tot_s[j]
                if tol[j] < TINY:
                    tol[j] = TINY
                if tot_e[j] > tol[j]:
                    done = False
            if done:
                break
            if evals + 30 > max_evals:
                worst = 0.0
                for j in range(NCOMP):
                    ratio = tot_e[j] / (tot_s[j] if tot_s[j] > TINY else TINY)
                    if ratio > worst:
                        worst = ratio
                raise QuadratureError(
                    f"quadrature did not converge in {evals} evaluations: achieved "
                    f"relative error {worst:.2e}, requested {rtol:.1e}", achieved=worst)
            best = 0
            worst = -1.0
            for i in range(npan):
                for j in range(NCOMP):
                    ratio = E[i * NCOMP + j] / tol[j]
                    if ratio > worst:
                        worst = ratio
                        best = i
            a = lo[best]
            b = hi[best]
            m = 0.5 * (a + b)
            if not (a < m < b):
                raise QuadratureError(f"panel [{a:.17g}, {b:.17g}] cannot be subdivided "
                                      "further")
            if npan + 1 > cap:
                cap = 2 * cap
                lo = _grow(lo, cap)
                hi = _grow(hi, cap)
                K = _grow(K, cap * NCOMP)
                E = _grow(E, cap * NCOMP)
                S = _grow(S, cap * NCOMP)
            # shift tail right by one to keep panels in order
            p = npan
            while p > best + 1:
                lo[p] = lo[p - 1]
                hi[p] = hi[p - 1]
                for j in range(NCOMP):
                    K[p * NCOMP + j] = K[(p - 1) * NCOMP + j]
                    E[p * NCOMP + j] = E[(p - 1) * NCOMP + j]
                    S[p * NCOMP + j] = S[(p - 1) * NCOMP + j]
                p -= 1
            npan += 1
            lo[best] = a
            hi[best] = m
            lo[best + 1] = m
            hi[best + 1] = b
            _panel(a, m, &K[best * NCOMP], &E[best * NCOMP], &S[best * NCOMP],
                   filter_code, omega_s, width, mech_code, mass, omega_m, gamma)
            _panel(m, b, &K[(best + 1) * NCOMP], &E[(best + 1) * NCOMP],
                   &S[(best + 1) * NCOMP], filter_code, omega_s, width, mech_code,
                   mass, omega_m, gamma)
            evals += 30
        return np.array([tot_k[j] for j in range(NCOMP)]), evals
    finally:
        free(lo)
        free(hi)
        free(K)
        free(E)
        free(S)
