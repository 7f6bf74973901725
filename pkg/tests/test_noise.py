import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quantumlimits import (ConfigError, ConstantForce, DampedHarmonic, DomainError, FreeMass,
                           LaserParams, StaticSqueezed, TabulatedForce,
                           TabulatedSusceptibility, Vacuum, ZeroForce,
                           interferometer_noise_spectrum, linearized_intensity_phase,
                           signal_transfer, single_mirror_noise_spectrum)
from quantumlimits.errors import ConstraintError
from quantumlimits.noise import HBAR_SI, force_from_dict, one_sided_asd

UNIT = LaserParams.natural(1.0, 1.0)


def rigid_minus_one():
    # chi = -1 + 0i at every frequency
    return TabulatedSusceptibility([0.0, 10.0], [-1.0, -1.0], [0.0, 0.0], 1.0)


def test_interferometer_hand_evaluation():
    nb = interferometer_noise_spectrum(UNIT, rigid_minus_one(), Vacuum(), ZeroForce(), 1.0)
    assert (float(nb.pc), float(nb.xc), float(nb.rp), float(nb.ef)) == (0.25, 0.0, 4.0, 0.0)
    assert float(nb.total) == 4.25


@given(st.floats(0.1, 3.0), st.floats(0.0, math.pi), st.floats(0.1, 5.0),
       st.floats(0.2, 3.0), st.floats(0.0, 2.0), st.floats(0.0, 0.5), st.floats(0.0, 1.0))
def test_interferometer_matches_scalar_evaluation(I, theta, k0, w, om, g, sff):
    if om == w and g == 0:
        return
    laser = LaserParams.natural(k0, I, hbar=0.7)
    mech = DampedHarmonic(1.3, om, g)
    port = StaticSqueezed(0.4, theta)
    nb = interferometer_noise_spectrum(laser, mech, port, ConstantForce(sff), w)
    spp, sqq, spq = port.evaluate(w)
    chi = 1.0 / (1.3 * (om ** 2 - w ** 2 - 1j * g * w))
    expected = (sqq / (4 * k0 ** 2 * I) + 2 * 0.7 * chi.real * spq
                + abs(chi) ** 2 * (4 * 0.7 ** 2 * k0 ** 2 * I * spp + sff))
    assert float(nb.total) == pytest.approx(expected, rel=1e-12)
    assert float(nb.pc + nb.xc + nb.rp + nb.ef) == pytest.approx(float(nb.total), rel=1e-12)
    assert nb.pc >= 0 and nb.rp >= 0 and nb.ef >= 0


def test_cross_term_vanishes_on_resonance():
    mech = DampedHarmonic(1.0, 1.0, 0.3)
    nb = interferometer_noise_spectrum(UNIT, mech, StaticSqueezed(1.0, 0.7), ZeroForce(), 1.0)
    assert abs(float(nb.xc)) < 1e-15


def test_vacuum_reduces_to_unsqueezed_form():
    mech = DampedHarmonic(2.0, 0.3, 0.05)
    laser = LaserParams.natural(1.5, 0.8)
    w = np.linspace(0.5, 2.0, 7)
    nb = interferometer_noise_spectrum(laser, mech, Vacuum(), ZeroForce(), w)
    chi2 = np.abs(mech.chi(w)) ** 2
    assert np.allclose(nb.total, 1 / (4 * 1.5 ** 2 * 0.8) + 4 * 1.5 ** 2 * 0.8 * chi2,
                       rtol=1e-14, atol=0)


def test_intensity_scaling_is_exact():
    mech, port, w = FreeMass(1.0), StaticSqueezed(0.3, 0.2), np.linspace(0.5, 3, 11)
    a = interferometer_noise_spectrum(LaserParams.natural(1.0, 0.5), mech, port,
                                      ConstantForce(0.3), w)
    b = interferometer_noise_spectrum(LaserParams.natural(1.0, 1.0), mech, port,
                                      ConstantForce(0.3), w)
    assert np.array_equal(b.pc * 2, a.pc)
    assert np.array_equal(b.rp, a.rp * 2)
    assert np.array_equal(a.ef, b.ef) and np.array_equal(a.xc, b.xc)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-2, 2))
def test_vacuum_noise_above_pointwise_bound(log_i, log_chi, phase):
    # a/I + b I >= 2 sqrt(ab) with equality at I = 1/(4 hbar k0^2 |chi|)
    chi = 10.0 ** log_chi * complex(math.cos(phase), math.sin(phase))
    mech = TabulatedSusceptibility([0.0, 2.0], [chi.real] * 2, [chi.imag] * 2, 1.0)
    nb = interferometer_noise_spectrum(LaserParams.natural(1.0, 10.0 ** log_i), mech,
                                       Vacuum(), ZeroForce(), 1.0)
    assert float(nb.total) >= 2 * abs(chi) * (1 - 1e-14)
    best = 1.0 / (4 * abs(chi))
    nb = interferometer_noise_spectrum(LaserParams.natural(1.0, best), mech, Vacuum(),
                                       ZeroForce(), 1.0)
    assert float(nb.total) == pytest.approx(2 * abs(chi), rel=1e-14)


def test_infeasible_port_is_rejected():
    from quantumlimits import TabulatedSpectra
    bad = TabulatedSpectra([0, 2], [1, 1], [1, 1], [0.5, 0.5])
    with pytest.raises(ConstraintError):
        interferometer_noise_spectrum(UNIT, FreeMass(1.0), bad, ZeroForce(), 1.0)


def test_singularity_propagates():
    from quantumlimits import SingularityError
    with pytest.raises(SingularityError):
        interferometer_noise_spectrum(UNIT, DampedHarmonic(1, 1, 0), Vacuum(), ZeroForce(), 1.0)


# Single mirror.  With the reflected phase 2 k0 z and linearised fields
#   dphi = dq / (2 sqrt I),  dI = sqrt(I) dp,
# the position estimate error has three parts
#   dz_pc = dphi / (2 k0)          = dq / (4 k0 sqrt I)
#   dz_rp = chi * 2 hbar k0 dI     = chi 2 hbar k0 sqrt(I) dp
#   dz_ef = chi df
# Squaring and taking spectra:
#   pc = S_qq / (16 k0^2 I)
#   rp = |chi|^2 4 hbar^2 k0^2 I S_pp
#   xc = 2 Re[conj(1/(4 k0 sqrt I)) chi 2 hbar k0 sqrt I] S_pq = hbar chi_R S_pq
#   ef = |chi|^2 S_ff
# which is the interferometer budget with pc four times and xc two times smaller.

def test_single_mirror_vacuum_real_chi():
    nb = single_mirror_noise_spectrum(UNIT, rigid_minus_one(), Vacuum(), ZeroForce(), 1.0)
    assert float(nb.pc) == 1.0 / 16.0
    assert float(nb.rp) == 4.0
    assert float(nb.xc) == 0.0


def test_single_mirror_cross_term_coefficient():
    port = StaticSqueezed(0.5, 0.3)
    mech = rigid_minus_one()
    single = single_mirror_noise_spectrum(UNIT, mech, port, ZeroForce(), 1.0)
    inter = interferometer_noise_spectrum(UNIT, mech, port, ZeroForce(), 1.0)
    spq = port.evaluate(1.0)[2]
    assert float(single.xc) == pytest.approx(1.0 * -1.0 * spq, rel=1e-15)
    assert float(single.xc) * 2 == pytest.approx(float(inter.xc), rel=1e-15)
    assert float(single.pc) * 4 == pytest.approx(float(inter.pc), rel=1e-15)


def test_single_mirror_limits():
    mech = FreeMass(1.0)
    pcs = [float(single_mirror_noise_spectrum(LaserParams.natural(1.0, I), mech, Vacuum(),
                                              ZeroForce(), 1.0).pc) for I in (1, 1e3, 1e6)]
    assert pcs[0] > pcs[1] > pcs[2] and pcs[2] < 1e-7
    rigid = TabulatedSusceptibility([0.0, 2.0], [0.0, 0.0], [0.0, 0.0], 1.0)
    nb = single_mirror_noise_spectrum(UNIT, rigid, Vacuum(), ZeroForce(), 1.0)
    assert float(nb.total) == float(nb.pc)


def test_signal_transfer():
    assert signal_transfer(FreeMass(3.0), 3.0, 0.7) == pytest.approx(1.0, rel=1e-15)
    assert signal_transfer(DampedHarmonic(1, 1, 0), 1.0, math.sqrt(2)) == pytest.approx(2.0)
    w = np.linspace(0.95, 1.05, 5)
    t = signal_transfer(DampedHarmonic(1, 1e-3, 1e-3), 1.0, w)
    assert np.all(np.abs(t - 1) < 1e-2)


def test_linearisation():
    assert linearized_intensity_phase(2.0) == (1.0, 0.0, 0.0)
    assert linearized_intensity_phase(2.0, dp=0.1)[1] == pytest.approx(0.1)
    assert linearized_intensity_phase(4.0, dq=0.2)[2] == pytest.approx(0.05)
    with pytest.raises(DomainError):
        linearized_intensity_phase(0.0)


def test_laser_params():
    laser = LaserParams.si(1.77e15)
    assert laser.hbar == HBAR_SI
    assert laser.k0 == pytest.approx(1.77e15 / 299792458.0, rel=1e-12)
    with pytest.raises(ConfigError, match="laser.intensity"):
        laser.require_intensity()
    with pytest.raises(ConfigError):
        LaserParams.natural(-1.0)
    assert laser.with_intensity(2.0).intensity == 2.0


def test_extra_force_variants():
    assert force_from_dict(None) == ZeroForce()
    t = force_from_dict({"type": "tabulated", "omega": [0, 2], "sff": [0, 4]})
    assert t.evaluate(-1.0) == 2.0
    with pytest.raises(DomainError):
        t.evaluate(3.0)
    with pytest.raises(ConfigError):
        force_from_dict({"type": "constant", "value": -1})
    assert force_from_dict({"type": "constant", "value": 2.5}).to_dict() == \
        {"type": "constant", "value": 2.5}
    assert isinstance(t, TabulatedForce)


def test_extra_force_is_independent_of_light():
    mech, w = DampedHarmonic(1.0, 0.2, 0.1), np.linspace(0.5, 2, 5)
    a = interferometer_noise_spectrum(LaserParams.natural(1, 0.1), mech, Vacuum(),
                                      ConstantForce(2.0), w)
    b = interferometer_noise_spectrum(LaserParams.natural(1, 9.0), mech,
                                      StaticSqueezed(1.2, 0.4), ConstantForce(2.0), w)
    assert np.array_equal(a.ef, b.ef)


def test_one_sided_density():
    assert one_sided_asd(2.0) == 2.0
