"""Pure-Python trajectory engine (reference implementation).

This module is the authority on the simulation's random-draw schedule.  The
compiled twin (``_ckernel``) mirrors every expression here operation for
operation; with fused multiply-add disabled at compile time the two produce
bit-identical results from the same bit-generator state.  Keep the two files
in sync: any change to arithmetic or draw order here must be copied there.

State convention
----------------
Four complex amplitudes over the levels, in fixed order:

    a0  ->  |F=0, m=0>   (dark state, the qubit ground level)
    am  ->  |F=1, m=-1>  (bright, decoupled from the drive)
    a1  ->  |F=1, m=0>   (bright, the driven qubit level)
    ap  ->  |F=1, m=+1>  (bright, decoupled from the drive)

Draw schedule (one ``random()`` call each unless stated otherwise)
------------------------------------------------------------------
prepare        1 draw.  Faulty when u < f_prep; with the Zeeman sink the
               faulty population lands in m=-1 when u < f_prep/2, else m=+1.
pulse          0 draws (unitary).
dephase(d)     1 draw, always, even when the flip probability is zero.
               Phase flip (a1 -> -a1) when u < (1 - exp(-gamma*d))/2, which
               makes the ensemble coherence decay as exp(-gamma*d).
precess(d)     0 draws (deterministic phase exp(-i*delta*d) on a1).
probe block    1 draw for the projection (bright when u < P_bright);
               if bright and the m=0 weight is still positive, 1 draw for the
               optical-pumping branch (pump when u < eps_z, to m=-1 when
               u < eps_z/2);
               1 draw for the photon count (Poisson CDF inversion).
               The protocol then applies dephase over the probe window, so a
               full probe block consumes 3 or 4 draws.

Every protocol composes exactly these primitives, so files produced by either
kernel from the same seed are byte-identical.
"""

from __future__ import annotations

from math import cos, exp, sin, sqrt

import numpy as np

CZERO = complex(0.0, 0.0)
CONE = complex(1.0, 0.0)


def pulse_elements(omega: float, tau: float, delta: float,
                   phase: float) -> tuple[complex, complex, complex, complex]:
    """2x2 propagator of one rectangular pulse on the (dark, m=0) pair.

    Returns (u00, u01, u10, u11) for the rotating-frame Hamiltonian
    (delta/2)*sigma_z + (omega/2)*(cos(phase)*sigma_x + sin(phase)*sigma_y)
    applied for a time tau, with sigma_z = diag(-1, +1) in the
    (dark, bright) ordering so a positive delta advances the phase of the
    m=0 amplitude as exp(-i*delta*t).
    """
    w = sqrt(omega * omega + delta * delta)
    if w == 0.0:
        return (CONE, CZERO, CZERO, CONE)
    half = 0.5 * (w * tau)
    c = cos(half)
    s = sin(half)
    nx = omega * cos(phase) / w
    ny = omega * sin(phase) / w
    nz = delta / w
    return (complex(c, s * nz),
            complex(s * ny, -(s * nx)),
            complex(-(s * ny), -(s * nx)),
            complex(c, -(s * nz)))


def flip_probability(gamma: float, duration: float) -> float:
    """Phase-flip probability giving ensemble coherence exp(-gamma*duration)."""
    return 0.5 * (1.0 - exp(-(gamma * duration)))


def poisson_from_uniform(u: float, lam: float) -> int:
    """Invert the Poisson CDF at u by sequential search.

    Shared by both kernels so that one uniform draw maps to the same count
    everywhere.  The loop also stops once the term underflows to zero, which
    bounds the search without a magic iteration cap.
    """
    k = 0
    p = exp(-lam)
    f = p
    while u > f and p > 0.0:
        k += 1
        p = p * (lam / k)
        f = f + p
    return k


def prepare_step(rng, f_prep: float, sink_zeeman: bool):
    """Draw the preparation outcome; returns (a0, am, a1, ap, prepared_ok)."""
    u = rng.random()
    if u < f_prep:
        if sink_zeeman:
            if u < 0.5 * f_prep:
                return (CZERO, CONE, CZERO, CZERO, 0)
            return (CZERO, CZERO, CZERO, CONE, 0)
        return (CZERO, CZERO, CONE, CZERO, 0)
    return (CONE, CZERO, CZERO, CZERO, 1)


def dephase_step(rng, a1: complex, q: float) -> complex:
    """Stochastic phase flip of the m=0 amplitude; always consumes one draw."""
    u = rng.random()
    if u < q:
        return -a1
    return a1


def project_step(rng, a0: complex, am: complex, a1: complex, ap: complex):
    """Projective bright/dark measurement; returns the collapsed state.

    Bright probability is accumulated over the three F=1 amplitudes in fixed
    order (m=-1, m=0, m=+1).  Returns (a0, am, a1, ap, bright).
    """
    wm = am.real * am.real + am.imag * am.imag
    w0 = a1.real * a1.real + a1.imag * a1.imag
    wp = ap.real * ap.real + ap.imag * ap.imag
    pb = wm + w0 + wp
    u = rng.random()
    if u < pb:
        inv = 1.0 / sqrt(pb)
        am = complex(am.real * inv, am.imag * inv)
        a1 = complex(a1.real * inv, a1.imag * inv)
        ap = complex(ap.real * inv, ap.imag * inv)
        return (CZERO, am, a1, ap, 1)
    return (CONE, CZERO, CZERO, CZERO, 0)


def zeeman_step(rng, am: complex, a1: complex, ap: complex, eps_z: float):
    """Optical pumping out of m=0 during a probe; draws only when it can act.

    Called for bright post-projection states.  When the m=0 weight is zero the
    branch is unreachable and no draw is consumed; otherwise one uniform
    decides pump/no-pump and the pumped sublevel in a single comparison pair.
    The pumped weight is merged into the target amplitude's magnitude (the
    sinks never return to the driven pair, so the relative phase is inert).
    """
    w0 = a1.real * a1.real + a1.imag * a1.imag
    if w0 > 0.0:
        u = rng.random()
        if u < eps_z:
            if u < 0.5 * eps_z:
                mag = sqrt(am.real * am.real + am.imag * am.imag + w0)
                return (complex(mag, 0.0), CZERO, ap)
            mag = sqrt(ap.real * ap.real + ap.imag * ap.imag + w0)
            return (am, CZERO, complex(mag, 0.0))
    return (am, a1, ap)


def count_step(rng, lam: float) -> int:
    """Photon count for one probe window: one uniform, inverted through CDF."""
    return poisson_from_uniform(rng.random(), lam)


def _probe(rng, a0, am, a1, ap, eps_z, lam_on, lam_off):
    """Projection + pumping + photon count; returns (state..., bright, k)."""
    a0, am, a1, ap, bright = project_step(rng, a0, am, a1, ap)
    if bright:
        am, a1, ap = zeeman_step(rng, am, a1, ap, eps_z)
        k = count_step(rng, lam_on)
    else:
        k = count_step(rng, lam_off)
    return a0, am, a1, ap, bright, k


def zeno_trajectory(bitgen, n_measurements, omega, tau, delta, phase,
                    probe_duration, lam_on, lam_off, k_th,
                    gamma_phi, eps_z, f_prep, sink_zeeman, reprepare):
    """Alternating drive/probe trajectory.

    Returns (photon_counts int64, classified_bits int8, true_manifolds int8),
    one entry per measurement.  With ``reprepare`` set, a fresh preparation
    draw precedes any pulse that follows an "on" classification.
    """
    rng = np.random.Generator(bitgen)
    counts = np.empty(n_measurements, dtype=np.int64)
    bits = np.empty(n_measurements, dtype=np.int8)
    manifolds = np.empty(n_measurements, dtype=np.int8)

    u00, u01, u10, u11 = pulse_elements(omega, tau, delta, phase)
    q_tau = flip_probability(gamma_phi, tau)
    q_probe = flip_probability(gamma_phi, probe_duration)

    a0, am, a1, ap, _ok = prepare_step(rng, f_prep, sink_zeeman)
    last_bit = 0
    for i in range(n_measurements):
        if reprepare and i > 0 and last_bit == 1:
            a0, am, a1, ap, _ok = prepare_step(rng, f_prep, sink_zeeman)
        b0 = u00 * a0 + u01 * a1
        b1 = u10 * a0 + u11 * a1
        a0 = b0
        a1 = b1
        a1 = dephase_step(rng, a1, q_tau)
        a0, am, a1, ap, bright, k = _probe(rng, a0, am, a1, ap,
                                           eps_z, lam_on, lam_off)
        a1 = dephase_step(rng, a1, q_probe)
        bit = 1 if k >= k_th else 0
        counts[i] = k
        bits[i] = bit
        manifolds[i] = bright
        last_bit = bit
    return counts, bits, manifolds


def fractionated_series(bitgen, n_pulses, omega, tau, delta, phase,
                        probe_intermediate, intermission, probe_duration,
                        lam_on, lam_off, k_th,
                        gamma_phi, eps_z, f_prep, sink_zeeman):
    """One preparation followed by n_pulses fractional pulses.

    With ``probe_intermediate`` the intermissions carry probe pulses (bits
    recorded for all n probes); otherwise the state evolves freely through
    the intermissions and only the final probe is recorded.  Returns
    (prepared_ok, bits int8).
    """
    rng = np.random.Generator(bitgen)
    n_recorded = n_pulses if probe_intermediate else 1
    bits = np.empty(n_recorded, dtype=np.int8)

    u00, u01, u10, u11 = pulse_elements(omega, tau, delta, phase)
    q_tau = flip_probability(gamma_phi, tau)
    q_probe = flip_probability(gamma_phi, probe_duration)
    q_int = flip_probability(gamma_phi, intermission)
    dt = delta * intermission
    pr = cos(dt)
    pi = -sin(dt)

    a0, am, a1, ap, ok = prepare_step(rng, f_prep, sink_zeeman)
    idx = 0
    for i in range(n_pulses):
        b0 = u00 * a0 + u01 * a1
        b1 = u10 * a0 + u11 * a1
        a0 = b0
        a1 = b1
        a1 = dephase_step(rng, a1, q_tau)
        if i == n_pulses - 1:
            a0, am, a1, ap, _bright, k = _probe(rng, a0, am, a1, ap,
                                                eps_z, lam_on, lam_off)
            a1 = dephase_step(rng, a1, q_probe)
            bits[idx] = 1 if k >= k_th else 0
        elif probe_intermediate:
            a0, am, a1, ap, _bright, k = _probe(rng, a0, am, a1, ap,
                                                eps_z, lam_on, lam_off)
            a1 = dephase_step(rng, a1, q_int)
            bits[idx] = 1 if k >= k_th else 0
            idx += 1
        else:
            a1 = complex(a1.real * pr - a1.imag * pi,
                         a1.real * pi + a1.imag * pr)
            a1 = dephase_step(rng, a1, q_int)
    return ok, bits


def rabi_scan_trajectory(bitgen, n_steps, tau_step, omega, delta, phase,
                         probe_duration, lam_on, lam_off, k_th,
                         gamma_phi, eps_z, f_prep, sink_zeeman):
    """Prepare/drive/probe with pulse length k*tau_step for k = 1..n_steps."""
    rng = np.random.Generator(bitgen)
    bits = np.empty(n_steps, dtype=np.int8)
    q_probe = flip_probability(gamma_phi, probe_duration)
    for k in range(1, n_steps + 1):
        dur = k * tau_step
        u00, u01, u10, u11 = pulse_elements(omega, dur, delta, phase)
        a0, am, a1, ap, _ok = prepare_step(rng, f_prep, sink_zeeman)
        b0 = u00 * a0 + u01 * a1
        b1 = u10 * a0 + u11 * a1
        a0 = b0
        a1 = b1
        a1 = dephase_step(rng, a1, flip_probability(gamma_phi, dur))
        a0, am, a1, ap, _bright, kc = _probe(rng, a0, am, a1, ap,
                                             eps_z, lam_on, lam_off)
        a1 = dephase_step(rng, a1, q_probe)
        bits[k - 1] = 1 if kc >= k_th else 0
    return bits


def ramsey_scan_trajectory(bitgen, n_steps, gap_step, omega, tau, delta, phase,
                           probe_duration, lam_on, lam_off, k_th,
                           gamma_phi, eps_z, f_prep, sink_zeeman):
    """Two fixed pulses separated by a free gap k*gap_step for k = 1..n_steps.

    The one physical detuning ``delta`` acts both inside the pulses (through
    the propagator) and across the gap (as free precession of the m=0
    amplitude).
    """
    rng = np.random.Generator(bitgen)
    bits = np.empty(n_steps, dtype=np.int8)
    u00, u01, u10, u11 = pulse_elements(omega, tau, delta, phase)
    q_tau = flip_probability(gamma_phi, tau)
    q_probe = flip_probability(gamma_phi, probe_duration)
    for k in range(1, n_steps + 1):
        a0, am, a1, ap, _ok = prepare_step(rng, f_prep, sink_zeeman)
        b0 = u00 * a0 + u01 * a1
        b1 = u10 * a0 + u11 * a1
        a0 = b0
        a1 = b1
        a1 = dephase_step(rng, a1, q_tau)
        gap = k * gap_step
        dt = delta * gap
        pr = cos(dt)
        pi = -sin(dt)
        a1 = complex(a1.real * pr - a1.imag * pi,
                     a1.real * pi + a1.imag * pr)
        a1 = dephase_step(rng, a1, flip_probability(gamma_phi, gap))
        b0 = u00 * a0 + u01 * a1
        b1 = u10 * a0 + u11 * a1
        a0 = b0
        a1 = b1
        a1 = dephase_step(rng, a1, q_tau)
        a0, am, a1, ap, _bright, kc = _probe(rng, a0, am, a1, ap,
                                             eps_z, lam_on, lam_off)
        a1 = dephase_step(rng, a1, q_probe)
        bits[k - 1] = 1 if kc >= k_th else 0
    return bits
