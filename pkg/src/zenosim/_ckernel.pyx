# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=False
"""Compiled trajectory engine.

Operation-for-operation mirror of ``_pykernel``; that module's docstring is
the contract (state layout, draw schedule, arithmetic order).  Complex values
are carried as explicit (re, im) double pairs written out in the same order
CPython's complex arithmetic evaluates, and the build disables fused
multiply-add, so both kernels map one bit-generator state to bit-identical
outputs.  Any change here must be copied to ``_pykernel`` and vice versa.
"""

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport cos, exp, sin, sqrt
from numpy.random cimport bitgen_t

cdef const char *CAPSULE_NAME = "BitGenerator"


cdef struct ionstate:
    double a0r, a0i
    double amr, ami
    double a1r, a1i
    double apr, api


cdef struct elems:
    double r00, i00
    double r01, i01
    double r10, i10
    double r11, i11


cdef inline double next_u(bitgen_t *bg) noexcept:
    return bg.next_double(bg.state)


cdef inline void pulse_elements(double omega, double tau, double delta,
                                double phase, elems *e) noexcept:
    cdef double w, half, c, s, nx, ny, nz
    w = sqrt(omega * omega + delta * delta)
    if w == 0.0:
        e.r00 = 1.0; e.i00 = 0.0
        e.r01 = 0.0; e.i01 = 0.0
        e.r10 = 0.0; e.i10 = 0.0
        e.r11 = 1.0; e.i11 = 0.0
        return
    half = 0.5 * (w * tau)
    c = cos(half)
    s = sin(half)
    nx = omega * cos(phase) / w
    ny = omega * sin(phase) / w
    nz = delta / w
    e.r00 = c; e.i00 = s * nz
    e.r01 = s * ny; e.i01 = -(s * nx)
    e.r10 = -(s * ny); e.i10 = -(s * nx)
    e.r11 = c; e.i11 = -(s * nz)


cdef inline double flip_probability(double gamma, double duration) noexcept:
    return 0.5 * (1.0 - exp(-(gamma * duration)))


cdef inline void apply_pulse(elems *e, ionstate *st) noexcept:
    cdef double t1r, t1i, t2r, t2i, b0r, b0i, b1r, b1i
    t1r = e.r00 * st.a0r - e.i00 * st.a0i
    t1i = e.r00 * st.a0i + e.i00 * st.a0r
    t2r = e.r01 * st.a1r - e.i01 * st.a1i
    t2i = e.r01 * st.a1i + e.i01 * st.a1r
    b0r = t1r + t2r
    b0i = t1i + t2i
    t1r = e.r10 * st.a0r - e.i10 * st.a0i
    t1i = e.r10 * st.a0i + e.i10 * st.a0r
    t2r = e.r11 * st.a1r - e.i11 * st.a1i
    t2i = e.r11 * st.a1i + e.i11 * st.a1r
    b1r = t1r + t2r
    b1i = t1i + t2i
    st.a0r = b0r; st.a0i = b0i
    st.a1r = b1r; st.a1i = b1i


cdef inline int prepare_step(bitgen_t *bg, double f_prep, bint sink_zeeman,
                             ionstate *st) noexcept:
    cdef double u = next_u(bg)
    st.a0r = 0.0; st.a0i = 0.0
    st.amr = 0.0; st.ami = 0.0
    st.a1r = 0.0; st.a1i = 0.0
    st.apr = 0.0; st.api = 0.0
    if u < f_prep:
        if sink_zeeman:
            if u < 0.5 * f_prep:
                st.amr = 1.0
            else:
                st.apr = 1.0
        else:
            st.a1r = 1.0
        return 0
    st.a0r = 1.0
    return 1


cdef inline void dephase_step(bitgen_t *bg, double q, ionstate *st) noexcept:
    cdef double u = next_u(bg)
    if u < q:
        st.a1r = -st.a1r
        st.a1i = -st.a1i


cdef inline void precess(double pr, double pi, ionstate *st) noexcept:
    cdef double tr, ti
    tr = st.a1r * pr - st.a1i * pi
    ti = st.a1r * pi + st.a1i * pr
    st.a1r = tr
    st.a1i = ti


cdef inline int project_step(bitgen_t *bg, ionstate *st) noexcept:
    cdef double wm, w0, wp, pb, u, inv
    wm = st.amr * st.amr + st.ami * st.ami
    w0 = st.a1r * st.a1r + st.a1i * st.a1i
    wp = st.apr * st.apr + st.api * st.api
    pb = wm + w0 + wp
    u = next_u(bg)
    if u < pb:
        inv = 1.0 / sqrt(pb)
        st.amr = st.amr * inv; st.ami = st.ami * inv
        st.a1r = st.a1r * inv; st.a1i = st.a1i * inv
        st.apr = st.apr * inv; st.api = st.api * inv
        st.a0r = 0.0; st.a0i = 0.0
        return 1
    st.a0r = 1.0; st.a0i = 0.0
    st.amr = 0.0; st.ami = 0.0
    st.a1r = 0.0; st.a1i = 0.0
    st.apr = 0.0; st.api = 0.0
    return 0


cdef inline void zeeman_step(bitgen_t *bg, double eps_z, ionstate *st) noexcept:
    cdef double w0, u, mag
    w0 = st.a1r * st.a1r + st.a1i * st.a1i
    if w0 > 0.0:
        u = next_u(bg)
        if u < eps_z:
            if u < 0.5 * eps_z:
                mag = sqrt(st.amr * st.amr + st.ami * st.ami + w0)
                st.amr = mag; st.ami = 0.0
            else:
                mag = sqrt(st.apr * st.apr + st.api * st.api + w0)
                st.apr = mag; st.api = 0.0
            st.a1r = 0.0; st.a1i = 0.0


cdef inline long count_step(bitgen_t *bg, double lam) noexcept:
    cdef double u = next_u(bg)
    cdef long k = 0
    cdef double p = exp(-lam)
    cdef double f = p
    while u > f and p > 0.0:
        k += 1
        p = p * (lam / k)
        f = f + p
    return k


cdef inline long probe_block(bitgen_t *bg, double eps_z, double lam_on,
                             double lam_off, ionstate *st,
                             int *bright) noexcept:
    bright[0] = project_step(bg, st)
    if bright[0]:
        zeeman_step(bg, eps_z, st)
        return count_step(bg, lam_on)
    return count_step(bg, lam_off)


def zeno_trajectory(bitgen, long n_measurements, double omega, double tau,
                    double delta, double phase, double probe_duration,
                    double lam_on, double lam_off, long k_th,
                    double gamma_phi, double eps_z, double f_prep,
                    bint sink_zeeman, bint reprepare):
    cdef bitgen_t *bg = <bitgen_t *> PyCapsule_GetPointer(
        bitgen.capsule, CAPSULE_NAME)
    counts = np.empty(n_measurements, dtype=np.int64)
    bits = np.empty(n_measurements, dtype=np.int8)
    manifolds = np.empty(n_measurements, dtype=np.int8)
    cdef long[::1] counts_v = counts
    cdef signed char[::1] bits_v = bits
    cdef signed char[::1] manifolds_v = manifolds

    cdef elems e
    pulse_elements(omega, tau, delta, phase, &e)
    cdef double q_tau = flip_probability(gamma_phi, tau)
    cdef double q_probe = flip_probability(gamma_phi, probe_duration)

    cdef ionstate st
    cdef long i, k
    cdef int bright, bit, last_bit
    prepare_step(bg, f_prep, sink_zeeman, &st)
    last_bit = 0
    for i in range(n_measurements):
        if reprepare and i > 0 and last_bit == 1:
            prepare_step(bg, f_prep, sink_zeeman, &st)
        apply_pulse(&e, &st)
        dephase_step(bg, q_tau, &st)
        k = probe_block(bg, eps_z, lam_on, lam_off, &st, &bright)
        dephase_step(bg, q_probe, &st)
        bit = 1 if k >= k_th else 0
        counts_v[i] = k
        bits_v[i] = bit
        manifolds_v[i] = bright
        last_bit = bit
    return counts, bits, manifolds


def fractionated_series(bitgen, long n_pulses, double omega, double tau,
                        double delta, double phase, bint probe_intermediate,
                        double intermission, double probe_duration,
                        double lam_on, double lam_off, long k_th,
                        double gamma_phi, double eps_z, double f_prep,
                        bint sink_zeeman):
    cdef bitgen_t *bg = <bitgen_t *> PyCapsule_GetPointer(
        bitgen.capsule, CAPSULE_NAME)
    cdef long n_recorded = n_pulses if probe_intermediate else 1
    bits = np.empty(n_recorded, dtype=np.int8)
    cdef signed char[::1] bits_v = bits

    cdef elems e
    pulse_elements(omega, tau, delta, phase, &e)
    cdef double q_tau = flip_probability(gamma_phi, tau)
    cdef double q_probe = flip_probability(gamma_phi, probe_duration)
    cdef double q_int = flip_probability(gamma_phi, intermission)
    cdef double dt = delta * intermission
    cdef double pr = cos(dt)
    cdef double pi = -sin(dt)

    cdef ionstate st
    cdef long i, k, idx
    cdef int ok, bright
    ok = prepare_step(bg, f_prep, sink_zeeman, &st)
    idx = 0
    for i in range(n_pulses):
        apply_pulse(&e, &st)
        dephase_step(bg, q_tau, &st)
        if i == n_pulses - 1:
            k = probe_block(bg, eps_z, lam_on, lam_off, &st, &bright)
            dephase_step(bg, q_probe, &st)
            bits_v[idx] = 1 if k >= k_th else 0
        elif probe_intermediate:
            k = probe_block(bg, eps_z, lam_on, lam_off, &st, &bright)
            dephase_step(bg, q_int, &st)
            bits_v[idx] = 1 if k >= k_th else 0
            idx += 1
        else:
            precess(pr, pi, &st)
            dephase_step(bg, q_int, &st)
    return ok, bits


def rabi_scan_trajectory(bitgen, long n_steps, double tau_step, double omega,
                         double delta, double phase, double probe_duration,
                         double lam_on, double lam_off, long k_th,
                         double gamma_phi, double eps_z, double f_prep,
                         bint sink_zeeman):
    cdef bitgen_t *bg = <bitgen_t *> PyCapsule_GetPointer(
        bitgen.capsule, CAPSULE_NAME)
    bits = np.empty(n_steps, dtype=np.int8)
    cdef signed char[::1] bits_v = bits
    cdef double q_probe = flip_probability(gamma_phi, probe_duration)

    cdef elems e
    cdef ionstate st
    cdef long k, kc
    cdef int bright
    cdef double dur
    for k in range(1, n_steps + 1):
        dur = k * tau_step
        pulse_elements(omega, dur, delta, phase, &e)
        prepare_step(bg, f_prep, sink_zeeman, &st)
        apply_pulse(&e, &st)
        dephase_step(bg, flip_probability(gamma_phi, dur), &st)
        kc = probe_block(bg, eps_z, lam_on, lam_off, &st, &bright)
        dephase_step(bg, q_probe, &st)
        bits_v[k - 1] = 1 if kc >= k_th else 0
    return bits


def ramsey_scan_trajectory(bitgen, long n_steps, double gap_step, double omega,
                           double tau, double delta, double phase,
                           double probe_duration, double lam_on,
                           double lam_off, long k_th, double gamma_phi,
                           double eps_z, double f_prep, bint sink_zeeman):
    cdef bitgen_t *bg = <bitgen_t *> PyCapsule_GetPointer(
        bitgen.capsule, CAPSULE_NAME)
    bits = np.empty(n_steps, dtype=np.int8)
    cdef signed char[::1] bits_v = bits

    cdef elems e
    pulse_elements(omega, tau, delta, phase, &e)
    cdef double q_tau = flip_probability(gamma_phi, tau)
    cdef double q_probe = flip_probability(gamma_phi, probe_duration)

    cdef ionstate st
    cdef long k, kc
    cdef int bright
    cdef double gap, dt, pr, pi
    for k in range(1, n_steps + 1):
        prepare_step(bg, f_prep, sink_zeeman, &st)
        apply_pulse(&e, &st)
        dephase_step(bg, q_tau, &st)
        gap = k * gap_step
        dt = delta * gap
        pr = cos(dt)
        pi = -sin(dt)
        precess(pr, pi, &st)
        dephase_step(bg, flip_probability(gamma_phi, gap), &st)
        apply_pulse(&e, &st)
        dephase_step(bg, q_tau, &st)
        kc = probe_block(bg, eps_z, lam_on, lam_off, &st, &bright)
        dephase_step(bg, q_probe, &st)
        bits_v[k - 1] = 1 if kc >= k_th else 0
    return bits
