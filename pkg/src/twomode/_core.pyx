# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled fixed-step RK4 kernel for the two-mode equations of motion.

Arithmetic is written out on explicit real/imaginary doubles in exactly
the statement order of the pure-Python fallback (twomode._kernel_py) so
both backends produce bitwise-identical trajectories.
"""

import numpy as np


cdef inline void _deriv(double e_c, double e_x, double omega_r, double gamma_c,
                        double p, double g1, double g2,
                        double cr, double ci, double xr, double xi,
                        double* out) noexcept nogil:
    cdef double n2 = xr * xr + xi * xi
    cdef double ee = e_x + g1 * n2
    cdef double pe = p - g2 * n2
    cdef double hcr = e_c * cr + gamma_c * ci + omega_r * xr
    cdef double hci = e_c * ci - gamma_c * cr + omega_r * xi
    cdef double hxr = omega_r * cr + ee * xr - pe * xi
    cdef double hxi = omega_r * ci + ee * xi + pe * xr
    out[0] = hci
    out[1] = -hcr
    out[2] = hxi
    out[3] = -hxr


def rk4_propagate(double e_c, double e_x, double omega_r, double gamma_c,
                  double p, double g1, double g2,
                  double complex psi_c, double complex psi_x,
                  double dt, long n_steps, long stride, double overflow_limit):
    """Propagate (psi_c, psi_x) for n_steps of size dt, sampling every stride.

    Returns (out_c, out_x, n_filled, overflowed): complex sample arrays of
    length n_steps//stride + 1 (entry 0 is the initial state), the number
    of valid entries, and whether the overflow guard tripped.
    """
    cdef long n_samples = n_steps // stride + 1
    out_c_arr = np.empty(n_samples, dtype=np.complex128)
    out_x_arr = np.empty(n_samples, dtype=np.complex128)
    cdef double complex[::1] out_c = out_c_arr
    cdef double complex[::1] out_x = out_x_arr

    cdef double cr = psi_c.real
    cdef double ci = psi_c.imag
    cdef double xr = psi_x.real
    cdef double xi = psi_x.imag

    cdef double half = 0.5 * dt
    cdef double dt6 = dt / 6.0
    cdef double lim2 = overflow_limit * overflow_limit

    cdef double k1[4]
    cdef double k2[4]
    cdef double k3[4]
    cdef double k4[4]
    cdef double acr, aci, axr, axi
    cdef long i, j
    cdef bint overflowed = False

    out_c[0] = cr + 1j * ci
    out_x[0] = xr + 1j * xi
    j = 1

    for i in range(n_steps):
        _deriv(e_c, e_x, omega_r, gamma_c, p, g1, g2, cr, ci, xr, xi, k1)
        _deriv(e_c, e_x, omega_r, gamma_c, p, g1, g2,
               cr + half * k1[0], ci + half * k1[1],
               xr + half * k1[2], xi + half * k1[3], k2)
        _deriv(e_c, e_x, omega_r, gamma_c, p, g1, g2,
               cr + half * k2[0], ci + half * k2[1],
               xr + half * k2[2], xi + half * k2[3], k3)
        _deriv(e_c, e_x, omega_r, gamma_c, p, g1, g2,
               cr + dt * k3[0], ci + dt * k3[1],
               xr + dt * k3[2], xi + dt * k3[3], k4)
        acr = k1[0] + 2.0 * k2[0]
        acr = acr + 2.0 * k3[0]
        acr = acr + k4[0]
        aci = k1[1] + 2.0 * k2[1]
        aci = aci + 2.0 * k3[1]
        aci = aci + k4[1]
        axr = k1[2] + 2.0 * k2[2]
        axr = axr + 2.0 * k3[2]
        axr = axr + k4[2]
        axi = k1[3] + 2.0 * k2[3]
        axi = axi + 2.0 * k3[3]
        axi = axi + k4[3]
        cr = cr + dt6 * acr
        ci = ci + dt6 * aci
        xr = xr + dt6 * axr
        xi = xi + dt6 * axi
        if cr * cr + ci * ci > lim2 or xr * xr + xi * xi > lim2:
            overflowed = True
            break
        if (i + 1) % stride == 0:
            out_c[j] = cr + 1j * ci
            out_x[j] = xr + 1j * xi
            j += 1

    return out_c_arr, out_x_arr, j, overflowed
