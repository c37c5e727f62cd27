"""Pure-Python RK4 kernel, the import-time fallback for twomode._core.

Statement order mirrors the Cython kernel exactly (explicit real/imaginary
doubles, same parenthesisation) so results are bitwise identical.
"""

import numpy as np


def _deriv(e_c, e_x, omega_r, gamma_c, p, g1, g2, cr, ci, xr, xi):
    n2 = xr * xr + xi * xi
    ee = e_x + g1 * n2
    pe = p - g2 * n2
    hcr = e_c * cr + gamma_c * ci + omega_r * xr
    hci = e_c * ci - gamma_c * cr + omega_r * xi
    hxr = omega_r * cr + ee * xr - pe * xi
    hxi = omega_r * ci + ee * xi + pe * xr
    return hci, -hcr, hxi, -hxr


def rk4_propagate(e_c, e_x, omega_r, gamma_c, p, g1, g2,
                  psi_c, psi_x, dt, n_steps, stride, overflow_limit):
    """Same contract as twomode._core.rk4_propagate."""
    n_samples = n_steps // stride + 1
    out_c = np.empty(n_samples, dtype=np.complex128)
    out_x = np.empty(n_samples, dtype=np.complex128)

    cr = psi_c.real
    ci = psi_c.imag
    xr = psi_x.real
    xi = psi_x.imag

    half = 0.5 * dt
    dt6 = dt / 6.0
    lim2 = overflow_limit * overflow_limit
    deriv = _deriv

    out_c[0] = complex(cr, ci)
    out_x[0] = complex(xr, xi)
    j = 1
    overflowed = False

    for i in range(n_steps):
        k1 = deriv(e_c, e_x, omega_r, gamma_c, p, g1, g2, cr, ci, xr, xi)
        k2 = deriv(e_c, e_x, omega_r, gamma_c, p, g1, g2,
                   cr + half * k1[0], ci + half * k1[1],
                   xr + half * k1[2], xi + half * k1[3])
        k3 = deriv(e_c, e_x, omega_r, gamma_c, p, g1, g2,
                   cr + half * k2[0], ci + half * k2[1],
                   xr + half * k2[2], xi + half * k2[3])
        k4 = deriv(e_c, e_x, omega_r, gamma_c, p, g1, g2,
                   cr + dt * k3[0], ci + dt * k3[1],
                   xr + dt * k3[2], xi + dt * k3[3])
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
            out_c[j] = complex(cr, ci)
            out_x[j] = complex(xr, xi)
            j += 1

    return out_c, out_x, j, overflowed
