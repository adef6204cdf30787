# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implicit-midpoint stepping kernel.

Mirrors _midpoint_py.py operation for operation; keep the two in sync.
"""

from libc.math cimport sin, cos, sinh, cosh, fabs

GEOM_SPHERE = 0
GEOM_PSEUDOSPHERE = 1
GEOM_TORUS = 2

POT_ZERO = 0
POT_COSINE_WELL = 1
POT_HARMONIC = 2

STATUS_OK = 0
STATUS_POLE = 1
STATUS_REJECTED = 2

COMPILED = True


def integrate_midpoint(int geom, double R, double L, double M, double I, double sig,
                       int pot, double V0, z0, double dt, long steps, double tol,
                       int max_iters, double h_min, double[:, ::1] out):
    """Advance `steps` implicit-midpoint steps, writing rows of `out`.

    Same contract as the pure-Python kernel: out is (steps+1, 6) float64,
    returns (status, steps_done).
    """
    cdef double th = z0[0]
    cdef double ph = z0[1]
    cdef double ps = z0[2]
    cdef double pth = z0[3]
    cdef double pph = z0[4]
    cdef double pps = z0[5]
    cdef double MR2 = M * R * R
    cdef double sMI = sig * M / I
    cdef double half = 0.5 * dt
    cdef double ths, pths, tol_th, tol_pth, ths_new, pths_new
    cdef double h = 0.0, dh, c = 0.0, dc, h2, h3, dGpp, dGps, dGss, force
    cdef double dth_it, dpth_it, Gpp, Gps, Gss
    cdef long n
    cdef int it
    cdef bint converged

    out[0, 0] = th
    out[0, 1] = ph
    out[0, 2] = ps
    out[0, 3] = pth
    out[0, 4] = pph
    out[0, 5] = pps

    for n in range(steps):
        ths = th
        pths = pth
        tol_th = tol * (1.0 + fabs(th))
        tol_pth = tol * (1.0 + fabs(pth))
        converged = False
        for it in range(max_iters):
            ths_new = th + half * pths / MR2
            if geom == 0:
                h = R * sin(ths_new)
                dh = R * cos(ths_new)
                c = cos(ths_new)
                dc = -sin(ths_new)
            elif geom == 1:
                h = R * sinh(ths_new)
                dh = R * cosh(ths_new)
                c = cosh(ths_new)
                dc = sinh(ths_new)
            else:
                h = L + R * cos(ths_new)
                dh = -R * sin(ths_new)
                c = sin(ths_new)
                dc = cos(ths_new)
            if geom != 2 and h < h_min:
                return STATUS_POLE, n
            h2 = h * h
            h3 = h2 * h
            dGpp = -2.0 * dh / h3
            dGps = -dc / h2 + 2.0 * c * dh / h3
            dGss = 2.0 * c * dc / h2 - 2.0 * c * c * dh / h3
            force = -0.5 * (dGpp * pph * pph + 2.0 * dGps * pph * pps + dGss * pps * pps) / M
            if pot == 1:
                force -= V0 * sin(ths_new)
            elif pot == 2:
                force -= 2.0 * V0 * ths_new
            pths_new = pth + half * force
            dth_it = fabs(ths_new - ths)
            dpth_it = fabs(pths_new - pths)
            ths = ths_new
            pths = pths_new
            if dth_it <= tol_th and dpth_it <= tol_pth:
                converged = True
                break
        if not converged:
            return STATUS_REJECTED, n
        h2 = h * h
        Gpp = 1.0 / h2
        Gps = -c / h2
        Gss = sMI + c * c / h2
        ph += dt * (Gpp * pph + Gps * pps) / M
        ps += dt * (Gps * pph + Gss * pps) / M
        th = 2.0 * ths - th
        pth = 2.0 * pths - pth
        out[n + 1, 0] = th
        out[n + 1, 1] = ph
        out[n + 1, 2] = ps
        out[n + 1, 3] = pth
        out[n + 1, 4] = pph
        out[n + 1, 5] = pps

    return STATUS_OK, steps
