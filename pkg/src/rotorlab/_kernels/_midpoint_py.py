"""Pure-Python implicit-midpoint stepping kernel (fallback backend).

Mirrors _midpoint.pyx operation for operation so both backends produce
bit-compatible trajectories; keep the two files in sync.

State layout: z = (theta, phi, psi, p_theta, p_phi, p_psi).  Only theta and
p_theta enter the fixed-point solve (phi, psi are cyclic and their momenta
are exact invariants of the scheme); the cyclic angles are advanced with the
converged midpoint values.
"""

import math

GEOM_SPHERE = 0
GEOM_PSEUDOSPHERE = 1
GEOM_TORUS = 2

POT_ZERO = 0
POT_COSINE_WELL = 1
POT_HARMONIC = 2

STATUS_OK = 0
STATUS_POLE = 1
STATUS_REJECTED = 2

COMPILED = False


def integrate_midpoint(geom, R, L, M, I, sig, pot, V0, z0, dt, steps, tol, max_iters, h_min, out):
    """Advance `steps` implicit-midpoint steps, writing rows of `out`.

    out must be a float64 array of shape (steps+1, 6); row 0 receives z0.
    Returns (status, steps_done); on early termination rows 0..steps_done
    are valid.
    """
    sin, cos, sinh, cosh = math.sin, math.cos, math.sinh, math.cosh
    th = float(z0[0])
    ph = float(z0[1])
    ps = float(z0[2])
    pth = float(z0[3])
    pph = float(z0[4])
    pps = float(z0[5])
    MR2 = M * R * R
    sMI = sig * M / I
    half = 0.5 * dt

    out[0, 0] = th
    out[0, 1] = ph
    out[0, 2] = ps
    out[0, 3] = pth
    out[0, 4] = pph
    out[0, 5] = pps

    for n in range(steps):
        ths = th
        pths = pth
        tol_th = tol * (1.0 + abs(th))
        tol_pth = tol * (1.0 + abs(pth))
        converged = False
        h = c = 0.0
        for _ in range(max_iters):
            ths_new = th + half * pths / MR2
            if geom == GEOM_SPHERE:
                h = R * sin(ths_new)
                dh = R * cos(ths_new)
                c = cos(ths_new)
                dc = -sin(ths_new)
            elif geom == GEOM_PSEUDOSPHERE:
                h = R * sinh(ths_new)
                dh = R * cosh(ths_new)
                c = cosh(ths_new)
                dc = sinh(ths_new)
            else:
                h = L + R * cos(ths_new)
                dh = -R * sin(ths_new)
                c = sin(ths_new)
                dc = cos(ths_new)
            if geom != GEOM_TORUS and h < h_min:
                return STATUS_POLE, n
            h2 = h * h
            h3 = h2 * h
            dGpp = -2.0 * dh / h3
            dGps = -dc / h2 + 2.0 * c * dh / h3
            dGss = 2.0 * c * dc / h2 - 2.0 * c * c * dh / h3
            force = -0.5 * (dGpp * pph * pph + 2.0 * dGps * pph * pps + dGss * pps * pps) / M
            if pot == POT_COSINE_WELL:
                force -= V0 * sin(ths_new)
            elif pot == POT_HARMONIC:
                force -= 2.0 * V0 * ths_new
            pths_new = pth + half * force
            dth_it = abs(ths_new - ths)
            dpth_it = abs(pths_new - pths)
            ths = ths_new
            pths = pths_new
            if dth_it <= tol_th and dpth_it <= tol_pth:
                converged = True
                break
        if not converged:
            return STATUS_REJECTED, n
        # cyclic angles advance with inverse-metric rates at the midpoint
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
