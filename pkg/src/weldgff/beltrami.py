"""First-order quasiconformal machinery.

A Beltrami coefficient ``mu`` supported on an annulus generates, for small
``t``, a quasiconformal motion ``z + t v(z) + o(t)`` whose velocity ``v`` is
a Cauchy transform of ``mu``.  This module computes those transforms by
adaptive quadrature (with closed forms for the Laurent directions used in
tests), the associated normalised flows, pullbacks and pushforwards, the
power-series coefficients of pushforward velocity fields, and the ghost
kernel summation identity that converts a mode sum of those coefficients
into a Schwarzian integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, ConfigurationError, DomainError
from .kernels import PsiKernel
from .quadrature import annulus_integral
from .series import EXTERIOR, PowerSeriesMap

FIX_0_1_INF = "fix_0_1_inf"
FIX_0_INF_DERIVINF = "fix_0_inf_derivinf"
FIX_0_DERIV0_INF = "fix_0_deriv0_inf"


@dataclass
class BeltramiSpec:
    """Measurable Beltrami coefficient with annular support.

    ``evaluator`` maps complex arrays to complex arrays and is taken to
    vanish outside ``r_in <= |z| <= r_out``.  ``sup_norm`` records the sup
    of ``|mu|`` over the support; honest dilatations need ``sup_norm < 1``
    but first-order directions may exceed it (they are always used with a
    small multiplier ``t``).
    """

    evaluator: object
    r_in: float
    r_out: float
    sup_norm: float = 1.0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        inside = (r >= self.r_in) & (r <= self.r_out)
        out = np.zeros_like(z)
        if np.any(inside):
            out[inside] = np.asarray(self.evaluator(z[inside]), dtype=complex)
        return out

    def scaled(self, s: complex) -> "BeltramiSpec":
        ev = self.evaluator
        return BeltramiSpec(lambda z: s * np.asarray(ev(z), dtype=complex),
                            self.r_in, self.r_out, abs(s) * self.sup_norm)


def laurent_beltrami(n: int, scale: complex = 1.0, r_in: float = 2.0) -> BeltramiSpec:
    """The Laurent direction ``mu_n = n 4^n conj(z)^(-n-1) z`` on ``|z| > 2``.

    Its Cauchy transform (vanishing at 0) equals ``-z^(n+1)`` on ``|z| < 2``,
    i.e. the Laurent basis vector field; the overall ``scale`` multiplies
    everything linearly.
    """
    if n < 1:
        raise ValueError("Laurent directions are defined for n >= 1")
    c = scale * n * 4.0**n

    def ev(z):
        return c * np.conj(z) ** (-n - 1.0) * z

    sup = abs(c) * r_in ** (-n)
    return BeltramiSpec(ev, r_in, np.inf, sup)


def laurent_cauchy_closed_form(n: int, scale: complex, z):
    """Closed form of ``i z w_mu`` for the Laurent direction, all of C."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    out = np.empty_like(z)
    inner = r <= 2.0
    out[inner] = -z[inner] ** (n + 1)
    zo = z[~inner]
    out[~inner] = -zo ** (n + 1) * (4.0 / np.abs(zo) ** 2) ** n
    return scale * (out + z)


# ---------------------------------------------------------------------------
# Cauchy transforms
# ---------------------------------------------------------------------------


def _moment(mu: BeltramiSpec, fn, tol=1e-11):
    val, err = annulus_integral(lambda z: mu(z) * fn(z), mu.r_in, mu.r_out, tol=tol)
    return val / np.pi, err / np.pi


def pure_cauchy(mu: BeltramiSpec, z, tol: float = 1e-10):
    """``C(mu)(z) = -(1/pi) int (1/(zeta-z) - 1/zeta) mu``; solves
    ``dbar C = mu`` with ``C(0) = 0``.

    Points inside the support are handled by subtracting the singularity
    (the remaining kink degrades the attainable tolerance; the returned
    error estimate reflects it).
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty_like(z)
    errs = np.zeros(len(z))
    for i, zi in enumerate(z):
        r = abs(zi)
        if r < mu.r_in * (1 - 1e-12) or r > mu.r_out * (1 + 1e-12):
            def fn(w, zi=zi):
                return mu(w) * (1.0 / (w - zi) - 1.0 / w)

            val, err = annulus_integral(fn, mu.r_in, mu.r_out, tol=tol)
            out[i] = -val / np.pi
            errs[i] = err / np.pi
        else:
            val, err = _pv_cauchy_point(mu, zi)
            out[i] = val
            errs[i] = err
    return (out[0], errs[0]) if out.shape == (1,) else (out, errs)


def _pv_cauchy_point(mu: BeltramiSpec, zi: complex, n_phi: int = 512, n_r: int = 32):
    """``C(mu)(zi)`` for ``zi`` inside the support.

    The constant part of ``mu`` at ``zi`` is subtracted (its integral against
    the Cauchy kernel has a closed form); the remaining bounded integrand is
    discontinuous only at ``zi``, and the grid is anchored there (angular
    node on the ray of ``zi``, radial panel break at ``|zi|``) so the
    residual quadrature error varies smoothly with ``zi`` and cancels in
    finite differences.
    """
    mz = complex(mu(np.array([zi]))[0])
    rz, az = abs(zi), math.atan2(zi.imag, zi.real)

    def run(n_phi, n_r):
        phi = az + 2 * np.pi * np.arange(n_phi) / n_phi
        x, wgl = np.polynomial.legendre.leggauss(n_r)
        rho_list, wr_list = [], []
        # inner panel [r_in, |zi|]
        a, b = mu.r_in, rz
        rho_list.append(0.5 * (b - a) * x + 0.5 * (a + b))
        wr_list.append(0.5 * (b - a) * wgl)
        # outer panel [|zi|, r_out]
        if math.isinf(mu.r_out):
            lo = 1e-9
            u = lo + (0.5 * (x + 1.0)) * (1.0 - lo)
            rho_list.append(rz / u)
            wr_list.append((0.5 * wgl) * (1.0 - lo) * (rz / u**2))
        else:
            a, b = rz, mu.r_out
            rho_list.append(0.5 * (b - a) * x + 0.5 * (a + b))
            wr_list.append(0.5 * (b - a) * wgl)
        rho = np.concatenate(rho_list)
        wr = np.concatenate(wr_list)
        zgrid = rho[:, None] * np.exp(1j * phi)[None, :]
        muv = mu(zgrid)
        d = zgrid - zi
        quot = np.where(np.abs(d) > 1e-13, (muv - mz) / np.where(d == 0, 1, d), 0.0)
        F = quot - muv / zgrid
        w2 = (rho * wr)[:, None] * (2 * np.pi / n_phi)
        return complex(np.sum(F * w2))

    coarse = run(n_phi, n_r)
    fine = run(2 * n_phi, int(1.5 * n_r))
    # (1/pi) int_annulus 1/(w - z) |dw|^2 = -conj(z) + r_in^2 / z
    sing = -np.conj(zi) + (mu.r_in**2) / zi if mu.r_in > 0 else -np.conj(zi)
    val = -(fine / np.pi + mz * sing)
    return val, abs(fine - coarse) / np.pi


def _linear_coefficient(mu: BeltramiSpec, tol: float = 1e-11) -> complex:
    """``-(1/pi) int (1/zeta - 1/(zeta-1)) mu``: the coefficient of z in izw."""
    val, _ = _moment(mu, lambda w: 1.0 / w - 1.0 / (w - 1.0), tol)
    return -val


def cauchy_transform(mu: BeltramiSpec, z, tol: float = 1e-10):
    """Normalised transform ``w_mu(z)`` with ``w(0) = w(1) = 0`` and decay at
    infinity, plus the vector field ``v(z) = i z w_mu(z)``.

    Returns ``(w, v, err)``.
    """
    z = np.asarray(z, dtype=complex)
    C, err = pure_cauchy(mu, z, tol)
    L = _linear_coefficient(mu, tol)
    v = C + L * z
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(np.abs(z) > 1e-13, v / (1j * z), 0.0)
    return w, v, err


def circle_velocity(mu: BeltramiSpec, grid_n: int = 512, tol: float = 1e-10):
    """``w_mu`` sampled on the unit circle (used for symmetric circle flows)."""
    z = np.exp(2j * np.pi * np.arange(grid_n) / grid_n)
    w, _, _ = cauchy_transform(mu, z, tol)
    return w


# ---------------------------------------------------------------------------
# flows and tensor transport
# ---------------------------------------------------------------------------


@dataclass
class FlowSpec:
    """First-order quasiconformal flow: a Beltrami direction plus a
    normalisation, optionally symmetrised to preserve the unit circle."""

    mu: BeltramiSpec
    normalization: str = FIX_0_1_INF
    symmetric: bool = False

    def __post_init__(self):
        if self.normalization not in (FIX_0_1_INF, FIX_0_INF_DERIVINF, FIX_0_DERIV0_INF):
            raise ConfigurationError(f"unknown normalization {self.normalization!r}")
        if self.normalization == FIX_0_INF_DERIVINF and math.isinf(self.mu.r_out):
            raise ConfigurationError("derivative-at-infinity normalisation needs "
                                     "mu supported away from infinity")
        if self.normalization == FIX_0_DERIV0_INF and self.mu.r_in <= 0:
            raise ConfigurationError("derivative-at-0 normalisation needs "
                                     "mu supported away from 0")


def flow_velocity(spec: FlowSpec, z, tol: float = 1e-10):
    """The first-order velocity field ``u`` with ``Phi_t = z + t u(z) + o(t)``."""
    z = np.asarray(z, dtype=complex)
    if spec.symmetric:
        raise ConfigurationError("symmetric flows move points via first_order_flow")
    if spec.normalization == FIX_0_1_INF:
        _, v, _ = cauchy_transform(spec.mu, z, tol)
        return v
    if spec.normalization == FIX_0_INF_DERIVINF:
        C, _ = pure_cauchy(spec.mu, z, tol)
        return C
    # fix_0_deriv0_inf: subtract value and derivative of izw at 0
    _, v, _ = cauchy_transform(spec.mu, z, tol)
    h = 1e-5
    _, vp, _ = cauchy_transform(spec.mu, np.array([h, -h, 1j * h, -1j * h]), tol)
    d0 = (vp[0] - vp[1]) / (2 * h)
    d0 = 0.5 * (d0 + (vp[2] - vp[3]) / (2j * h))
    return v - z * d0


def first_order_flow(spec: FlowSpec, t: complex, z, tol: float = 1e-10):
    """Displaced points ``Phi_t(z)`` at first order in ``t``.

    ``|t| * sup_norm`` must stay small (<= 0.1) for the expansion to make
    sense.  Symmetric flows use ``z + 2 i z Re(t w_mu(z))``, which maps the
    circle to the circle up to O(t^2).
    """
    if abs(t) * spec.mu.sup_norm > 0.1:
        raise DomainError("flow expansion used outside its first-order regime")
    z = np.asarray(z, dtype=complex)
    if spec.symmetric:
        w, _, _ = cauchy_transform(spec.mu, z, tol)
        return z + 2j * z * np.real(t * w)
    return z + t * flow_velocity(spec, z, tol)


def iota_pullback(mu: BeltramiSpec) -> BeltramiSpec:
    """Pullback under the circle inversion ``z -> 1/conj(z)``."""
    ev = mu.evaluator

    def pulled(z):
        w = 1.0 / np.conj(z)
        return (z / np.conj(z)) ** 2 * np.conj(np.asarray(ev(w), dtype=complex))

    r_in = 0.0 if math.isinf(mu.r_out) else 1.0 / mu.r_out
    r_out = np.inf if mu.r_in == 0 else 1.0 / mu.r_in
    return BeltramiSpec(pulled, r_in, r_out, mu.sup_norm)


def pushforward_beltrami(f: PowerSeriesMap, mu: BeltramiSpec, direction: str = "push",
                         newton_steps: int = 80) -> BeltramiSpec:
    """Transport of ``mu`` by a conformal map: ``push`` gives
    ``mu o f^{-1} conj((f^{-1})') / (f^{-1})'``, ``pull`` gives
    ``mu o f conj(f') / f'``.

    The support annulus of the result is bracketed by sampling ``|f|`` on
    the support circles; the evaluator returns 0 whenever the preimage
    falls outside the original support.
    """
    if direction not in ("push", "pull"):
        raise ValueError("direction must be 'push' or 'pull'")
    th = np.exp(2j * np.pi * np.arange(256) / 256)
    if direction == "pull":
        ev = mu.evaluator

        def pulled(z):
            w = f(z)
            fp = f.derivative_values(z, 1)
            r = np.abs(w)
            inside = (r >= mu.r_in) & (r <= mu.r_out)
            out = np.zeros_like(z, dtype=complex)
            if np.any(inside):
                out[inside] = (np.asarray(ev(w[inside]), dtype=complex)
                               * np.conj(fp[inside]) / fp[inside])
            return out

        lo = _radial_min(f, mu.r_in, th)
        hi = _radial_max(f, mu.r_out, th)
        return BeltramiSpec(pulled, lo, hi, mu.sup_norm)

    # push
    def pushed(w):
        w = np.asarray(w, dtype=complex)
        z = f.invert_point(w, newton_steps=newton_steps)
        fp = f.derivative_values(z, 1)
        r = np.abs(z)
        inside = (r >= mu.r_in * (1 - 1e-12)) & (r <= mu.r_out * (1 + 1e-12))
        out = np.zeros_like(w)
        if np.any(inside):
            vals = np.asarray(mu.evaluator(z[inside]), dtype=complex)
            out[inside] = vals * fp[inside] / np.conj(fp[inside])
        return out

    lo = 0.0 if mu.r_in == 0 else float(np.min(np.abs(f(mu.r_in * th))))
    hi = np.inf if math.isinf(mu.r_out) else float(np.max(np.abs(f(mu.r_out * th))))
    return BeltramiSpec(pushed, lo, hi, mu.sup_norm)


def _radial_min(f, r, th):
    if r == 0:
        return 0.0
    sol = f.invert_point(r * th)
    return float(np.min(np.abs(sol)))


def _radial_max(f, r, th):
    if math.isinf(r):
        return np.inf
    sol = f.invert_point(r * th)
    return float(np.max(np.abs(sol)))


# ---------------------------------------------------------------------------
# velocity-field coefficients of a pushforward direction
# ---------------------------------------------------------------------------


def transported_velocity(g: PowerSeriesMap, mu: BeltramiSpec, xi, *,
                         n_phi: int = 256, n_r: int = 48, chunk: int = 64):
    """Cauchy transform of the transported coefficient ``g_* mu`` at ``xi``:

        u(xi) = (1/pi) int mu(z) g'(z)^2 / (xi - g(z)) |dz|^2,

    integrated in the source coordinates over the support of ``mu``; it
    solves ``dbar u = g_* mu`` and expands as ``sum_{n >= -1} beta_n xi^(n+1)``
    near 0 with the ``beta_coefficients`` of this module.  ``xi`` must stay
    off ``g(supp mu)``."""
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    zs, w2d = _annulus_nodes(mu.r_in, mu.r_out, n_phi, n_r)
    dens = mu(zs) * g.derivative_values(zs, 1) ** 2 * w2d
    gz = g(zs)
    out = np.empty_like(xi)
    for i in range(0, len(xi), chunk):
        blk = xi[i : i + chunk]
        out[i : i + chunk] = (dens[None, :] / (blk[:, None] - gz[None, :])).sum(axis=1)
    return out / np.pi


def beta_coefficients(g: PowerSeriesMap, mu: BeltramiSpec, n_max: int, *,
                      n_phi: int = 256, n_r: int = 48):
    """Power-series coefficients of the pushforward velocity field:

        beta_n = -(1/pi) int mu(z) g(z)^(-n-2) g'(z)^2 |dz|^2,  n = -1..n_max.

    Requires ``|g| > 1`` on the support so the coefficients decay
    geometrically; returns ``(betas, fitted_ratio)``.
    """
    if g.kind != EXTERIOR:
        raise ValueError("beta coefficients are defined for exterior maps")

    def fn(z):
        gp = g.derivative_values(z, 1)
        gz = g(z)
        ns = np.arange(-1, n_max + 1)
        return mu(z) * gp**2 * gz ** (-(ns[:, None] + 2.0))

    vals = _fixed_annulus(fn, mu.r_in, mu.r_out, n_phi, n_r,
                          extra_shape=(n_max + 2,))
    betas = -vals / np.pi
    mags = np.abs(betas)
    tail = mags[max(2, len(mags) // 2):]
    nz = tail[tail > 1e-300]
    ratio = float(np.exp(np.mean(np.diff(np.log(nz))))) if len(nz) > 3 else 0.0
    if ratio >= 1.0:
        raise AccuracyError(f"beta coefficients do not decay (ratio {ratio:.3f})")
    return betas, ratio


def _annulus_nodes(r_in, r_out, n_phi, n_r):
    """Flattened polar tensor nodes and |dz|^2 weights on an annulus."""
    x, wgl = np.polynomial.legendre.leggauss(n_r)
    if math.isinf(r_out):
        lo = 1e-9
        u = lo + (0.5 * (x + 1.0)) * (1.0 - lo)
        rho = r_in / u
        wr = (0.5 * wgl) * (1.0 - lo) * (r_in / u**2)
    else:
        rho = 0.5 * (r_out - r_in) * x + 0.5 * (r_out + r_in)
        wr = 0.5 * (r_out - r_in) * wgl
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    z = (rho[:, None] * np.exp(1j * phi)[None, :]).ravel()
    w = ((rho * wr)[:, None] * np.full((1, n_phi), 2 * np.pi / n_phi)).ravel()
    return z, w


def _fixed_annulus(fn, r_in, r_out, n_phi, n_r, extra_shape=()):
    """Non-adaptive polar tensor integral supporting batched integrands.

    ``fn(z)`` may return an array of shape ``extra_shape + z.shape``; the
    integral is taken over the trailing axis.
    """
    z, w = _annulus_nodes(r_in, r_out, n_phi, n_r)
    vals = np.asarray(fn(z), dtype=complex)
    return (vals * w).sum(axis=-1)


# ---------------------------------------------------------------------------
# ghost kernel and the mode-sum identity
# ---------------------------------------------------------------------------


def psi_kernel(psi: PowerSeriesMap, z, zeta):
    """Kernel ``psi'(zeta)^2/(psi'(z)(psi(z)-psi(zeta))) - 1/(z-zeta)``,
    evaluated through the cancellation-free bivariate form."""
    return PsiKernel(psi)(z, zeta)


def ghost_sum_check(g: PowerSeriesMap, mu: BeltramiSpec, n_max: int, *,
                    contour_n: int = 512, n_phi: int = 256, n_r: int = 48,
                    contour_radius: float | None = None):
    """Mode-sum side and Schwarzian side of the ghost summation identity.

    The left side sums, for n = -1..n_max, the two double integrals

        (1/(i pi^2))   II mu g' g^(-n-2) zeta^(n+1) d_1 K(g(z), zeta) dzeta |dz|^2
      - ((n+2)/(2 i pi^2)) II mu g'^2 g^(-n-3) zeta^(n+1) K(g(z), zeta) dzeta |dz|^2

    with K the ghost kernel of ``g^{-1}``; the right side is
    ``(13/(6 pi)) int mu Sg |dz|^2``.  Returns ``(lhs, rhs, trunc_bound)``.
    """
    if g.kind != EXTERIOR:
        raise ValueError("the ghost sum is computed for exterior maps")
    th = np.exp(2j * np.pi * np.arange(256) / 256)
    sup_circle = float(np.max(np.abs(g(th))))
    inf_supp = float(np.min(np.abs(g(mu.r_in * th))))
    if contour_radius is None:
        if sup_circle >= inf_supp:
            raise ConfigurationError(
                f"empty contour window: sup |g| on S^1 = {sup_circle:.3f} >= "
                f"inf |g| on supp mu = {inf_supp:.3f}")
        contour_radius = math.sqrt(sup_circle * inf_supp)
    rc = contour_radius

    # contour points and the inverse map on them
    zeta = rc * np.exp(2j * np.pi * np.arange(contour_n) / contour_n)
    psi_zeta = g.invert_point(zeta)
    psip_zeta = 1.0 / g.derivative_values(psi_zeta, 1)
    dzeta_weight = 1j * zeta * (2 * np.pi / contour_n)

    # outer quadrature nodes over the support of mu
    zs, w2d = _annulus_nodes(mu.r_in, mu.r_out, n_phi, n_r)
    mu_z = mu(zs)
    keep = np.abs(mu_z) > 0
    zs, w2d, mu_z = zs[keep], w2d[keep], mu_z[keep]
    gz = g(zs)
    gp = g.derivative_values(zs, 1)
    gpp = g.derivative_values(zs, 2)

    # ghost kernel of psi = g^{-1} at (g(z), zeta), plus its total z-derivative;
    # psi(g(z)) = z and psi'(g(z)) = 1/g'(z) collapse the first-slot values
    K = (gp[:, None] * psip_zeta[None, :] ** 2 / (zs[:, None] - psi_zeta[None, :])
         - 1.0 / (gz[:, None] - zeta[None, :]))
    dKdz = (gpp[:, None] * psip_zeta[None, :] ** 2 / (zs[:, None] - psi_zeta[None, :])
            - gp[:, None] * psip_zeta[None, :] ** 2 / (zs[:, None] - psi_zeta[None, :]) ** 2
            + gp[:, None] / (gz[:, None] - zeta[None, :]) ** 2)

    lhs = 0.0 + 0.0j
    terms = []
    ns = np.arange(-1, n_max + 1)
    zeta_pow = zeta ** (ns[0] + 1)
    g_pow = gz ** (-(ns[0] + 2.0))
    for n in ns:
        inner1 = dKdz @ (zeta_pow * dzeta_weight)
        inner2 = K @ (zeta_pow * dzeta_weight)
        t1 = np.sum(mu_z * gp * g_pow * inner1 * w2d) / (1j * np.pi**2)
        t2 = -(n + 2) / (2j * np.pi**2) * np.sum(mu_z * gp**2 * g_pow / gz * inner2 * w2d)
        term = t1 + t2
        terms.append(term)
        lhs += term
        zeta_pow = zeta_pow * zeta
        g_pow = g_pow / gz

    tail = np.abs(np.array(terms[-6:]))
    ratio = rc / inf_supp
    trunc = float(tail[-1] * ratio / max(1e-300, 1 - ratio))

    def schw(z):
        _, s = g.schwarzian(z)
        return s

    # the Schwarzian side uses a staggered grid so the two pipelines do not
    # share quadrature nodes
    rhs_int = _fixed_annulus(lambda z: mu(z) * schw(z), mu.r_in, mu.r_out,
                             n_phi + 64, n_r + 16)
    rhs = (13.0 / (6.0 * np.pi)) * rhs_int
    return lhs, rhs, trunc
