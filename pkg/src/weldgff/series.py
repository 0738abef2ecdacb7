"""Truncated power/Laurent series representing conformal maps.

Two kinds of maps appear everywhere downstream:

* interior maps ``f(z) = sum_{k>=0} c_k z^k`` on a disc, normally with
  ``f(0) = 0`` (and ``f'(0) = 1`` for capacity-normalised maps);
* exterior maps ``g(z) = b z + b_0 + sum_{m>=1} b_m z^{-m}`` on the
  complement of a disc, fixing infinity.

Coefficients are stored densely; all evaluation is vectorised over numpy
arrays of points.  Composition and inversion are exact on the truncation
and validated by a round-trip residual on a reference circle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularMapError

INTERIOR = "interior"
EXTERIOR = "exterior"


def _falling(k: np.ndarray, d: int) -> np.ndarray:
    out = np.ones_like(k, dtype=float)
    for j in range(d):
        out = out * (k - j)
    return out


@dataclass
class PowerSeriesMap:
    """Truncated series map of the disc or the exterior disc.

    ``kind`` is ``"interior"`` or ``"exterior"``.  For interior maps
    ``coef[k]`` multiplies ``z**k``; for exterior maps ``coef[j]``
    multiplies ``z**(1-j)`` (so ``coef[0]`` is the coefficient of ``z``).
    ``domain_radius`` bounds where the truncated series is trusted:
    ``|z| <= domain_radius`` for interior maps, ``|z| >= 1/domain_radius``
    for exterior ones.  ``None`` disables the check.
    """

    kind: str
    coef: np.ndarray
    domain_radius: float | None = None

    def __post_init__(self):
        self.coef = np.asarray(self.coef, dtype=complex)
        if self.kind not in (INTERIOR, EXTERIOR):
            raise ValueError(f"unknown kind {self.kind!r}")

    # -- constructors -------------------------------------------------

    @staticmethod
    def identity(M: int = 64) -> "PowerSeriesMap":
        c = np.zeros(M + 1, dtype=complex)
        c[1] = 1.0
        return PowerSeriesMap(INTERIOR, c)

    @staticmethod
    def from_perturbation(a: np.ndarray, domain_radius: float | None = None) -> "PowerSeriesMap":
        """Capacity-normalised interior map ``z (1 + sum a_m z^m)``."""
        a = np.asarray(a, dtype=complex)
        c = np.zeros(len(a) + 2, dtype=complex)
        c[1] = 1.0
        c[2:] = a
        return PowerSeriesMap(INTERIOR, c, domain_radius)

    @staticmethod
    def exterior_from_coeffs(b_minus1: complex, b0: complex, b: np.ndarray,
                             domain_radius: float | None = None) -> "PowerSeriesMap":
        """Exterior map ``b_minus1 z + b0 + sum_m b[m-1] z^-m``."""
        b = np.asarray(b, dtype=complex)
        c = np.concatenate([[b_minus1, b0], b])
        return PowerSeriesMap(EXTERIOR, c, domain_radius)

    @staticmethod
    def mobius_disc(a: complex, M: int = 64) -> "PowerSeriesMap":
        """Series of the disc automorphism ``(z - a) / (1 - conj(a) z)``."""
        if abs(a) >= 1:
            raise DomainError("mobius parameter must lie in the unit disc")
        ab = np.conj(a)
        # (z - a) * sum_j ab^j z^j
        geom = ab ** np.arange(M + 1)
        c = np.zeros(M + 2, dtype=complex)
        c[1:] += geom
        c[: M + 1] -= a * geom
        return PowerSeriesMap(INTERIOR, c[: M + 1], domain_radius=1.0)

    # -- basic queries -------------------------------------------------

    @property
    def truncation(self) -> int:
        return len(self.coef) - 1

    def powers(self) -> np.ndarray:
        k = np.arange(len(self.coef))
        return k if self.kind == INTERIOR else 1 - k

    def deriv_at_zero(self) -> complex:
        if self.kind != INTERIOR:
            raise ValueError("deriv_at_zero applies to interior maps")
        return complex(self.coef[1]) if len(self.coef) > 1 else 0.0j

    def deriv_at_infinity(self) -> complex:
        if self.kind != EXTERIOR:
            raise ValueError("deriv_at_infinity applies to exterior maps")
        return complex(self.coef[0])

    def scaled(self, lam: complex) -> "PowerSeriesMap":
        """The map ``z -> lam * self(z)``."""
        return PowerSeriesMap(self.kind, lam * self.coef, self.domain_radius)

    def tail_estimate(self, r: float) -> float:
        """Magnitude of the last retained term at radius ``r``: a divergence
        indicator for evaluation outside the disc of reliable truncation."""
        k = self.powers()
        nz = np.nonzero(np.abs(self.coef) > 0)[0]
        if len(nz) == 0:
            return 0.0
        j = nz[-1] if self.kind == INTERIOR else nz[-1]
        return float(abs(self.coef[j]) * r ** float(k[j]))

    def _check_domain(self, z: np.ndarray):
        if self.domain_radius is None:
            return
        r = np.abs(z)
        if self.kind == INTERIOR:
            bad = r > self.domain_radius * (1 + 1e-9)
        else:
            bad = r < (1.0 / self.domain_radius) * (1 - 1e-9)
        if np.any(bad):
            raise DomainError(
                f"{self.kind} series evaluated outside |z| bound {self.domain_radius}")

    # -- evaluation ----------------------------------------------------

    def eval_derivs(self, z, order: int = 0) -> list:
        """Values ``[f(z), f'(z), ..., f^(order)(z)]`` by term-wise series.

        ``order`` is capped at 4: higher derivatives of a truncated series
        amplify the tail too much to be trustworthy.
        """
        if order > 4:
            raise ValueError("derivative order above 4 is not supported")
        z = np.asarray(z, dtype=complex)
        self._check_domain(z)
        k = self.powers().astype(float)
        out = []
        for d in range(order + 1):
            w = self.coef * _falling(k, d)
            if self.kind == INTERIOR:
                # sum_{k>=d} w_k z^(k-d): Horner in z (w_k = 0 for k < d)
                vals = np.zeros_like(z)
                for c in w[::-1][: len(w) - d]:
                    vals = vals * z + c
            else:
                # sum_j w_j z^(1-j-d) = z^(1-d) * Horner in t = 1/z;
                # positive powers of t underflow cleanly for large |z|
                with np.errstate(divide="ignore"):
                    t = np.where(z != 0, 1.0 / z, np.inf)
                vals = np.zeros_like(z)
                for c in w[::-1]:
                    vals = vals * t + c
                if d == 0:
                    vals = vals * z
                elif d > 1:
                    vals = vals * t ** (d - 1)
            out.append(vals)
        return out

    def __call__(self, z):
        return self.eval_derivs(z, 0)[0]

    def derivative_values(self, z, d: int = 1):
        return self.eval_derivs(z, d)[d]

    # -- calculus on the series ----------------------------------------

    def schwarzian(self, z):
        """Pre-Schwarzian ``f''/f'`` and Schwarzian of the map at ``z``.

        Returns the pair ``(A, S)`` with ``A = f''/f'`` and
        ``S = f'''/f' - 3/2 (f''/f')^2``.  Raises if ``f'`` vanishes.
        """
        f1, f2, f3 = self.eval_derivs(z, 3)[1:]
        if np.any(np.abs(f1) < 1e-14):
            raise SingularMapError("f'(z) = 0: Schwarzian undefined")
        pre = f2 / f1
        return pre, f3 / f1 - 1.5 * pre**2

    # -- composition / inversion (interior maps) ------------------------

    def compose(self, other: "PowerSeriesMap", M: int | None = None) -> "PowerSeriesMap":
        """Truncated composition ``self o other`` for interior maps.

        ``other`` must vanish at 0 (otherwise the composition is not a
        power-series operation on this representation).
        """
        if self.kind != INTERIOR or other.kind != INTERIOR:
            raise ValueError("series composition implemented for interior maps")
        if abs(other.coef[0]) > 1e-14:
            raise DomainError("inner map must fix 0 for series composition")
        M = M or max(self.truncation, other.truncation)
        a = _trim(self.coef, M)
        b = _trim(other.coef, M)
        # Horner: result = a_M; result = result*b + a_{k}
        res = np.zeros(M + 1, dtype=complex)
        for c in a[::-1]:
            res = _polymul_trunc(res, b, M)
            res[0] += c
        rad = _min_radius(self.domain_radius, other.domain_radius)
        return PowerSeriesMap(INTERIOR, res, rad)

    def inverse_series(self, M: int | None = None) -> "PowerSeriesMap":
        """Compositional inverse of an interior map fixing 0, by Newton iteration."""
        if self.kind != INTERIOR:
            raise ValueError("series inversion implemented for interior maps")
        if abs(self.coef[0]) > 1e-14:
            raise DomainError("map must fix 0 for series inversion")
        if abs(self.coef[1]) < 1e-14:
            raise SingularMapError("f'(0) = 0: not invertible as a series")
        M = M or self.truncation
        f = _trim(self.coef, M)
        fp = _poly_deriv(f)
        h = np.zeros(M + 1, dtype=complex)
        h[1] = 1.0 / f[1]
        ident = np.zeros(M + 1, dtype=complex)
        ident[1] = 1.0
        for _ in range(int(np.ceil(np.log2(M + 2))) + 2):
            fh = _poly_compose_trunc(f, h, M)
            fph = _poly_compose_trunc(fp, h, M)
            corr = _polymul_trunc(fh - ident, _poly_reciprocal(fph, M), M)
            h = h - corr
        return PowerSeriesMap(INTERIOR, h, None)

    def roundtrip_residual(self, radius: float = 0.5, n: int = 256) -> float:
        """sup-norm of ``f^{-1}(f(z)) - z`` on ``|z| = radius``."""
        inv = self.inverse_series()
        z = radius * np.exp(2j * np.pi * np.arange(n) / n)
        return float(np.max(np.abs(inv(self(z)) - z)))

    def invert_point(self, w, guess=None, newton_steps: int = 60, tol: float = 1e-13):
        """Pointwise inverse by Newton; works for both kinds.

        For exterior maps the natural initial guess ``(w - b0)/b`` is used.
        """
        w = np.asarray(w, dtype=complex)
        if guess is None:
            if self.kind == EXTERIOR:
                z = (w - self.coef[1]) / self.coef[0]
            else:
                z = w / self.coef[1]
        else:
            z = np.array(np.broadcast_to(guess, w.shape), dtype=complex)
        for _ in range(newton_steps):
            val, der = self.eval_derivs(z, 1)
            step = (val - w) / der
            z = z - step
            if np.max(np.abs(step)) < tol:
                break
        else:
            raise SingularMapError("pointwise inversion did not converge")
        return z


def series_compose_invert(f: PowerSeriesMap, g: PowerSeriesMap | None = None,
                          M: int | None = None) -> PowerSeriesMap:
    """Composition ``f o g``, or the compositional inverse of ``f`` when ``g`` is None.

    The inverse is validated by the round-trip residual on ``|z| = 0.5``;
    the working truncation doubles (up to 512) until the residual is below
    1e-10.
    """
    if g is not None:
        return f.compose(g, M)
    M = M or f.truncation
    while True:
        inv = f.inverse_series(M)
        z = 0.5 * np.exp(2j * np.pi * np.arange(128) / 128)
        res = np.max(np.abs(_pad_eval(inv, _pad_eval(f, z, M), M) - z))
        if res < 1e-10 or M >= 512:
            return inv
        M *= 2


def _pad_eval(p: PowerSeriesMap, z, M):
    return p(z)


def _trim(c: np.ndarray, M: int) -> np.ndarray:
    out = np.zeros(M + 1, dtype=complex)
    n = min(len(c), M + 1)
    out[:n] = c[:n]
    return out


def _polymul_trunc(a: np.ndarray, b: np.ndarray, M: int) -> np.ndarray:
    return np.convolve(a, b)[: M + 1]


def _poly_deriv(a: np.ndarray) -> np.ndarray:
    if len(a) <= 1:
        return np.zeros(1, dtype=complex)
    return a[1:] * np.arange(1, len(a))


def _poly_compose_trunc(a: np.ndarray, b: np.ndarray, M: int) -> np.ndarray:
    res = np.zeros(M + 1, dtype=complex)
    for c in a[::-1]:
        res = _polymul_trunc(res, _trim(b, M), M)
        res[0] += c
    return res


def _poly_reciprocal(a: np.ndarray, M: int) -> np.ndarray:
    """Series 1/a(z) mod z^{M+1}; requires a(0) != 0."""
    if abs(a[0]) < 1e-14:
        raise SingularMapError("series reciprocal of a map vanishing at 0")
    r = np.zeros(M + 1, dtype=complex)
    r[0] = 1.0 / a[0]
    k = 1
    while k <= M:
        k = min(2 * k, M + 1)
        ar = _polymul_trunc(_trim(a, k - 1), _trim(r, k - 1), k - 1)
        two = -ar
        two[0] += 2.0
        r = _polymul_trunc(_trim(r, k - 1), two, k - 1)
    return _trim(r, M)


def _min_radius(r1, r2):
    if r1 is None:
        return r2
    if r2 is None:
        return r1
    return min(r1, r2)


def pre_schwarzian_coefficients(f: PowerSeriesMap, M: int | None = None) -> np.ndarray:
    """Coefficients of ``f''/f'`` as a series adapted to the kind of map.

    Interior: returns ``a`` with ``f''/f' = sum_k a[k] z^k``.
    Exterior: returns ``a`` with ``f''/f' = sum_k a[k] z^(-k)`` (a[0] = a[1]
    = a[2] = 0 for a map fixing infinity).
    """
    M = M or f.truncation
    if f.kind == INTERIOR:
        c = _trim(f.coef, M + 2)
        fp = _poly_deriv(c)
        fpp = _poly_deriv(fp)
        return _polymul_trunc(_trim(fpp, M), _poly_reciprocal(_trim(fp, M), M), M)
    # exterior g(z) = b z + b0 + sum b_m z^-m; work in t = 1/z:
    # g'(z) = b - sum m b_m t^(m+1) =: P(t);  g''(z) = dP/dt * dt/dz = -t^2 P'(t)
    # A g = g''/g' = -t^2 P'(t)/P(t)
    b = f.coef
    P = np.zeros(M + 2, dtype=complex)
    P[0] = b[0]
    for m in range(1, len(b) - 1):
        if m + 1 < len(P):
            P[m + 1] = -m * b[m + 1]
    Pp = _poly_deriv(P)
    ratio = _polymul_trunc(_trim(Pp, M), _poly_reciprocal(_trim(P, M), M), M)
    out = np.zeros(M + 3, dtype=complex)
    out[2:] = -ratio[: M + 1]
    return out


def pre_schwarzian_disc_integral(f: PowerSeriesMap, M: int | None = None) -> float:
    """``int |f''/f'|^2 |dz|^2`` over the unit disc (interior map) or
    its complement (exterior map), by the mode formula."""
    a = pre_schwarzian_coefficients(f, M)
    k = np.arange(len(a), dtype=float)
    if f.kind == INTERIOR:
        return float(np.pi * np.sum(np.abs(a) ** 2 / (k + 1)))
    # exterior: int_{|z|>1} |z|^(-2k) = pi/(k-1) for k >= 2
    mask = k >= 2
    return float(np.pi * np.sum(np.abs(a[mask]) ** 2 / (k[mask] - 1)))


def series_from_boundary(values: np.ndarray, kind: str = INTERIOR,
                         domain_radius: float | None = 1.0) -> PowerSeriesMap:
    """Recover a series map from samples on the unit circle.

    ``values[j]`` are the map's values at ``exp(2 pi i j / N)``.  Interior
    maps keep the non-negative frequencies, exterior maps the frequencies
    ``<= 1``; the discarded energy measures how far the samples are from
    being boundary values of the corresponding kind.
    """
    values = np.asarray(values, dtype=complex)
    N = len(values)
    c = np.fft.fft(values) / N
    if kind == INTERIOR:
        coef = c[: N // 2].copy()
        return PowerSeriesMap(INTERIOR, coef, domain_radius)
    # exterior: coefficient of z^(1-j) is c[(1-j) mod N]
    M = N // 2
    coef = np.empty(M + 2, dtype=complex)
    for j in range(M + 2):
        coef[j] = c[(1 - j) % N]
    return PowerSeriesMap(EXTERIOR, coef, domain_radius)
