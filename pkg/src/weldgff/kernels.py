"""Cancellation-free evaluation of the welding ghost kernel.

For a conformal map ``psi`` the kernel is

    K_psi(z, w) = psi'(w)^2 / (psi'(z) (psi(z) - psi(w)))  -  1 / (z - w).

Both terms blow up on the diagonal while their difference stays bounded, so
naive evaluation loses all digits near ``z = w``.  Here the kernel of a
series map is assembled as a ratio of bivariate Laurent polynomials: the
difference of the two singular terms is carried out exactly on coefficients
(one synthetic division by ``z - w``), after which evaluation anywhere,
including on the diagonal, is stable.
"""

from __future__ import annotations

import numpy as np

from .errors import SingularMapError
from .series import PowerSeriesMap

_polyval = np.polynomial.polynomial.polyval


class BiLaurent:
    """Bivariate Laurent polynomial ``sum c[i, j] z^(pmin+i) w^(qmin+j)``."""

    def __init__(self, coef: np.ndarray, pmin: int, qmin: int):
        self.coef = np.asarray(coef, dtype=complex)
        assert self.coef.ndim == 2
        self.pmin = pmin
        self.qmin = qmin

    @staticmethod
    def in_z(coefs: dict) -> "BiLaurent":
        ps = sorted(coefs)
        arr = np.zeros((ps[-1] - ps[0] + 1, 1), dtype=complex)
        for p, c in coefs.items():
            arr[p - ps[0], 0] = c
        return BiLaurent(arr, ps[0], 0)

    @staticmethod
    def in_w(coefs: dict) -> "BiLaurent":
        qs = sorted(coefs)
        arr = np.zeros((1, qs[-1] - qs[0] + 1), dtype=complex)
        for q, c in coefs.items():
            arr[0, q - qs[0]] = c
        return BiLaurent(arr, 0, qs[0])

    def __mul__(self, other: "BiLaurent") -> "BiLaurent":
        a, b = self.coef, other.coef
        if a.size > b.size:
            return other * self
        out = np.zeros((a.shape[0] + b.shape[0] - 1,
                        a.shape[1] + b.shape[1] - 1), dtype=complex)
        idx = np.argwhere(a != 0)
        for i, j in idx:
            out[i : i + b.shape[0], j : j + b.shape[1]] += a[i, j] * b
        return BiLaurent(out, self.pmin + other.pmin, self.qmin + other.qmin)

    def __sub__(self, other: "BiLaurent") -> "BiLaurent":
        pmin = min(self.pmin, other.pmin)
        qmin = min(self.qmin, other.qmin)
        pmax = max(self.pmin + self.coef.shape[0], other.pmin + other.coef.shape[0])
        qmax = max(self.qmin + self.coef.shape[1], other.qmin + other.coef.shape[1])
        out = np.zeros((pmax - pmin, qmax - qmin), dtype=complex)
        out[self.pmin - pmin : self.pmin - pmin + self.coef.shape[0],
            self.qmin - qmin : self.qmin - qmin + self.coef.shape[1]] += self.coef
        out[other.pmin - pmin : other.pmin - pmin + other.coef.shape[0],
            other.qmin - qmin : other.qmin - qmin + other.coef.shape[1]] -= other.coef
        return BiLaurent(out, pmin, qmin)

    def d_z(self) -> "BiLaurent":
        p = self.pmin + np.arange(self.coef.shape[0])
        return BiLaurent(self.coef * p[:, None], self.pmin - 1, self.qmin)

    def d_w(self) -> "BiLaurent":
        q = self.qmin + np.arange(self.coef.shape[1])
        return BiLaurent(self.coef * q[None, :], self.pmin, self.qmin - 1)

    def divide_z_minus_w(self) -> "BiLaurent":
        """Exact quotient by ``(z - w)``; requires vanishing on ``z = w``.

        Writing ``self = sum_i A_i(w) z^(pmin+i)`` and the quotient as
        ``B = sum_i B_i(w) z^(pmin+i)``, matching powers of z gives
        ``A_i = B_(i-1) - w B_i``, solved from the top power down.  The
        leftover ``A_0 + w B_0`` is the remainder and must vanish.
        """
        A = self.coef
        nP, nQ = A.shape
        if nP < 2:
            if np.max(np.abs(A)) < 1e-13:
                return BiLaurent(np.zeros((1, 1), dtype=complex), self.pmin, self.qmin)
            raise SingularMapError("nothing to divide: constant in z")
        W = nQ + nP
        B = np.zeros((nP - 1, W), dtype=complex)
        B[nP - 2, :nQ] = A[nP - 1]
        for i in range(nP - 2, 0, -1):
            B[i - 1, :nQ] = A[i]
            B[i - 1, 1:] += B[i, :-1]
        rem = np.zeros(W, dtype=complex)
        rem[:nQ] = A[0]
        rem[1:] += B[0, :-1]
        scale = float(np.max(np.abs(A))) or 1.0
        if float(np.max(np.abs(rem))) > 1e-9 * scale:
            raise SingularMapError("polynomial not divisible by z - w")
        return BiLaurent(B, self.pmin, self.qmin)

    def eval(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        shape = np.broadcast(z, w).shape
        acc = np.zeros(shape, dtype=complex)
        for i in range(self.coef.shape[0] - 1, -1, -1):
            acc = acc * z + _polyval(w, self.coef[i])
        out = acc * z**self.pmin if self.pmin else acc
        if self.qmin:
            out = out * w**self.qmin
        return out


def _from_dict(d: dict) -> BiLaurent:
    if not d:
        return BiLaurent(np.zeros((1, 1), dtype=complex), 0, 0)
    ps = [p for p, _ in d]
    qs = [q for _, q in d]
    pmin, pmax = min(ps), max(ps)
    qmin, qmax = min(qs), max(qs)
    arr = np.zeros((pmax - pmin + 1, qmax - qmin + 1), dtype=complex)
    for (p, q), c in d.items():
        arr[p - pmin, q - qmin] = c
    return BiLaurent(arr, pmin, qmin)


class PsiKernel:
    """The ghost kernel of a series map, with stable diagonal behaviour."""

    def __init__(self, psi: PowerSeriesMap):
        self.psi = psi
        coeffs = {int(p): complex(c)
                  for p, c in zip(psi.powers(), psi.coef) if c != 0}
        # divided difference DD(z, w) = (psi(z) - psi(w)) / (z - w)
        num: dict = {}

        def add(p, q, c):
            num[(p, q)] = num.get((p, q), 0) + c

        for k, c in coeffs.items():
            if k >= 1:
                for j in range(k):
                    add(j, k - 1 - j, c)
            elif k <= -1:
                m = -k
                for j in range(m):
                    add(j - m, -1 - j, -c)
        self.DD = _from_dict(num)
        dpsi = {p - 1: p * c for p, c in coeffs.items() if p != 0}
        if not dpsi:
            raise SingularMapError("constant map has no kernel")
        self.psiprime_z = BiLaurent.in_z(dpsi)
        self.psiprime_w = BiLaurent.in_w(dpsi)
        # numerator of K: psi'(w)^2 - psi'(z) DD(z, w); vanishes on z = w
        N = self.psiprime_w * self.psiprime_w - self.psiprime_z * self.DD
        self.R = N.divide_z_minus_w()
        self.D = self.psiprime_z * self.DD
        self.Rz, self.Rw = self.R.d_z(), self.R.d_w()
        self.Dz, self.Dw = self.D.d_z(), self.D.d_w()

    def __call__(self, z, w):
        """Kernel value; stable arbitrarily close to (and on) the diagonal."""
        D = self.D.eval(z, w)
        if np.any(np.abs(D) < 1e-300):
            raise SingularMapError("psi(z) = psi(w) off the diagonal")
        return self.R.eval(z, w) / D

    def d_z(self, z, w):
        R, D = self.R.eval(z, w), self.D.eval(z, w)
        return (self.Rz.eval(z, w) * D - R * self.Dz.eval(z, w)) / D**2

    def d_w(self, z, w):
        R, D = self.R.eval(z, w), self.D.eval(z, w)
        return (self.Rw.eval(z, w) * D - R * self.Dw.eval(z, w)) / D**2

    # closed diagonal values, for cross-checking fitted derivatives
    def diagonal_dz(self, z):
        pre, sch = self.psi.schwarzian(z)
        return -(2.0 / 3.0) * sch + 0.75 * pre**2

    def diagonal_dw(self, z):
        pre, sch = self.psi.schwarzian(z)
        return -(5.0 / 6.0) * sch - 1.5 * pre**2

    def diagonal_combination(self, z):
        """(2 d_z + d_w) K on the diagonal; a pure multiple of the Schwarzian."""
        _, sch = self.psi.schwarzian(z)
        return -(13.0 / 6.0) * sch
