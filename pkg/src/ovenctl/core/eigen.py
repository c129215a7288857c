"""Eigenvalues of small dense real matrices.

Householder reduction to upper Hessenberg form followed by Francis double-shift
QR sweeps. Converged 1x1 and 2x2 trailing blocks are deflated, the latter
resolved in closed form.
"""
import logging
import math

import numpy as np

from ovenctl.core.linalg import ArrayLike, NoConvergence, Spectrum, _require_square, as_matrix

logger = logging.getLogger(__name__)

DEFLATION_RTOL = 1e-12
MAX_SWEEPS = 100
EXCEPTIONAL_SHIFT_EVERY = 10


def hessenberg(a: ArrayLike) -> np.ndarray:
    """Orthogonally similar upper Hessenberg form of ``a``."""
    h = np.array(as_matrix(a, "a"))
    _require_square(h, "a")
    n = h.shape[0]

    for k in range(n - 2):
        x = h[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        v = x.copy()
        v[0] += alpha if x[0] >= 0 else -alpha
        v /= np.linalg.norm(v)
        h[k + 1:, k:] -= 2.0 * np.outer(v, v @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0

    return h


def _sign(a: float, b: float) -> float:
    return abs(a) if b >= 0.0 else -abs(a)


def eigenvalues(a: ArrayLike) -> Spectrum:
    """
    All eigenvalues of a real square matrix.

    Raises:
        NoConvergence: if an eigenvalue is not deflated within 100 QR sweeps.
    """
    h = hessenberg(a)
    n = h.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)

    anorm = float(np.sum(np.abs(np.triu(h, -1))))
    nn = n - 1
    shift = 0.0

    while nn >= 0:
        its = 0
        while True:
            # Look for a negligible subdiagonal element.
            for l in range(nn, 0, -1):
                s = abs(h[l - 1, l - 1]) + abs(h[l, l])
                if s == 0.0:
                    s = anorm
                if abs(h[l, l - 1]) <= DEFLATION_RTOL * s:
                    h[l, l - 1] = 0.0
                    break
            else:
                l = 0

            x = h[nn, nn]
            if l == nn:
                wr[nn] = x + shift
                wi[nn] = 0.0
                nn -= 1
                break

            y = h[nn - 1, nn - 1]
            w = h[nn, nn - 1] * h[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += shift
                if q >= 0.0:
                    z = p + _sign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break

            if its == MAX_SWEEPS:
                raise NoConvergence(f"eigenvalue {nn} not deflated after {MAX_SWEEPS} QR sweeps")
            if its > 0 and its % EXCEPTIONAL_SHIFT_EVERY == 0:
                shift += x
                for i in range(nn + 1):
                    h[i, i] -= x
                s = abs(h[nn, nn - 1]) + abs(h[nn - 1, nn - 2])
                x = y = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            _francis_sweep(h, l, nn, x, y, w)

    spectrum = Spectrum(tuple(complex(r, i) for r, i in zip(wr, wi)))
    logger.debug("eigenvalues: %s", spectrum.eigenvalues)
    return spectrum


def _francis_sweep(h: np.ndarray, l: int, nn: int, x: float, y: float, w: float):
    """One implicit double-shift QR sweep on the active block ``h[l:nn+1, l:nn+1]``."""
    # Find two consecutive small subdiagonals to start the bulge.
    for m in range(nn - 2, l - 1, -1):
        z = h[m, m]
        r = x - z
        s = y - z
        p = (r * s - w) / h[m + 1, m] + h[m, m + 1]
        q = h[m + 1, m + 1] - z - r - s
        r = h[m + 2, m + 1]
        s = abs(p) + abs(q) + abs(r)
        p /= s
        q /= s
        r /= s
        if m == l:
            break
        u = abs(h[m, m - 1]) * (abs(q) + abs(r))
        v = abs(p) * (abs(h[m - 1, m - 1]) + abs(z) + abs(h[m + 1, m + 1]))
        if u <= np.finfo(float).eps * v:
            break

    for i in range(m + 2, nn + 1):
        h[i, i - 2] = 0.0
        if i != m + 2:
            h[i, i - 3] = 0.0

    for k in range(m, nn):
        if k != m:
            p = h[k, k - 1]
            q = h[k + 1, k - 1]
            r = h[k + 2, k - 1] if k != nn - 1 else 0.0
            x = abs(p) + abs(q) + abs(r)
            if x != 0.0:
                p /= x
                q /= x
                r /= x
        s = _sign(math.sqrt(p * p + q * q + r * r), p)
        if s == 0.0:
            continue
        if k == m:
            if l != m:
                h[k, k - 1] = -h[k, k - 1]
        else:
            h[k, k - 1] = -s * x
        p += s
        x = p / s
        y = q / s
        z = r / s
        q /= p
        r /= p

        for j in range(k, nn + 1):
            p = h[k, j] + q * h[k + 1, j]
            if k != nn - 1:
                p += r * h[k + 2, j]
                h[k + 2, j] -= p * z
            h[k + 1, j] -= p * y
            h[k, j] -= p * x

        for i in range(l, min(nn, k + 3) + 1):
            p = x * h[i, k] + y * h[i, k + 1]
            if k != nn - 1:
                p += z * h[i, k + 2]
                h[i, k + 2] -= p * r
            h[i, k + 1] -= p * q
            h[i, k] -= p
