"""
Batched eigenvalues of symmetric 3x3 matrices.

Closed-form trigonometric solution of the characteristic polynomial. Rows whose
roots are (nearly) coincident fall back to LAPACK, where acos loses accuracy.
"""
import logging

import numpy as np

from mesh_stego.core.metrics import EIGEN_FALLBACKS

logger = logging.getLogger(__name__)

COINCIDENT_R = 1.0 - 1e-6


def eigvalsh3(tensors: np.ndarray, clamp: bool = True) -> np.ndarray:
    """Eigenvalues of (..., 3, 3) symmetric matrices, sorted descending. `clamp` zeroes tiny negatives of PSD input."""
    t = np.asarray(tensors, dtype=np.float64)
    shape = t.shape[:-2]
    a = t.reshape(-1, 3, 3)
    n = a.shape[0]
    out = np.empty((n, 3))

    a00, a11, a22 = a[:, 0, 0], a[:, 1, 1], a[:, 2, 2]
    a01, a02, a12 = a[:, 0, 1], a[:, 0, 2], a[:, 1, 2]
    p1 = a01 * a01 + a02 * a02 + a12 * a12
    q = (a00 + a11 + a22) / 3.0
    d0, d1, d2 = a00 - q, a11 - q, a22 - q
    p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1
    p = np.sqrt(p2 / 6.0)

    diagonal = p1 == 0.0
    safe_p = np.where(p > 0.0, p, 1.0)
    b00, b11, b22 = d0 / safe_p, d1 / safe_p, d2 / safe_p
    b01, b02, b12 = a01 / safe_p, a02 / safe_p, a12 / safe_p
    det = (b00 * (b11 * b22 - b12 * b12)
           - b01 * (b01 * b22 - b12 * b02)
           + b02 * (b01 * b12 - b11 * b02))
    r = det / 2.0
    fallback = ~diagonal & ((p <= 0.0) | (np.abs(r) > COINCIDENT_R))
    closed = ~diagonal & ~fallback

    phi = np.arccos(np.clip(r, -1.0, 1.0)) / 3.0
    e1 = q + 2.0 * p * np.cos(phi)
    e3 = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    e2 = 3.0 * q - e1 - e3
    out[closed] = np.column_stack([e1, e2, e3])[closed]

    if diagonal.any():
        out[diagonal] = np.column_stack([a00, a11, a22])[diagonal]
    if fallback.any():
        count = int(fallback.sum())
        EIGEN_FALLBACKS.inc(count)
        logger.debug(f"eigvalsh3: {count} near-coincident rows solved by LAPACK")
        out[fallback] = np.linalg.eigvalsh(a[fallback])

    out = -np.sort(-out, axis=1)
    if clamp:
        np.maximum(out, 0.0, out=out)
    return out.reshape(shape + (3,))


def eigen_sets(eigenvalues: np.ndarray) -> np.ndarray:
    """(λ1-λ2, λ2-λ3, λ3) from descending eigenvalues (..., 3); result has the set axis first."""
    e = np.asarray(eigenvalues)
    return np.stack([e[..., 0] - e[..., 1], e[..., 1] - e[..., 2], e[..., 2]], axis=0)
