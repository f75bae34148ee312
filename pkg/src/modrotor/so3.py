"""Rotation-group utilities shared across the package.

Rotations are plain 3x3 numpy arrays acting on column vectors; angles are
radians. Matrices are used everywhere instead of quaternions so the algebra
stays directly readable against the dynamics and control expressions.
"""

from __future__ import annotations

import numpy as np

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])

# Below this angle the Rodrigues formula divides by a vanishing norm; fall
# back to the second-order series.
_TAYLOR_ANGLE = 1e-8


def rot_x(angle: float) -> np.ndarray:
    """Right-handed rotation about the x-axis."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(angle: float) -> np.ndarray:
    """Right-handed rotation about the y-axis."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(angle: float) -> np.ndarray:
    """Right-handed rotation about the z-axis."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


_ROT = {"x": rot_x, "y": rot_y, "z": rot_z}


def rot_axis_angle(axis: str, angle: float) -> np.ndarray:
    """Rotation about a principal axis named "x", "y" or "z"."""
    if not np.isfinite(angle):
        raise ValueError(f"angle must be finite, got {angle!r}")
    try:
        return _ROT[axis](angle)
    except KeyError:
        raise ValueError(f"unknown axis {axis!r}, expected 'x', 'y' or 'z'") from None


def cross3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cross product of two 3-vectors; avoids np.cross call overhead in hot loops."""
    return np.array(
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    )


def hat(v: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix of v, so that hat(v) @ w == cross(v, w)."""
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def vee(m: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Vector of a skew-symmetric matrix; inverse of :func:`hat`.

    Raises ValueError when ``m`` is not skew-symmetric within ``tol``, which
    signals a malformed attitude-error matrix upstream.
    """
    m = np.asarray(m, dtype=float)
    if np.linalg.norm(m + m.T) >= tol:
        raise ValueError("matrix is not skew-symmetric; cannot apply vee map")
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def exp_map(v: np.ndarray) -> np.ndarray:
    """Rodrigues rotation for the rotation vector v (axis times angle)."""
    v = np.asarray(v, dtype=float)
    angle = np.linalg.norm(v)
    k = hat(v)
    if angle < _TAYLOR_ANGLE:
        return np.eye(3) + k + 0.5 * (k @ k)
    return np.eye(3) + (np.sin(angle) / angle) * k + ((1.0 - np.cos(angle)) / angle**2) * (k @ k)


def is_rotation(r: np.ndarray, tol: float = 1e-9) -> bool:
    """True when r is orthonormal with determinant +1 within tol."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3) or not np.all(np.isfinite(r)):
        return False
    return (
        np.linalg.norm(r @ r.T - np.eye(3)) < tol
        and abs(np.linalg.det(r) - 1.0) < tol
    )


def orthonormalize(r: np.ndarray) -> np.ndarray:
    """Nearest rotation matrix in the Frobenius sense (polar projection)."""
    u, _, vt = np.linalg.svd(r)
    out = u @ vt
    if np.linalg.det(out) < 0.0:
        u[:, -1] = -u[:, -1]
        out = u @ vt
    return out


def rotation_angle(ra: np.ndarray, rb: np.ndarray | None = None) -> float:
    """Geodesic angle in radians between two rotations (rb defaults to identity)."""
    m = ra if rb is None else ra.T @ rb
    return float(np.arccos(np.clip((np.trace(m) - 1.0) / 2.0, -1.0, 1.0)))
