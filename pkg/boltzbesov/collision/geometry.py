"""Post-collision geometry in the sigma-representation."""

import numpy as np

from boltzbesov.errors import ArgumentError

UNIT_TOLERANCE = 1e-12


def post_collision(
    v: np.ndarray, v_star: np.ndarray, sigma: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Post-collision velocities v' and v*'.

    v' = (v + v*)/2 + |v - v*|/2 sigma, v*' = (v + v*)/2 - |v - v*|/2 sigma.
    Inputs broadcast over leading axes; the last axis has length 3.

    Raises:
        ArgumentError: sigma is not a unit vector to 1e-12
    """
    v = np.asarray(v, dtype=float)
    v_star = np.asarray(v_star, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if np.any(np.abs(np.linalg.norm(sigma, axis=-1) - 1.0) > UNIT_TOLERANCE):
        raise ArgumentError("sigma must be a unit vector")
    center = 0.5 * (v + v_star)
    half_gap = 0.5 * np.linalg.norm(v - v_star, axis=-1, keepdims=True)
    return center + half_gap * sigma, center - half_gap * sigma


def collision_frame(k_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal pair (e1, e2) completing unit vectors k_hat of shape (n, 3)."""
    axis = np.zeros_like(k_hat)
    near_z = np.abs(k_hat[:, 2]) > 0.9
    axis[~near_z, 2] = 1.0
    axis[near_z, 0] = 1.0
    e1 = np.cross(axis, k_hat)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    return e1, np.cross(k_hat, e1)


def sigma_vectors(k_hat: np.ndarray, theta: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Unit vectors at polar angle theta from k_hat and azimuth psi.

    Args:
        k_hat: Unit relative directions, shape (n, 3)
        theta: Polar angles, shape (s,)
        psi: Azimuths, shape (s,)

    Returns:
        sigma of shape (n, s, 3)
    """
    e1, e2 = collision_frame(k_hat)
    cos_t = np.cos(theta)[None, :, None]
    sin_t = np.sin(theta)[None, :, None]
    radial = (
        np.cos(psi)[None, :, None] * e1[:, None, :] + np.sin(psi)[None, :, None] * e2[:, None, :]
    )
    return cos_t * k_hat[:, None, :] + sin_t * radial


def relative_direction(v: np.ndarray, v_star: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """|v - v*| and (v - v*)/|v - v*| for distinct velocity pairs."""
    u = v - v_star
    r = np.linalg.norm(u, axis=-1)
    return r, u / r[..., None]
