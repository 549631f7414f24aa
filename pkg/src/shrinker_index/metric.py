"""Gaussian-weighted half-plane metric.

The weight on the open half-plane {r > 0} is

    sigma(r, z) = (r / 2) * exp(-(r^2 + z^2) / 4).

Curve length measured in the conformal metric sigma^2 (dr^2 + dz^2) equals
the Gaussian-weighted area of the surface of revolution swept by the curve,
so closed geodesics of this metric are cross-sections of rotationally
symmetric self-shrinkers of mean curvature flow.

A closed polygon is measured with the midpoint rule, one segment at a time:

    dist(a, b) = sigma((a + b) / 2) * |b - a|.

This module supplies sigma, its first and second derivatives, and the exact
gradient and Hessian of dist(a, b) with respect to the four endpoint
coordinates in the order (a_r, a_z, b_r, b_z).  Everything downstream
(geodesic solve, stability operators) is built from these blocks, so the
coordinate ordering here is load-bearing.

Points are numpy arrays whose last axis holds (r, z); all functions
broadcast over leading axes.
"""

import dataclasses

import numpy as np

#: Segments shorter than this are treated as degenerate: the direction
#: vector (b - a)/|b - a| that enters the derivatives is no longer defined.
DEGENERACY_CUTOFF = 1e-14


class DegenerateSegmentError(ValueError):
    """Raised when derivatives are requested for a segment of length ~ 0."""


def sigma(points):
    """Weight sigma(r, z) = (r/2) exp(-(r^2 + z^2)/4).

    `points` has shape (..., 2); returns shape (...).  Well defined for
    r <= 0 too (vanishes at r = 0), though curves must stay at r > 0.
    """
    points = np.asarray(points, dtype=float)
    r = points[..., 0]
    z = points[..., 1]
    return 0.5 * r * np.exp(-0.25 * (r * r + z * z))


def sigma_gradient(points):
    """Gradient (d sigma/dr, d sigma/dz), shape (..., 2)."""
    points = np.asarray(points, dtype=float)
    r = points[..., 0]
    z = points[..., 1]
    e = np.exp(-0.25 * (r * r + z * z))
    out = np.empty(points.shape, dtype=float)
    out[..., 0] = 0.25 * e * (2.0 - r * r)
    out[..., 1] = -0.25 * r * z * e
    return out


def sigma_hessian(points):
    """Second derivatives of sigma, shape (..., 2, 2)."""
    points = np.asarray(points, dtype=float)
    r = points[..., 0]
    z = points[..., 1]
    e = np.exp(-0.25 * (r * r + z * z))
    out = np.empty(points.shape[:-1] + (2, 2), dtype=float)
    out[..., 0, 0] = -0.125 * r * e * (6.0 - r * r)
    out[..., 0, 1] = -0.125 * z * e * (2.0 - r * r)
    out[..., 1, 0] = out[..., 0, 1]
    out[..., 1, 1] = -0.125 * r * e * (2.0 - z * z)
    return out


def segment_distance(a, b):
    """Midpoint-rule weighted length sigma((a+b)/2) |b - a|.

    Broadcasts over leading axes; coincident endpoints give 0.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    mid = 0.5 * (a + b)
    return sigma(mid) * np.linalg.norm(b - a, axis=-1)


@dataclasses.dataclass
class SegmentDerivatives:
    """Value, gradient (4,) and Hessian (4, 4) of dist(a, b).

    Coordinates are ordered (a_r, a_z, b_r, b_z).
    """

    value: float
    gradient: np.ndarray
    hessian: np.ndarray


def segment_blocks(a, b):
    """Derivative blocks of dist(a, b) for stacked segments.

    `a`, `b` have shape (M, 2).  Returns a dict with

        dist   (M,)      segment distances
        grad_a (M, 2)    d dist / d a
        grad_b (M, 2)    d dist / d b
        h_aa   (M, 2, 2) d^2 dist / da da
        h_ab   (M, 2, 2) d^2 dist / da db   (h_ba is its transpose)
        h_bb   (M, 2, 2) d^2 dist / db db

    With c = (a+b)/2, D = |b-a|, u = (b-a)/D, g = grad sigma(c),
    S = hess sigma(c) and P = (I - u u^T)/D:

        grad_a = g D / 2 - sigma(c) u
        grad_b = g D / 2 + sigma(c) u
        h_aa   = S D / 4 - (g u^T + u g^T)/2 + sigma(c) P
        h_ab   = S D / 4 + (g u^T - u g^T)/2 - sigma(c) P
        h_bb   = S D / 4 + (g u^T + u g^T)/2 + sigma(c) P

    Raises DegenerateSegmentError if any segment is shorter than the cutoff.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    diff = b - a
    dist_e = np.linalg.norm(diff, axis=-1)
    if np.any(dist_e < DEGENERACY_CUTOFF):
        raise DegenerateSegmentError(
            "segment length below %.1e" % DEGENERACY_CUTOFF)
    mid = 0.5 * (a + b)
    s = sigma(mid)
    g = sigma_gradient(mid)
    hess_s = sigma_hessian(mid)
    u = diff / dist_e[..., None]

    guT = g[..., :, None] * u[..., None, :]
    ugT = u[..., :, None] * g[..., None, :]
    uuT = u[..., :, None] * u[..., None, :]
    proj = (np.eye(2) - uuT) / dist_e[..., None, None]
    sym = 0.5 * (guT + ugT)
    skew = 0.5 * (guT - ugT)
    quarter = 0.25 * dist_e[..., None, None] * hess_s
    s_proj = s[..., None, None] * proj
    half_gd = 0.5 * g * dist_e[..., None]
    su = s[..., None] * u

    return {
        "dist": s * dist_e,
        "grad_a": half_gd - su,
        "grad_b": half_gd + su,
        "h_aa": quarter - sym + s_proj,
        "h_ab": quarter + skew - s_proj,
        "h_bb": quarter + sym + s_proj,
    }


def segment_derivatives(a, b):
    """Exact gradient and Hessian of dist(a, b) for a single segment.

    Returns SegmentDerivatives with the (a_r, a_z, b_r, b_z) ordering.
    """
    blocks = segment_blocks(np.asarray(a, float)[None, :],
                            np.asarray(b, float)[None, :])
    grad = np.concatenate([blocks["grad_a"][0], blocks["grad_b"][0]])
    hess = np.empty((4, 4))
    hess[:2, :2] = blocks["h_aa"][0]
    hess[:2, 2:] = blocks["h_ab"][0]
    hess[2:, :2] = blocks["h_ab"][0].T
    hess[2:, 2:] = blocks["h_bb"][0]
    return SegmentDerivatives(value=float(blocks["dist"][0]),
                              gradient=grad, hessian=hess)
