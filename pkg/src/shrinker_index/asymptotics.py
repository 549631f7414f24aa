"""Schroedinger-operator asymptotics of the stability spectra.

In unweighted arc length s along the solved cross-section, conjugating the
stability operator by sigma^{1/2} (a Liouville transform) turns -L_k into
-d^2/ds^2 + V_k with the potential

    V_k = (sigma^{-1/2})'' sigma^{1/2} - 1 + (k^2 - 1) / r^2,

primes denoting d/ds.  Two classical eigenvalue laws follow and serve as
independent checks on the computed spectra:

  * high j, fixed k: eigenvalues pair up and grow like free modes on a
    circle of the curve's Euclidean length l(Gamma), shifted by the mean
    of V in arc length,

        lambda_{2j-1} ~ lambda_{2j} ~ (2 pi / l(Gamma))^2 j^2 + avg(V);

    the discrete spectrum falls below this law at large j, with the
    deviation growing like j^4 (the quadratic spectrum of the discrete
    second difference bends down at wavelengths near the grid spacing).

  * high k, low j: V_k develops a single quadratic well near the point of
    largest r, and the low eigenvalues follow the harmonic-oscillator
    ladder

        lambda_j ~ V(s0) + (2j + 1) sqrt(V''(s0) / 2).

Derivatives in s are taken as central differences in the equal-increment
parameter t (dt = l / M) through d/ds = sigma d/dt; the curve must be a
solved geodesic for that identification to hold.
"""

import dataclasses

import numpy as np

from . import curve as curve_mod
from . import metric
from . import spectral
from . import stability


class NoWell(RuntimeError):
    """Raised when the potential has no quadratic well (V'' <= 0)."""


@dataclasses.dataclass
class SchrodingerProfile:
    """Potential V_k along the curve with its well and average data.

    s holds accumulated Euclidean arc length from q_0; V_avg is the
    arc-length average of V; V0, Vpp0 describe the quadratic well at the
    discrete argmin (Vpp0 from a three-point fit in s).
    """

    k: int
    s: np.ndarray
    V: np.ndarray
    V_avg: float
    euclidean_length: float
    argmin_index: int
    V0: float
    Vpp0: float


def _central(arr, dt):
    return (np.roll(arr, -1) - np.roll(arr, 1)) / (2.0 * dt)


def potential_profile(curve, k):
    """Liouville potential V_k sampled at the curve points."""
    pts = curve.points
    s_weight = metric.sigma(pts)
    dt = curve_mod.discrete_length(curve) / curve.M

    w = s_weight ** (-0.5)
    w_prime = s_weight * _central(w, dt)
    w_second = s_weight * _central(w_prime, dt)
    V = w_second * np.sqrt(s_weight) - 1.0 + (k * k - 1.0) / curve.r ** 2

    seg = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg[:-1])])
    euclid = float(seg.sum())
    inv = 1.0 / s_weight
    v_avg = float(np.sum(V * inv) / np.sum(inv))

    m0 = int(np.argmin(V))
    ds_prev = seg[(m0 - 1) % curve.M]
    ds_next = seg[m0]
    v_prev = V[(m0 - 1) % curve.M]
    v_next = V[(m0 + 1) % curve.M]
    # leading coefficient of the parabola through the three points
    lead = (((v_next - V[m0]) / ds_next + (v_prev - V[m0]) / ds_prev)
            / (ds_prev + ds_next))
    return SchrodingerProfile(k=int(k), s=s, V=V, V_avg=v_avg,
                              euclidean_length=euclid, argmin_index=m0,
                              V0=float(V[m0]), Vpp0=float(2.0 * lead))


def high_j_estimate(profile, j):
    """Free-circle law (2 pi j / l)^2 + avg(V) for the pair at level j."""
    return (2.0 * np.pi * j / profile.euclidean_length) ** 2 + profile.V_avg


def high_k_estimate(profile, j):
    """Harmonic-oscillator law V0 + (2j + 1) sqrt(V''/2).

    Raises NoWell when the fitted well curvature is not positive.
    """
    if profile.Vpp0 <= 0.0:
        raise NoWell("potential well curvature %.3e is not positive"
                     % profile.Vpp0)
    return profile.V0 + (2 * j + 1) * np.sqrt(profile.Vpp0 / 2.0)


@dataclasses.dataclass
class DriftDiagnostic:
    """Deviation of lambda_{2j} from the free-circle law per j.

    rows are (j, eigenvalue, estimate, deviation); the fitted exponent of
    |deviation| against j is taken over the largest decade [j_max/10,
    j_max], where the grid-scale bending dominates.
    """

    k: int
    rows: list
    exponent: float
    fit_range: tuple


def drift_diagnostic(curve, k, j_max, eigenvalues=None):
    """Tabulate lambda_{2j} - high_j_estimate(j) and fit its growth.

    `eigenvalues` may pass a precomputed ascending spectrum of -L_k
    (needs at least 2 j_max + 1 entries); otherwise it is computed here.
    """
    if j_max < 10:
        raise ValueError("j_max must be at least 10 for the decade fit")
    profile = potential_profile(curve, k)
    if eigenvalues is None:
        normals = stability.normal_field(curve)
        L0 = stability.assemble_L0(curve, normals)
        Lk = stability.assemble_Lk(L0, curve, k)
        modes = spectral.spectrum(Lk, 2 * j_max + 1)
        eigenvalues = [m.eigenvalue for m in modes]
    if len(eigenvalues) < 2 * j_max + 1:
        raise ValueError("need at least 2 j_max + 1 eigenvalues")

    rows = []
    for j in range(1, j_max + 1):
        est = high_j_estimate(profile, j)
        lam = float(eigenvalues[2 * j])
        rows.append((j, lam, est, lam - est))

    j_lo = max(1, j_max // 10)
    pts = [(j, abs(dev)) for j, _, _, dev in rows
           if j >= j_lo and dev != 0.0]
    x = np.log10([j for j, _ in pts])
    y = np.log10([d for _, d in pts])
    exponent = float(np.polyfit(x, y, 1)[0])
    return DriftDiagnostic(k=int(k), rows=rows, exponent=exponent,
                           fit_range=(j_lo, j_max))


def profile_csv(profile):
    """CSV dump m,s,V of a potential profile."""
    lines = ["m,s,V"]
    for m in range(len(profile.V)):
        lines.append("%d,%.17g,%.17g" % (m, profile.s[m], profile.V[m]))
    return "\n".join(lines) + "\n"


def drift_csv(diag):
    """CSV dump j,lambda,estimate,deviation of a drift diagnostic."""
    lines = ["j,lambda,estimate,deviation"]
    for j, lam, est, dev in diag.rows:
        lines.append("%d,%.17g,%.17g,%.17g" % (j, lam, est, dev))
    return "\n".join(lines) + "\n"
