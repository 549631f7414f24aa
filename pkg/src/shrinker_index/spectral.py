"""Spectra of the discrete stability operators and the Morse index.

Eigenvalues follow the geometer's sign convention -L u = lambda u, so
instabilities are negative.  Low-lying modes of the solved curve recover
the geometric variations exactly known for self-shrinkers:

    k = 0   dilation              <q_m, n_m> / 2      lambda = -1
    k = 0   vertical translation  n_{m,z}             lambda = -1/2
    k = 1   horizontal translation n_{m,r}            lambda = -1/2
    k = 1   rotation               z_m n_{m,r} - r_m n_{m,z}   lambda = 0
    k = 1   1/sigma                sigma(q_m)^{-1}     lambda = -1

The Morse index counts negative eigenvalues over all Fourier modes (modes
with k >= 1 count twice, for the cos and sin branches) and then excludes
the one dilation and the three translations, which are negative directions
of every self-shrinker and carry no geometric information.
"""

import dataclasses
import json

import numpy as np
import scipy.linalg

from . import metric
from . import stability

#: |cosine| threshold for matching an eigenfunction to a known template.
CLASSIFY_COSINE = 0.999

#: The k loop of the index computation stops once the smallest eigenvalue
#: clears this margin; eigenvalues grow monotonically with k.
INDEX_STOP_MARGIN = 1e-3


class ExclusionMismatch(RuntimeError):
    """Raised when the expected dilation/translation modes are not found."""


@dataclasses.dataclass
class EigenMode:
    """One eigenpair of -L_k: unit eigenvector, canonical sign."""

    k: int
    j: int
    eigenvalue: float
    vector: np.ndarray
    residual: float
    label: str = "generic"


def _cyclic_bands(entries):
    """Diagonal and cyclic superdiagonal if the matrix is banded, else None.

    up[m] = A[m, m+1 mod M]; up[-1] is the corner entry.
    """
    m = entries.shape[0]
    i = np.arange(m)
    rest = entries.copy()
    rest[i, i] = 0.0
    rest[i, (i + 1) % m] = 0.0
    rest[(i + 1) % m, i] = 0.0
    if rest.any():
        return None
    return entries[i, i], entries[i, (i + 1) % m]


def _band_matvec(diag, up, vecs):
    """A @ vecs for the cyclic tridiagonal bands, any dtype."""
    return (diag[:, None] * vecs
            + up[:, None] * np.roll(vecs, -1, axis=0)
            + np.roll(up, 1)[:, None] * np.roll(vecs, 1, axis=0))


def _cyclic_solve(diag, up, shifts, rhs):
    """Solve (A - shift_j I) x_j = rhs_j for each column, extended precision.

    Thomas elimination plus a Sherman-Morrison correction for the cyclic
    corner; near-zero pivots are bumped (the shifts sit on eigenvalues, so
    the systems are deliberately near singular and the solutions are only
    used as inverse-iteration directions).
    """
    ld = np.longdouble
    m = len(diag)
    b = diag[:, None] - shifts[None, :]
    corner = up[-1]
    gamma = np.where(np.abs(b[0]) > 1e-300, -b[0], ld(-1.0))
    b_mod = b.copy()
    b_mod[0] = b[0] - gamma
    b_mod[-1] = b[-1] - (corner * corner) / gamma

    work = np.empty((m,) + rhs.shape[1:] + (2,), dtype=ld)
    work[..., 0] = rhs
    work[..., 1] = 0.0
    work[0, :, 1] = gamma
    work[-1, :, 1] = corner

    piv = np.empty_like(b)
    piv[0] = b_mod[0]
    for row in range(1, m):
        factor = up[row - 1] / piv[row - 1]
        piv[row] = b_mod[row] - factor * up[row - 1]
        work[row] -= factor[:, None] * work[row - 1]
    piv = np.where(np.abs(piv) < 1e-300, ld(1e-300), piv)

    sol = np.empty_like(work)
    sol[-1] = work[-1] / piv[-1][:, None]
    for row in range(m - 2, -1, -1):
        sol[row] = (work[row] - up[row] * sol[row + 1]) / piv[row][:, None]

    y = sol[..., 0]
    q = sol[..., 1]
    v_y = y[0] + (corner / gamma) * y[-1]
    v_q = q[0] + (corner / gamma) * q[-1]
    return y - q * (v_y / (1.0 + v_q))[None, :]


def _refine_pairs(diag, up, vals, vecs, steps=2):
    """Polish eigenpairs by inverse iteration in extended precision.

    LAPACK pairs carry residual ~ eps ||A||, which at M = 2048 exceeds the
    1e-10 contract (||A|| ~ 1e6 there).  Two inverse-iteration steps on the
    cyclic tridiagonal bands in 80-bit arithmetic push the pair to the
    limit a float64 vector can represent; the reported eigenvalue is the
    Rayleigh quotient of the returned float64 vector and the residual its
    true residual, both evaluated in extended precision.
    """
    ld = np.longdouble
    diag_ld = diag.astype(ld)
    up_ld = up.astype(ld)
    work = vecs.astype(ld)
    shifts = vals.astype(ld) + ld(1e-13)
    for _ in range(steps):
        # the solves are deliberately near singular; a column that blows
        # up keeps its previous iterate
        with np.errstate(all="ignore"):
            trial = _cyclic_solve(diag_ld, up_ld, shifts, work)
            norms = np.sqrt(np.einsum("mj,mj->j", trial, trial))
            good = np.isfinite(norms) & (norms > 0.0)
            good &= np.all(np.isfinite(trial), axis=0)
            work = np.where(good[None, :], trial / norms[None, :], work)
        shifts = np.einsum("mj,mj->j", work,
                           _band_matvec(diag_ld, up_ld, work))
    out = work.astype(float)
    out = out / np.linalg.norm(out, axis=0)
    out_ld = out.astype(ld)
    av = _band_matvec(diag_ld, up_ld, out_ld)
    lam = np.einsum("mj,mj->j", out_ld, av)
    resid = np.linalg.norm((av - lam[None, :] * out_ld).astype(float), axis=0)
    return lam.astype(float), out, resid


def spectrum(matrix, count):
    """Lowest `count` eigenpairs of a StabilityMatrix, ascending.

    Dense symmetric solve, then an extended-precision polish of each pair
    (the operators are cyclic tridiagonal, so the polish is O(M) per
    mode).  Eigenvectors are unit norm with the largest-magnitude entry
    positive; residual is the true ||A u - lambda u||_2 of the returned
    pair.
    """
    if count < 1 or count > matrix.M:
        raise ValueError("count must be in 1..M")
    vals, vecs = scipy.linalg.eigh(matrix.entries,
                                   subset_by_index=(0, count - 1))
    bands = _cyclic_bands(matrix.entries)
    if bands is not None:
        vals, vecs, resids = _refine_pairs(bands[0], bands[1], vals, vecs)
    else:
        resids = np.linalg.norm(matrix.entries @ vecs - vecs * vals[None, :],
                                axis=0)
    order = np.argsort(vals, kind="stable")
    modes = []
    for j, col in enumerate(order):
        u = vecs[:, col]
        if u[np.argmax(np.abs(u))] < 0.0:
            u = -u
        modes.append(EigenMode(k=matrix.k, j=j, eigenvalue=float(vals[col]),
                               vector=u, residual=float(resids[col])))
    return modes


def _templates(k, curve, normals):
    """Known eigenfunction shapes restricted to Fourier mode k."""
    n = normals.normals
    pts = curve.points
    if k == 0:
        return {
            "dilation": 0.5 * np.einsum("mi,mi->m", pts, n),
            "vertical_translation": n[:, 1],
        }
    if k == 1:
        return {
            "horizontal_translation": n[:, 0],
            "rotation": pts[:, 1] * n[:, 0] - pts[:, 0] * n[:, 1],
            "sigma_inverse": 1.0 / metric.sigma(pts),
        }
    return {}


def classify(mode, curve, normals):
    """Label an eigenmode by cosine against the known geometric variations.

    Returns one of dilation, vertical_translation, horizontal_translation,
    rotation, sigma_inverse, generic.  Templates are matched only within
    the mode's own k.
    """
    best_label = "generic"
    best_cos = CLASSIFY_COSINE
    for label, shape in _templates(mode.k, curve, normals).items():
        cos = abs(float(np.dot(mode.vector, shape))) / np.linalg.norm(shape)
        if cos >= best_cos:
            best_cos = cos
            best_label = label
    return best_label


def classify_modes(modes, curve, normals):
    """Label a list of modes in place; returns the list."""
    for mode in modes:
        mode.label = classify(mode, curve, normals)
    return modes


def spectrum_report(curve, modes):
    """JSON-ready dict for one k: eigenvalues, labels, residuals."""
    if not modes:
        raise ValueError("empty spectrum")
    return {
        "M": curve.M,
        "k": modes[0].k,
        "eigenvalues": [m.eigenvalue for m in modes],
        "labels": [m.label for m in modes],
        "residuals": [m.residual for m in modes],
    }


@dataclasses.dataclass
class IndexReport:
    """Morse index bookkeeping across Fourier modes.

    per_k: list of (k, negative eigenvalues at that k).
    excluded: dilation/translation modes removed from the count, with the
    multiplicity they carry (2 for k >= 1).
    total_negative: negatives counted with multiplicity.
    index: total_negative minus the excluded multiplicities.
    """

    per_k: list
    excluded: list
    total_negative: int
    index: int

    def to_json(self):
        return json.dumps({
            "per_k": [{"k": k, "negative_eigenvalues": vals}
                      for k, vals in self.per_k],
            "excluded": self.excluded,
            "total": self.total_negative,
            "index": self.index,
        }, indent=2)


def compute_index(curve, count=8, stop_margin=INDEX_STOP_MARGIN, k_cap=64):
    """Morse index of the solved curve, excluding dilation and translations.

    Walks k = 0, 1, 2, ... until the smallest eigenvalue exceeds
    stop_margin (they are monotone in k), counting negative eigenvalues
    with multiplicity.  Raises ExclusionMismatch unless exactly one
    negative dilation mode (k = 0), one negative vertical translation
    (k = 0) and one negative horizontal translation (k = 1, multiplicity
    2) are found.
    """
    normals = stability.normal_field(curve)
    L0 = stability.assemble_L0(curve, normals)
    per_k = []
    excluded = []
    found = {"dilation": 0, "vertical_translation": 0,
             "horizontal_translation": 0}
    total = 0
    for k in range(k_cap + 1):
        modes = spectrum(stability.assemble_Lk(L0, curve, k), count)
        classify_modes(modes, curve, normals)
        mult = 1 if k == 0 else 2
        negative = [m for m in modes if m.eigenvalue < 0.0]
        per_k.append((k, [m.eigenvalue for m in negative]))
        total += mult * len(negative)
        for m in negative:
            if m.label in found:
                found[m.label] += 1
                excluded.append({"k": k, "j": m.j,
                                 "eigenvalue": m.eigenvalue,
                                 "label": m.label, "multiplicity": mult})
        if modes[0].eigenvalue >= stop_margin:
            break
    else:
        raise ExclusionMismatch("negative modes persist beyond k = %d" % k_cap)

    if (found["dilation"] != 1 or found["vertical_translation"] != 1
            or found["horizontal_translation"] != 1):
        raise ExclusionMismatch(
            "expected one dilation and three translation modes, found %r"
            % found)
    excluded_mult = sum(e["multiplicity"] for e in excluded)
    return IndexReport(per_k=per_k, excluded=excluded,
                       total_negative=total, index=total - excluded_mult)
