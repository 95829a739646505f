"""Independent oracle implementations used by the tests.

Everything here is deliberately written against plain arrays or stdlib math,
not against the library's own code paths, so that agreement between the two
is evidence rather than tautology.  The vectorized quaternion arithmetic is
validated against the library in test_group before other tests lean on it.
"""

import numpy as np


def qmul(a, b):
    """Hamilton product on (..., 4) arrays."""
    w1, x1, y1, z1 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    w2, x2, y2, z2 = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ],
        axis=-1,
    )


def qconj(a):
    out = -np.asarray(a).copy()
    out[..., 0] = a[..., 0]
    return out


def haar_array(rng, count):
    """count unit quaternions as an (count, 4) array."""
    q = rng.normal(size=(count, 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)


def commutator_traces(rng, count):
    """tr [A, B] for count independent Haar pairs, vectorized."""
    a, b = haar_array(rng, count), haar_array(rng, count)
    comm = qmul(qmul(qmul(a, b), qconj(a)), qconj(b))
    return 2.0 * comm[..., 0]


def eig_multiset_distance(predicted, computed):
    """Greedy matching distance between two eigenvalue multisets.

    Pairs each computed eigenvalue with its nearest remaining predicted one;
    adequate for tolerances far below the perturbation scale.
    """
    pred = list(np.asarray(predicted, dtype=complex))
    worst = 0.0
    for lam in np.asarray(computed, dtype=complex):
        i = int(np.argmin([abs(lam - p) for p in pred]))
        worst = max(worst, abs(lam - pred.pop(i)))
    return worst


def projective_grid(n_theta, n_phi):
    """Unit vectors (cos t, sin t e^{i p}) covering the projective sphere of
    C^2; global phase is quotiented out by fixing the first coordinate real."""
    th = np.linspace(0.0, np.pi / 2.0, n_theta)
    ph = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    t, p = np.meshgrid(th, ph, indexing="ij")
    return np.stack(
        [np.cos(t).ravel(), (np.sin(t) * np.exp(1j * p)).ravel()], axis=1
    )


def grid_quadratic_min(mats, grid):
    """min over the grid of sum_i ||(M_i - I) v||^2."""
    total = np.zeros(grid.shape[0])
    for m in mats:
        b = m - np.eye(m.shape[0])
        total += (np.abs(grid @ b.T) ** 2).sum(axis=1)
    return float(total.min())


def grid_minmax_min(mats, grid):
    """min over the grid of max_i ||(M_i - I) v||."""
    per = []
    for m in mats:
        b = m - np.eye(m.shape[0])
        per.append(np.sqrt((np.abs(grid @ b.T) ** 2).sum(axis=1)))
    return float(np.max(per, axis=0).min())


def semicircle_cdf_quadrature(t, pieces=262144):
    """CDF of the density (1/2pi) sqrt(4 - s^2) by trapezoid quadrature."""
    s = np.linspace(-2.0, float(t), pieces)
    dens = np.sqrt(np.maximum(4.0 - s * s, 0.0)) / (2.0 * np.pi)
    return float(np.trapezoid(dens, s))


def ks_statistic_vs_cdf(samples, cdf):
    """One-sample Kolmogorov-Smirnov statistic against a callable CDF."""
    xs = np.sort(np.asarray(samples))
    n = xs.size
    cv = cdf(xs)
    upper = np.max(np.arange(1, n + 1) / n - cv)
    lower = np.max(cv - np.arange(0, n) / n)
    return float(max(upper, lower))
