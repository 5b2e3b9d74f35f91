"""Direct sampling of interaural cues plus histogram / distance tools.

Gaussian variates come from numpy's PCG64 generator (ziggurat normals).
Samples are drawn in fixed blocks of ``BLOCK_SIZE``; block ``k`` is seeded
with ``SeedSequence(seed, spawn_key=(k,))``, so any partition of the blocks
across workers reproduces the same stream bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .stimulus import InterauralSample, StimulusParams

__all__ = [
    "BLOCK_SIZE",
    "InterauralSamples",
    "Histogram",
    "noise_block",
    "sample_noise",
    "cues_from_noise",
    "sample_interaural",
    "histogram_1d",
    "histogram_2d",
    "ks_statistic",
    "ks_two_sample",
    "tv_distance",
    "cell_probabilities_density",
    "cell_probabilities_pow_ipd",
]

BLOCK_SIZE = 1 << 20


@dataclass
class InterauralSamples:
    """Vector of interaural cue samples stored column-wise."""

    iar_r: np.ndarray
    ipd_phi: np.ndarray
    ild_db: np.ndarray
    power_p: np.ndarray

    def __len__(self):
        return self.iar_r.size

    def __getitem__(self, i) -> InterauralSample:
        return InterauralSample(float(self.iar_r[i]), float(self.ipd_phi[i]),
                                float(self.ild_db[i]), float(self.power_p[i]))


def noise_block(seed: int, block: int, size: int = BLOCK_SIZE) -> np.ndarray:
    """Unit-variance normals of block ``block``: shape (2, size) for x and y."""
    ss = np.random.SeedSequence(seed, spawn_key=(block,))
    rng = np.random.Generator(np.random.PCG64(ss))
    return rng.standard_normal((2, size))


def sample_noise(n: int, seed: int, variance: float = 1.0, *,
                 first_block: int = 0):
    """Draw ``n`` i.i.d. pairs (x, y) ~ N(0, variance) starting at a block."""
    if n < 1:
        raise ValueError("need at least one sample")
    nblocks = -(-n // BLOCK_SIZE)
    xy = np.concatenate([noise_block(seed, first_block + k) for k in range(nblocks)],
                        axis=1)[:, :n]
    xy *= math.sqrt(variance)
    return xy[0], xy[1]


def cues_from_noise(params: StimulusParams, x, y) -> InterauralSamples:
    """Cues of one noise instant (x, y) under the tone.

    ``z_a = (x + C cos(psi/2)) + i (y + C sin(psi/2))`` and ``z_b`` likewise
    with ``-psi/2``; r = |z_a / z_b|, dphi = arg(z_a conj(z_b)),
    p' = |z_a| |z_b|.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c, half = params.tone_amplitude_c, params.tone_ipd_psi / 2.0
    re = x + c * math.cos(half)
    ya = y + c * math.sin(half)
    yb = y - c * math.sin(half)
    amp_a = np.hypot(re, ya)
    amp_b = np.hypot(re, yb)
    # z_a conj(z_b) = re^2 + ya*yb + i re (ya - yb)
    phi = np.arctan2(re * (ya - yb), re * re + ya * yb)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = amp_a / amp_b
        ild = 20.0 * np.log10(r)
    return InterauralSamples(np.atleast_1d(r), np.atleast_1d(phi),
                             np.atleast_1d(ild), np.atleast_1d(amp_a * amp_b))


def sample_interaural(params: StimulusParams, n: int, seed: int) -> InterauralSamples:
    """``n`` i.i.d. cue samples; bit-identical for a fixed ``seed``."""
    if n < 1:
        raise ValueError("empty sample request")
    x, y = sample_noise(n, seed, params.noise_variance)
    return cues_from_noise(params, x, y)


@dataclass
class Histogram:
    """Uniform-bin histogram in one or two dimensions.

    ``total`` counts every sample offered, including those outside the
    binned range, so ``probabilities`` are absolute.
    """

    edges: tuple
    counts: np.ndarray
    total: int

    @property
    def in_range(self) -> int:
        return int(self.counts.sum())

    @property
    def cell_volume(self) -> np.ndarray:
        widths = [np.diff(e) for e in self.edges]
        if len(widths) == 1:
            return widths[0]
        return np.outer(widths[0], widths[1])

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.total

    @property
    def density(self) -> np.ndarray:
        """Density normalized over the binned range."""
        return self.counts / (self.in_range * self.cell_volume)


def histogram_1d(data, range, bins: int) -> Histogram:
    data = np.asarray(data, dtype=float).ravel()
    counts, edges = np.histogram(data, bins=bins, range=range)
    return Histogram((edges,), counts, data.size)


def histogram_2d(x, y, range, bins) -> Histogram:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    counts, ex, ey = np.histogram2d(x, y, bins=bins, range=range)
    return Histogram((ex, ey), counts, x.size)


def ks_statistic(samples, cdf) -> float:
    """Kolmogorov-Smirnov distance between raw samples and a model CDF."""
    xs = np.sort(np.asarray(samples, dtype=float).ravel())
    n = xs.size
    F = np.clip(np.asarray(cdf(xs), dtype=float), 0.0, 1.0)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_two_sample(a, b) -> float:
    from scipy.stats import ks_2samp
    return float(ks_2samp(np.ravel(a), np.ravel(b)).statistic)


def cell_probabilities_density(density, edges1, edges2, nodes: int = 6) -> np.ndarray:
    """Probability of each grid cell for a 2-D density, by tensor Gauss-Legendre."""
    t, w = np.polynomial.legendre.leggauss(nodes)

    def points(edges):
        e = np.asarray(edges, dtype=float)
        mid, half = 0.5 * (e[1:] + e[:-1]), 0.5 * np.diff(e)
        return mid[:, None] + half[:, None] * t, half[:, None] * w

    x, wx = points(edges1)
    y, wy = points(edges2)
    X = x[:, None, :, None]
    Y = y[None, :, None, :]
    vals = np.asarray(density(X, Y), dtype=float)
    vals = np.where(np.isfinite(vals), vals, 0.0)
    weights = wx[:, None, :, None] * wy[None, :, None, :]
    return (vals * weights).sum(axis=(2, 3))


def _pow_inner(params, lo, hi, phi, t, w):
    """Integral of the (p', dphi) joint over p' in [lo, min(hi, p_hat)] at each
    ``phi``; uses ``p' = p_hat - u^2`` wherever the boundary is close."""
    from .stimulus import joint_pow_ipd_pdf, pow_ipd_regular_part, support_p_hat

    p_hat = support_p_hat(params, phi)
    top = np.minimum(hi, p_hat)
    active = top > lo
    near = active & (top > 0.5 * p_hat)
    out = np.zeros_like(phi)

    far = active & ~near
    if far.any():
        pm, ph = 0.5 * (lo + top[far]), 0.5 * (top[far] - lo)
        P = pm[:, None] + ph[:, None] * t
        f = joint_pow_ipd_pdf(params, P, np.broadcast_to(phi[far][:, None], P.shape),
                              outside=0.0)
        out[far] = (f * w).sum(axis=1) * ph
    if near.any():
        ph_ = p_hat[near]
        ua = np.sqrt(np.maximum(ph_ - top[near], 0.0))
        ub = np.sqrt(np.maximum(ph_ - lo, 0.0))
        um, uh = 0.5 * (ua + ub), 0.5 * (ub - ua)
        U = um[:, None] + uh[:, None] * t
        P = np.maximum(ph_[:, None] - U * U, 0.0)
        reg = pow_ipd_regular_part(params, P, np.broadcast_to(phi[near][:, None], P.shape))
        out[near] = 2.0 * (reg * w).sum(axis=1) * uh
    return out


def cell_probabilities_pow_ipd(params: StimulusParams, p_edges, phi_edges,
                               nodes: int = 10) -> np.ndarray:
    """Cell probabilities of the (p', dphi) joint on a ``p_edges x phi_edges`` grid.

    Each row of cells is split in dphi where the support boundary enters
    or leaves it; the pieces use Gauss-Legendre nodes mapped through
    ``(1 - cos(pi t)) / 2``, which absorbs the square-root behavior at
    those split points.
    """
    from .stimulus import support_phi_hat

    t, w = np.polynomial.legendre.leggauss(nodes)
    # endpoint-clustering map of [-1, 1] onto [0, 1] and its derivative
    m = 0.5 * (1.0 - np.cos(0.5 * np.pi * (t + 1.0)))
    dm = 0.25 * np.pi * np.sin(0.5 * np.pi * (t + 1.0))
    pe = np.asarray(p_edges, dtype=float)
    fe = np.asarray(phi_edges, dtype=float)
    out = np.zeros((pe.size - 1, fe.size - 1))
    for i, (lo, hi) in enumerate(zip(pe[:-1], pe[1:])):
        cuts = []
        for pv in (lo, hi):
            if pv > 0:
                h = float(support_phi_hat(params, pv))
                cuts += [-h, h]
        pts = np.unique(np.concatenate([fe, [c for c in cuts if fe[0] < c < fe[-1]]]))
        a, b = pts[:-1], pts[1:]
        phi = a[:, None] + (b - a)[:, None] * m
        wt = (b - a)[:, None] * dm * w
        g = _pow_inner(params, lo, hi, phi.ravel(), t, w).reshape(phi.shape)
        piece_mass = (g * wt).sum(axis=1)
        cell = np.searchsorted(fe, 0.5 * (a + b)) - 1
        np.add.at(out[i], cell, piece_mass)
    return out


def tv_distance(hist: Histogram, model) -> float:
    """Total-variation distance between a histogram and a model.

    ``model`` is either an array of model cell probabilities (same shape as
    the counts) or a density callable ``f(x, y)`` / ``f(x)``. Mass outside
    the binned range is compared as one extra cell.
    """
    if callable(model):
        if len(hist.edges) == 2:
            probs = cell_probabilities_density(model, *hist.edges)
        else:
            t, w = np.polynomial.legendre.leggauss(8)
            e = hist.edges[0]
            mid, half = 0.5 * (e[1:] + e[:-1]), 0.5 * np.diff(e)
            probs = (model(mid[:, None] + half[:, None] * t) * w).sum(axis=1) * half
    else:
        probs = np.asarray(model, dtype=float)
    emp = hist.probabilities
    if probs.shape != emp.shape:
        raise ValueError("model and histogram shapes differ")
    outside_emp = 1.0 - hist.in_range / hist.total
    outside_model = max(0.0, 1.0 - float(probs.sum()))
    return 0.5 * (float(np.abs(emp - probs).sum()) + abs(outside_emp - outside_model))
