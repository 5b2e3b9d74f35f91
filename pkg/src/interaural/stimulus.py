"""Closed-form joint densities of interaural cues for an N0S_psi stimulus.

A tone of amplitude ``C`` is added to diotic Gaussian noise of variance
``sigma^2`` with phase ``+psi/2`` in one ear and ``-psi/2`` in the other.
Two joint densities are provided:

* ``joint_r_ipd_pdf``   -- interaural amplitude ratio ``r`` and phase ``dphi``
* ``joint_pow_ipd_pdf`` -- envelope product ``p`` and phase ``dphi``

All densities are evaluated in log space and broadcast over numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ParameterError",
    "DegenerateStimulusError",
    "StimulusParams",
    "InterauralSample",
    "PdfGrid",
    "GRID_SENTINEL",
    "joint_r_ipd_pdf",
    "joint_pow_ipd_pdf",
    "pow_ipd_regular_part",
    "in_pow_support",
    "support_p_hat",
    "support_phi_hat",
    "ild_from_iar",
    "iar_from_ild",
    "joint_grid",
]

#: value written into exported grids where a density is undefined
GRID_SENTINEL = -1.0

_PHI_SLACK = 1e-12


class ParameterError(ValueError):
    """Raised for parameters outside the domain of the densities."""


class DegenerateStimulusError(ParameterError):
    """Tone IPD of zero (or zero tone amplitude): the cue densities collapse
    to delta distributions and cannot be evaluated."""


def _wrap_angle(a: float) -> float:
    """Map an angle into (-pi, pi]."""
    w = math.remainder(a, 2.0 * math.pi)
    if w <= -math.pi:
        w = math.pi
    return w


@dataclass(frozen=True)
class StimulusParams:
    """Tone amplitude ``C``, tone IPD ``psi`` (radians) and noise variance.

    ``psi`` is normalized into (-pi, pi]; ``psi == 0`` is rejected.
    """

    tone_amplitude_c: float
    tone_ipd_psi: float
    noise_variance: float = 1.0

    def __post_init__(self):
        c, psi, var = (float(self.tone_amplitude_c), float(self.tone_ipd_psi),
                       float(self.noise_variance))
        if not (math.isfinite(c) and math.isfinite(psi) and math.isfinite(var)):
            raise ParameterError("stimulus parameters must be finite")
        if c < 0:
            raise ParameterError(f"tone amplitude must be positive, got {c}")
        if var <= 0:
            raise ParameterError(f"noise variance must be positive, got {var}")
        psi = _wrap_angle(psi)
        if c == 0 or psi == 0.0:
            raise DegenerateStimulusError(
                "psi = 0 or C = 0 gives delta-distributed cues")
        object.__setattr__(self, "tone_amplitude_c", c)
        object.__setattr__(self, "tone_ipd_psi", psi)
        object.__setattr__(self, "noise_variance", var)

    @classmethod
    def from_snr_db(cls, snr_db: float, psi: float,
                    noise_variance: float = 1.0) -> "StimulusParams":
        """Build parameters from SNR = C^2 / (2 sigma^2) given in dB."""
        c2 = 2.0 * noise_variance * 10.0 ** (snr_db / 10.0)
        return cls(math.sqrt(c2), psi, noise_variance)

    @property
    def c2(self) -> float:
        return self.tone_amplitude_c ** 2

    @property
    def snr(self) -> float:
        return self.c2 / (2.0 * self.noise_variance)

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.snr)

    @property
    def sin2_half_psi(self) -> float:
        return math.sin(self.tone_ipd_psi / 2.0) ** 2

    @property
    def s2(self) -> float:
        """Squared quadrature tone component ``C^2 sin^2(psi/2)``."""
        return self.c2 * self.sin2_half_psi

    def reflected(self) -> "StimulusParams":
        return StimulusParams(self.tone_amplitude_c, -self.tone_ipd_psi,
                              self.noise_variance)


@dataclass(frozen=True)
class InterauralSample:
    iar_r: float
    ipd_phi: float
    ild_db: float
    power_p: float


@dataclass
class PdfGrid:
    """Density evaluated on a rectangular grid; ``values[i, j]`` belongs to
    ``(axis1[i], axis2[j])``. Undefined cells hold ``GRID_SENTINEL``."""

    axis1_name: str
    axis2_name: str
    axis1: np.ndarray
    axis2: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.axis1 = np.asarray(self.axis1, dtype=float)
        self.axis2 = np.asarray(self.axis2, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.axis1.size, self.axis2.size):
            raise ValueError("grid values do not match axis lengths")
        for ax in (self.axis1, self.axis2):
            if ax.size > 1 and np.any(np.diff(ax) <= 0):
                raise ValueError("grid axes must be strictly increasing")
        if np.isnan(self.values).any():
            raise ValueError("grid values must be NaN-free")
        bad = (self.values < 0) & (self.values != GRID_SENTINEL)
        if bad.any():
            raise ValueError("negative density in grid")

    @property
    def defined(self) -> np.ndarray:
        return self.values != GRID_SENTINEL


def _check_phi(dphi):
    dphi = np.asarray(dphi, dtype=float)
    if np.any(np.abs(dphi) > math.pi + _PHI_SLACK):
        raise ParameterError("dphi must lie in [-pi, pi]")
    return dphi


def _scalar(out):
    return out[()] if isinstance(out, np.ndarray) and out.ndim == 0 else out


def joint_r_ipd_pdf(params: StimulusParams, r, dphi):
    """Joint density of amplitude ratio ``r`` and IPD ``dphi``.

    With ``h(a) = r^2 - 2 r cos(dphi - a) + 1``::

        f = 2 C^2 r sin^2(psi/2) / (sigma^2 pi h(0)^2)
            * exp(-C^2 h(psi) / (2 sigma^2 h(0)))

    ``h`` is computed as ``(r-1)^2 + 4 r sin^2((dphi-a)/2)`` which keeps full
    relative accuracy near the zero of ``h(0)`` at ``(r, dphi) = (1, 0)``,
    where the density is exactly 0. Ratios above 1 go through the
    reciprocity ``f(r) = f(1/r) / r^2`` so huge ``r`` cannot overflow.
    """
    if params.tone_ipd_psi < 0:
        return joint_r_ipd_pdf(params.reflected(), r, -np.asarray(dphi, float))
    r = np.asarray(r, dtype=float)
    dphi = _check_phi(dphi)
    if np.any(r < 0):
        raise ParameterError("r must be non-negative")
    c2, var, psi = params.c2, params.noise_variance, params.tone_ipd_psi
    # r > 1 is evaluated at u = 1/r via f(r) = u^2 f(u): same algebra, no overflow
    big = r > 1.0
    with np.errstate(divide="ignore"):
        u = np.where(big, 1.0 / r, r)
    um1 = (u - 1.0) ** 2
    h0 = um1 + 4.0 * u * np.sin(dphi / 2.0) ** 2
    hpsi = um1 + 4.0 * u * np.sin((dphi - psi) / 2.0) ** 2
    log_norm = math.log(2.0 * c2 * params.sin2_half_psi / (var * math.pi))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        logu = np.log(u)
        logf = (log_norm + np.where(big, 3.0 * logu, logu) - 2.0 * np.log(h0)
                - c2 * hpsi / (2.0 * var * h0))
        out = np.exp(logf)
    out = np.where((h0 > 0) & (u > 0), out, 0.0)
    return _scalar(out)


def _pow_factors(params: StimulusParams, p, dphi):
    s2 = params.s2
    sh = np.sin(dphi / 2.0) ** 2
    ch = np.cos(dphi / 2.0) ** 2
    inner = s2 - p * sh           # vanishes on the support boundary
    outer = s2 + p * ch
    return inner, outer


def in_pow_support(params: StimulusParams, p, dphi):
    """True where ``g > 0``, i.e. ``0 <= p < p_hat(dphi)``."""
    if params.tone_ipd_psi < 0:
        params, dphi = params.reflected(), -np.asarray(dphi, float)
    p = np.asarray(p, dtype=float)
    dphi = np.asarray(dphi, dtype=float)
    inner, outer = _pow_factors(params, p, dphi)
    return _scalar((inner > 0) & (outer > 0) & (p >= 0))


def joint_pow_ipd_pdf(params: StimulusParams, p, dphi, outside=np.nan):
    """Joint density of envelope product ``p`` and IPD ``dphi``.

    Inside the support::

        f = p exp(-(C^2 + p k(dphi)) / (2 sigma^2)) / (2 pi sigma^2 sqrt(g))
        k(dphi) = sin(psi/2 - dphi) / sin(psi/2)
        g = 2 C^2 sin^2(psi/2) [2 p cos(dphi) - C^2 (cos(psi) - 1)] - p^2 sin^2(dphi)

    Points with ``g <= 0`` lie outside the support and are set to
    ``outside`` (NaN by default, so they stay distinguishable from a true 0).
    """
    if params.tone_ipd_psi < 0:
        return joint_pow_ipd_pdf(params.reflected(), p,
                                 -np.asarray(dphi, float), outside)
    p = np.asarray(p, dtype=float)
    dphi = _check_phi(dphi)
    if np.any(p < 0):
        raise ParameterError("p must be non-negative")
    c2, var, psi = params.c2, params.noise_variance, params.tone_ipd_psi
    inner, outer = _pow_factors(params, p, dphi)
    g = 4.0 * inner * outer
    k = np.sin(psi / 2.0 - dphi) / math.sin(psi / 2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        logf = (np.log(p) - (c2 + p * k) / (2.0 * var)
                - math.log(2.0 * math.pi * var) - 0.5 * np.log(g))
        out = np.exp(logf)
    out = np.where(g > 0, out, outside)
    return _scalar(out)


def pow_ipd_regular_part(params: StimulusParams, p, dphi):
    """``f_{P',dphi}(p, dphi) * sqrt(p_hat(dphi) - p)``.

    Smooth across the support boundary; used to integrate the inverse
    square-root singularity at ``p = p_hat`` exactly by substitution.
    """
    if params.tone_ipd_psi < 0:
        return pow_ipd_regular_part(params.reflected(), p,
                                    -np.asarray(dphi, float))
    p = np.asarray(p, dtype=float)
    dphi = np.asarray(dphi, dtype=float)
    c2, var, psi = params.c2, params.noise_variance, params.tone_ipd_psi
    sh = np.abs(np.sin(dphi / 2.0))
    outer = params.s2 + p * np.cos(dphi / 2.0) ** 2
    k = np.sin(psi / 2.0 - dphi) / math.sin(psi / 2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = p * np.exp(-(c2 + p * k) / (2.0 * var)) / (
            4.0 * math.pi * var * sh * np.sqrt(outer))
    return _scalar(np.where(sh > 0, out, 0.0))


def support_p_hat(params: StimulusParams, dphi):
    """Largest envelope product reachable at IPD ``dphi``.

    ``C^2 (cos psi - 1) / (cos dphi - 1) = C^2 sin^2(psi/2) / sin^2(dphi/2)``;
    infinite at ``dphi = 0``.
    """
    dphi = np.asarray(dphi, dtype=float)
    sd = np.sin(dphi / 2.0) ** 2
    with np.errstate(divide="ignore", over="ignore"):
        out = params.c2 * (params.sin2_half_psi / sd)
    return _scalar(np.where(sd > 0, out, np.inf))


def support_phi_hat(params: StimulusParams, p):
    """Half-width in IPD of the support at envelope product ``p``.

    ``pi`` for ``p <= C^2 sin^2(psi/2)``, else ``arccos(1 - C^2 (1 - cos psi)/p)``
    (computed as ``2 arcsin(sqrt(s^2/p))``).
    """
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise ParameterError("p must be positive")
    ratio = np.minimum(params.s2 / p, 1.0)
    out = np.where(p <= params.s2, math.pi, 2.0 * np.arcsin(np.sqrt(ratio)))
    return _scalar(out)


def ild_from_iar(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ParameterError("IAR must be positive")
    return _scalar(20.0 * np.log10(r))


def iar_from_ild(dl):
    return _scalar(10.0 ** (np.asarray(dl, dtype=float) / 20.0))


def joint_grid(kind: str, params: StimulusParams, axis1, axis2) -> PdfGrid:
    """Evaluate a joint density on ``axis1 x axis2``.

    ``kind`` is ``"r-ipd"`` (axes ``r``, ``dphi``) or ``"pow-ipd"`` (axes
    ``p``, ``dphi``). Cells outside the support get ``GRID_SENTINEL``.
    """
    a1 = np.asarray(axis1, dtype=float)
    a2 = np.asarray(axis2, dtype=float)
    X, P = np.meshgrid(a1, a2, indexing="ij")
    if kind == "r-ipd":
        vals = joint_r_ipd_pdf(params, X, P)
        names = ("r", "dphi")
    elif kind == "pow-ipd":
        vals = joint_pow_ipd_pdf(params, X, P, outside=GRID_SENTINEL)
        names = ("p", "dphi")
    else:
        raise ValueError(f"unknown joint kind {kind!r}")
    vals = np.where(np.isposinf(vals), GRID_SENTINEL, vals)
    return PdfGrid(names[0], names[1], a1, a2, vals,
                   meta={"kind": kind, "snr_db": params.snr_db,
                         "psi": params.tone_ipd_psi, "c": params.tone_amplitude_c,
                         "noise_variance": params.noise_variance})
