"""Marginal densities and summary statistics by numeric integration of the
joint densities in :mod:`interaural.stimulus`."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .quadrature import (QuadratureConfig, QuadratureError, QuadratureResult,
                         integrate_breakpoints, integrate_finite)
from .stimulus import (ParameterError, StimulusParams, joint_pow_ipd_pdf,
                       joint_r_ipd_pdf, support_p_hat, support_phi_hat)

__all__ = [
    "MarginalCurve",
    "DEFAULT_AXES",
    "marginal_ipd",
    "marginal_iar",
    "marginal_ild",
    "marginal_pow",
    "marginal_curve",
    "apply_global_phase",
    "circular_moments",
    "ipd_mass_within",
    "ild_mean",
    "normalization_r_ipd",
    "normalization_pow_ipd",
    "ipd_breakpoints",
    "TabulatedCdf",
    "tabulated_cdf",
    "default_cdf_edges",
]

WHICH = ("ipd", "iar", "ild", "pow")

DEFAULT_AXES = {
    "ipd": (-math.pi, math.pi, 181),
    "ild": (-40.0, 40.0, 401),
    "iar": (0.0, 10.0, 401),
    "pow": (-40.0, 20.0, 401),   # p'/C^2 in dB
}

# exponent drop beyond which the p' tail is discarded (e^-50 ~ 2e-22)
_TAIL_EXPONENT = 50.0


def _require(res: QuadratureResult, what: str) -> float:
    if not res.converged:
        raise QuadratureError(
            f"{what}: no convergence (status {res.status}, "
            f"value {res.value:.6g}, err {res.abs_error_estimate:.3g})", res)
    return res.value


def ipd_breakpoints(params: StimulusParams, lo=-math.pi, hi=math.pi):
    """Sorted integration breakpoints in IPD: the ends, 0 and psi."""
    pts = {lo, hi}
    for x in (0.0, params.tone_ipd_psi):
        if lo < x < hi:
            pts.add(x)
    return sorted(pts)


def _each(fn, x):
    x = np.asarray(x, dtype=float)
    out = np.array([fn(float(v)) for v in x.ravel()]).reshape(x.shape)
    return out[()] if out.ndim == 0 else out


def _ipd_via_r(params, dphi, cfg):
    def f(r):
        return joint_r_ipd_pdf(params, r, dphi)
    res = integrate_breakpoints(f, [0.0, 1.0, math.inf], cfg)
    return _require(res, f"IPD marginal (r route) at {dphi}")


def _pow_decay_rate(params: StimulusParams, dphi: float) -> float:
    psi = params.tone_ipd_psi
    if psi < 0:
        psi, dphi = -psi, -dphi
    return math.sin(psi / 2.0 - dphi) / math.sin(psi / 2.0)


def _pow_upper_limit(params, dphi):
    p_hat = float(support_p_hat(params, dphi))
    k = _pow_decay_rate(params, dphi)
    if k > 0:
        cut = 2.0 * params.noise_variance * _TAIL_EXPONENT / k
        if cut < p_hat:
            return cut
    return p_hat


def _ipd_via_p(params, dphi, cfg):
    def f(p):
        return joint_pow_ipd_pdf(params, p, dphi, outside=0.0)
    upper = _pow_upper_limit(params, dphi)
    res = integrate_finite(f, 0.0, upper, cfg)
    return _require(res, f"IPD marginal (p route) at {dphi}")


def marginal_ipd(params: StimulusParams, dphi, route: str = "via_r",
                 cfg: QuadratureConfig | None = None):
    """IPD density, integrating the (r, dphi) joint over r (``via_r``) or the
    (p', dphi) joint over ``p' in [0, p_hat(dphi)]`` (``via_p``)."""
    if route == "via_r":
        fn = _ipd_via_r
    elif route == "via_p":
        fn = _ipd_via_p
    else:
        raise ValueError(f"unknown route {route!r}")
    if np.any(np.abs(np.asarray(dphi)) > math.pi + 1e-12):
        raise ParameterError("dphi must lie in [-pi, pi]")
    return _each(lambda v: fn(params, v, cfg), dphi)


def marginal_iar(params: StimulusParams, r, cfg: QuadratureConfig | None = None):
    """Amplitude-ratio density: integral of the joint over dphi in [-pi, pi]."""
    if np.any(np.asarray(r) < 0):
        raise ParameterError("r must be non-negative")
    pts = ipd_breakpoints(params)

    def one(rv):
        if rv == 0.0 or math.isinf(rv):
            return 0.0
        res = integrate_breakpoints(lambda ph: joint_r_ipd_pdf(params, rv, ph), pts, cfg)
        return _require(res, f"IAR marginal at {rv}")
    return _each(one, r)


def marginal_ild(params: StimulusParams, dl, cfg: QuadratureConfig | None = None):
    """ILD density in 1/dB: ``f_R(10^(dl/20)) * 10^(dl/20) ln(10) / 20``."""
    dl = np.asarray(dl, dtype=float)
    with np.errstate(over="ignore"):
        r = 10.0 ** (dl / 20.0)
    # beyond the float range of r the density is 0 (and r * 0 would be NaN)
    finite = (r > 0) & np.isfinite(r)
    r = np.where(finite, r, 1.0)
    out = np.where(finite, marginal_iar(params, r, cfg) * r * math.log(10.0) / 20.0, 0.0)
    return out[()] if out.ndim == 0 else out


def _pow_theta_integrand(params: StimulusParams, pv: float, sign: float):
    """Integrand of the P' marginal after ``sin(dphi/2) = m sin(theta)``,
    ``m = sin(phi_hat/2)``, over theta in [0, pi/2] for one sign of dphi.

    The substitution cancels the inverse square root at the support
    boundary; what remains is ``1/sqrt(d)`` with
    ``d = (1 - m^2) + m^2 cos^2 theta`` (p' >= s^2) or
    ``d = (s^2 - p') + p' cos^2 theta`` (p' < s^2), written so that nothing
    cancels as p' approaches s^2.
    """
    c2, var, s2 = params.c2, params.noise_variance, params.s2
    psi = params.tone_ipd_psi
    if psi < 0:
        psi, sign = -psi, -sign
    sin_half = math.sin(psi / 2.0)
    above = pv >= s2
    m2 = s2 / pv if above else 1.0
    m = math.sqrt(m2)
    scale = pv / (2.0 * math.pi * var)

    def f(theta):
        st, ct = np.sin(theta), np.cos(theta)
        w = m * st
        phi = sign * 2.0 * np.arcsin(w)
        k = np.sin(psi / 2.0 - phi) / sin_half
        outer = s2 + pv * (1.0 - w * w)
        if above:
            # dphi / sqrt(inner) = 2 dtheta / (sqrt(p') sqrt(d))
            jac = 2.0 / (math.sqrt(pv) * np.sqrt((1.0 - m2) + m2 * ct * ct))
        else:
            # m = 1: dphi = 2 dtheta
            jac = 2.0 / np.sqrt((s2 - pv) + pv * ct * ct)
        return scale * np.exp(-(c2 + pv * k) / (2.0 * var)) * jac / (2.0 * np.sqrt(outer))
    return f


def marginal_pow(params: StimulusParams, p, cfg: QuadratureConfig | None = None):
    """Density of the envelope product p' (absolute units).

    Integrates the (p', dphi) joint over ``[-phi_hat(p'), phi_hat(p')]``
    after a change of variable that absorbs the inverse square-root
    singularities at both limits. Infinite (log singularity) at
    ``p' = C^2 sin^2(psi/2)``.
    """
    if np.any(np.asarray(p) <= 0):
        raise ParameterError("p must be positive")

    def one(pv):
        if pv == params.s2:
            return math.inf
        res = [integrate_finite(_pow_theta_integrand(params, pv, sign), 0.0, math.pi / 2, cfg)
               for sign in (1.0, -1.0)]
        for r in res:
            _require(r, f"P' marginal at {pv}")
        return res[0].value + res[1].value
    return _each(one, p)


@dataclass
class MarginalCurve:
    """A marginal density sampled on an axis.

    ``axis_unit`` is one of ``rad`` (ipd), ``ratio`` (iar), ``dB`` (ild, or
    pow on a dB axis of p'/C^2) or ``C^2`` (pow on a linear p'/C^2 axis).
    ``density`` is per unit of the axis, so it integrates to one over it.
    """

    which: str
    axis: np.ndarray
    density: np.ndarray
    params: StimulusParams
    axis_unit: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.which not in WHICH:
            raise ValueError(f"unknown marginal {self.which!r}")
        self.axis = np.asarray(self.axis, dtype=float)
        self.density = np.asarray(self.density, dtype=float)
        if self.axis.shape != self.density.shape:
            raise ValueError("axis and density lengths differ")
        if self.axis.size > 1 and np.any(np.diff(self.axis) <= 0):
            raise ValueError("axis must be strictly increasing")

    def trapezoid_mass(self) -> float:
        d = np.where(np.isfinite(self.density), self.density, 0.0)
        return float(np.trapezoid(d, self.axis))


def marginal_curve(which: str, params: StimulusParams, axis=None, *,
                   pow_scale: str = "db", cfg: QuadratureConfig | None = None
                   ) -> MarginalCurve:
    """Evaluate one marginal on ``axis`` (defaults in ``DEFAULT_AXES``).

    For ``pow`` the axis is p'/C^2, in dB when ``pow_scale == "db"``.
    """
    if axis is None:
        lo, hi, n = DEFAULT_AXES[which]
        axis = np.linspace(lo, hi, n)
    axis = np.asarray(axis, dtype=float)
    if which == "ipd":
        dens, unit = marginal_ipd(params, axis, cfg=cfg), "rad"
    elif which == "iar":
        dens, unit = marginal_iar(params, axis, cfg=cfg), "ratio"
    elif which == "ild":
        dens, unit = marginal_ild(params, axis, cfg=cfg), "dB"
    elif which == "pow":
        if pow_scale == "db":
            x = 10.0 ** (axis / 10.0)
            jac = params.c2 * x * math.log(10.0) / 10.0
            unit = "dB"
        elif pow_scale == "linear":
            x = axis
            jac = np.full_like(axis, params.c2)
            unit = "C^2"
        else:
            raise ValueError(f"unknown pow_scale {pow_scale!r}")
        dens = marginal_pow(params, params.c2 * x, cfg=cfg) * jac
    else:
        raise ValueError(f"unknown marginal {which!r}")
    return MarginalCurve(which, axis, np.atleast_1d(dens), params, unit)


def apply_global_phase(curve: MarginalCurve, psi2: float) -> MarginalCurve:
    """Curve for the stimulus with an extra overall interaural delay ``psi2``.

    IPD curves are shifted circularly (periodic interpolation onto the same
    axis); ILD, IAR and P' curves are returned unchanged.
    """
    if curve.which != "ipd" or psi2 == 0.0:
        return replace(curve, meta=dict(curve.meta))
    shifted = np.interp(curve.axis - psi2, curve.axis, curve.density,
                        period=2.0 * math.pi)
    meta = dict(curve.meta)
    meta["global_phase"] = meta.get("global_phase", 0.0) + psi2
    return replace(curve, density=shifted, meta=meta)


class _CachedIpd:
    def __init__(self, params, cfg):
        self.params, self.cfg, self.memo = params, cfg, {}

    def __call__(self, phi):
        out = np.empty(len(phi))
        for i, v in enumerate(phi):
            v = float(v)
            if v not in self.memo:
                self.memo[v] = _ipd_via_r(self.params, v, self.cfg)
            out[i] = self.memo[v]
        return out


def _outer_cfg(cfg):
    cfg = cfg or QuadratureConfig()
    return QuadratureConfig(max(cfg.epsabs, 1e-9), max(cfg.epsrel, 1e-8),
                            cfg.max_subintervals)


def circular_moments(params: StimulusParams, cfg: QuadratureConfig | None = None):
    """``(circular_mean, circular_variance, linear_std)`` of the IPD.

    circular mean = arg E[e^{i dphi}], circular variance = 1 - |E[e^{i dphi}]|,
    linear std is the ordinary standard deviation of dphi on [-pi, pi].
    """
    dens = _CachedIpd(params, cfg)
    pts = ipd_breakpoints(params)
    ocfg = _outer_cfg(cfg)

    def moment(weight):
        return _require(integrate_breakpoints(lambda x: weight(x) * dens(x), pts, ocfg),
                        "IPD moment")
    c = moment(np.cos)
    s = moment(np.sin)
    m1 = moment(lambda x: x)
    m2 = moment(lambda x: x * x)
    mean = math.atan2(s, c)
    var = 1.0 - math.hypot(c, s)
    std = math.sqrt(max(m2 - m1 * m1, 0.0))
    return mean, var, std


def ipd_mass_within(params: StimulusParams, center: float, halfwidth: float,
                    cfg: QuadratureConfig | None = None) -> float:
    """Probability that the IPD lies within ``center +- halfwidth`` (circular)."""
    dens = _CachedIpd(params, cfg)
    lo, hi = center - halfwidth, center + halfwidth
    # split the window where it wraps around +-pi
    if lo < -math.pi:
        pieces = [(lo + 2 * math.pi, math.pi), (-math.pi, hi)]
    elif hi > math.pi:
        pieces = [(lo, math.pi), (-math.pi, hi - 2 * math.pi)]
    else:
        pieces = [(lo, hi)]
    total = 0.0
    for a, b in pieces:
        pts = sorted({a, b} | {x for x in (0.0, params.tone_ipd_psi, center) if a < x < b})
        total += _require(integrate_breakpoints(dens, pts, _outer_cfg(cfg)), "IPD mass")
    return total


def ild_mean(params: StimulusParams, cfg: QuadratureConfig | None = None) -> float:
    """Mean ILD in dB."""
    def f(dl):
        return dl * marginal_ild(params, dl, cfg)
    res = integrate_breakpoints(f, [-math.inf, 0.0, math.inf], _outer_cfg(cfg))
    return _require(res, "ILD mean")


def normalization_r_ipd(params: StimulusParams, cfg: QuadratureConfig | None = None,
                        order: str = "r_inner") -> QuadratureResult:
    """Double integral of the (r, dphi) joint over its full domain.

    ``order="r_inner"`` integrates r innermost, ``"phi_inner"`` dphi innermost.
    """
    ocfg = _outer_cfg(cfg)
    if order == "r_inner":
        return integrate_breakpoints(_CachedIpd(params, cfg),
                                     ipd_breakpoints(params), ocfg)
    if order == "phi_inner":
        return integrate_breakpoints(lambda r: marginal_iar(params, r, cfg),
                                     [0.0, 1.0, math.inf], ocfg)
    raise ValueError(f"unknown order {order!r}")


def normalization_pow_ipd(params: StimulusParams, cfg: QuadratureConfig | None = None
                          ) -> QuadratureResult:
    """Double integral of the (p', dphi) joint over its support (p' innermost)."""
    def outer(phi):
        return np.array([_ipd_via_p(params, float(v), cfg) for v in phi])
    return integrate_breakpoints(outer, ipd_breakpoints(params), _outer_cfg(cfg))


class TabulatedCdf:
    """Model CDF tabulated at cell edges and interpolated monotonically.

    ``values[0]`` is the mass below ``edges[0]`` assumed by the caller (0 by
    default); the tail above ``edges[-1]`` is ``1 - values[-1]``.
    """

    def __init__(self, edges, cell_mass, below: float = 0.0):
        from scipy.interpolate import PchipInterpolator
        self.edges = np.asarray(edges, dtype=float)
        self.values = below + np.concatenate([[0.0], np.cumsum(cell_mass)])
        self._interp = PchipInterpolator(self.edges, self.values, extrapolate=False)

    @property
    def total(self) -> float:
        return float(self.values[-1])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self._interp(np.clip(x, self.edges[0], self.edges[-1]))
        out = np.where(x < self.edges[0], 0.0, out)
        return np.where(x > self.edges[-1], 1.0, out)


def default_cdf_edges(which: str, params: StimulusParams) -> np.ndarray:
    """Cell edges used to tabulate a marginal CDF for distance checks."""
    if which == "ipd":
        pts = ipd_breakpoints(params)
        parts = [np.linspace(a, b, max(8, int(round(400 * (b - a) / (2 * math.pi)))) + 1)
                 for a, b in zip(pts[:-1], pts[1:])]
        return np.unique(np.concatenate(parts))
    if which == "ild":
        return np.unique(np.concatenate([np.linspace(-120, -30, 46),
                                         np.linspace(-30, 30, 601),
                                         np.linspace(30, 120, 46)]))
    if which == "iar":
        return 10.0 ** (default_cdf_edges("ild", params) / 20.0)
    if which == "pow":
        s2 = params.s2
        lo, hi = 1e-4 * s2, params.c2 + 80.0 * params.noise_variance
        u = np.geomspace(1e-6, 1.0, 120)
        below = s2 - (s2 - lo) * u[::-1]
        below = np.concatenate([[lo], below[1:]]) if below[0] != lo else below
        above = s2 + (hi - s2) * u
        mid = np.geomspace(lo, s2, 40)[1:-1]
        return np.unique(np.concatenate([below, mid, above]))
    raise ValueError(f"unknown marginal {which!r}")


def tabulated_cdf(which: str, params: StimulusParams, edges=None, nodes: int = 6,
                  cfg: QuadratureConfig | None = None) -> TabulatedCdf:
    """CDF of one marginal (in its natural variable: rad, r, dB, p') built by
    Gauss-Legendre integration of the marginal density over each cell."""
    if edges is None:
        edges = default_cdf_edges(which, params)
    edges = np.asarray(edges, dtype=float)
    density = {
        "ipd": lambda x: marginal_ipd(params, x, cfg=cfg),
        "iar": lambda x: marginal_iar(params, x, cfg=cfg),
        "ild": lambda x: marginal_ild(params, x, cfg=cfg),
        "pow": lambda x: marginal_pow(params, x, cfg=cfg),
    }[which]
    t, w = np.polynomial.legendre.leggauss(nodes)
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
    x = mid[:, None] + half[:, None] * t
    vals = density(x)
    mass = (vals * w).sum(axis=1) * half
    return TabulatedCdf(edges, mass)
