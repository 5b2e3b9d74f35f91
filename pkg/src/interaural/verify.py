"""Verification checks shared by the ``verify`` command and the test suite."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .marginals import (marginal_ipd, normalization_pow_ipd, normalization_r_ipd,
                        tabulated_cdf)
from .montecarlo import (InterauralSamples, cell_probabilities_pow_ipd,
                         histogram_2d, ks_statistic, sample_interaural, tv_distance)
from .stimulus import (StimulusParams, joint_pow_ipd_pdf, joint_r_ipd_pdf,
                       support_p_hat)

__all__ = [
    "THRESHOLDS",
    "CheckRecord",
    "VerificationReport",
    "identity_errors",
    "route_agreement",
    "support_violations",
    "joint_tv_edges",
    "oracle_distances",
    "run_verification",
]

THRESHOLDS = {
    "norm_r_ipd": 1e-6,
    "norm_pow_ipd": 1e-4,
    "route_agreement": 1e-6,
    "snr_equivalence": 1e-12,
    "power_scaling": 1e-12,
    "reflection": 1e-12,
    "reciprocity": 1e-12,
    "support_violations": 0,
    "ks_ipd": 0.005,
    "ks_iar": 0.005,
    "ks_ild": 0.005,
    "ks_pow": 0.01,
    "tv_r_ipd": 0.01,
    "tv_pow_ipd": 0.01,
}


@dataclass
class CheckRecord:
    name: str
    snr_db: float
    psi: float
    metric: str
    value: float
    threshold: float
    passed: bool


@dataclass
class VerificationReport:
    seed: int
    samples: int
    records: list = field(default_factory=list)
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def add(self, name, params, metric, value, threshold):
        rec = CheckRecord(name, round(params.snr_db, 12), params.tone_ipd_psi, metric,
                          float(value), float(threshold), bool(value <= threshold))
        self.records.append(rec)
        return rec

    def to_json(self) -> str:
        doc = {"tool": "interaural", "version": self.version, "seed": self.seed,
               "samples": self.samples, "pass": self.passed,
               "checks": [asdict(r) for r in self.records]}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _max_rel(a, b, rel_floor=1e-30):
    """Largest relative difference where the values exceed ``rel_floor`` times
    their peak. Deeper in the tail the identities are ill-conditioned: the
    rounding of the transformed inputs (1/r, k p) is amplified by the size of
    the exponent, so no evaluation order can hold 1e-12 there."""
    a, b = np.asarray(a), np.asarray(b)
    scale = np.maximum(np.abs(a), np.abs(b))
    ok = scale > max(rel_floor * float(np.max(scale, initial=0.0)), 1e-300)
    if not ok.any():
        return 0.0
    return float(np.max(np.abs(a - b)[ok] / scale[ok]))


def identity_errors(params: StimulusParams, n: int = 10_000, seed: int = 0) -> dict:
    """Largest relative violation of each exact symmetry on ``n`` random points.

    Envelope products are drawn at most ``1 - 1e-3`` of the way to the support
    boundary; closer in, the factor ``p_hat - p`` magnifies input rounding.
    """
    rng = np.random.default_rng([seed, 0x1D])
    r = np.exp(rng.uniform(math.log(0.05), math.log(20.0), n))
    phi = rng.uniform(-math.pi, math.pi, n)
    top = np.minimum(support_p_hat(params, phi), 4.0 * params.c2)
    p = top * np.exp(rng.uniform(math.log(1e-3), math.log(1.0 - 1e-3), n))
    k = float(np.exp(rng.uniform(math.log(0.1), math.log(10.0))))
    c, psi, var = params.tone_amplitude_c, params.tone_ipd_psi, params.noise_variance

    scaled = StimulusParams(math.sqrt(k) * c, psi, k * var)
    f = joint_r_ipd_pdf(params, r, phi)
    out = {"snr_equivalence": _max_rel(f, joint_r_ipd_pdf(scaled, r, phi))}
    fp = joint_pow_ipd_pdf(params, p, phi, outside=0.0)
    out["power_scaling"] = _max_rel(fp, k * joint_pow_ipd_pdf(scaled, k * p, phi, outside=0.0))
    out["reflection"] = _max_rel(f, joint_r_ipd_pdf(params.reflected(), r, -phi))
    out["reciprocity"] = _max_rel(joint_r_ipd_pdf(params, 1.0 / r, phi), r * r * f)
    return out


def route_agreement(params: StimulusParams, points: int = 181, cfg=None) -> float:
    phi = np.linspace(-math.pi, math.pi, points)
    a = marginal_ipd(params, phi, "via_r", cfg)
    b = marginal_ipd(params, phi, "via_p", cfg)
    return float(np.max(np.abs(a - b)))


def support_violations(params: StimulusParams, samples: InterauralSamples,
                       slack: float = 1e-9) -> int:
    return int(np.count_nonzero(samples.power_p > support_p_hat(params, samples.ipd_phi) + slack))


def joint_tv_edges(kind: str, params: StimulusParams, bins: int = 100):
    """Histogram edges for the 2-D distance checks: r in [0, 10] or
    p' in [0, 4 (C^2 + 2 sigma^2)], times dphi in [-pi, pi]."""
    phi = np.linspace(-math.pi, math.pi, bins + 1)
    if kind == "r-ipd":
        return np.linspace(0.0, 10.0, bins + 1), phi
    if kind == "pow-ipd":
        return np.linspace(0.0, 4.0 * (params.c2 + 2.0 * params.noise_variance), bins + 1), phi
    raise ValueError(kind)


def oracle_distances(params: StimulusParams, samples: InterauralSamples,
                     bins: int = 100) -> dict:
    """KS distance of each marginal and TV distance of each joint against
    the sampled cues."""
    out = {}
    for which, data in (("ipd", samples.ipd_phi), ("iar", samples.iar_r),
                        ("ild", samples.ild_db), ("pow", samples.power_p)):
        out[f"ks_{which}"] = ks_statistic(data, tabulated_cdf(which, params))
    e1, e2 = joint_tv_edges("r-ipd", params, bins)
    h = histogram_2d(samples.iar_r, samples.ipd_phi, [[e1[0], e1[-1]], [e2[0], e2[-1]]], bins)
    out["tv_r_ipd"] = tv_distance(h, lambda r, ph: joint_r_ipd_pdf(params, r, ph))
    e1, e2 = joint_tv_edges("pow-ipd", params, bins)
    h = histogram_2d(samples.power_p, samples.ipd_phi, [[e1[0], e1[-1]], [e2[0], e2[-1]]], bins)
    out["tv_pow_ipd"] = tv_distance(h, cell_probabilities_pow_ipd(params, e1, e2))
    return out


def run_verification(snr_db_list, psi_list, samples: int = 10_000_000, seed: int = 0,
                     cfg=None, log=None) -> VerificationReport:
    """All checks for every (SNR, psi) combination.

    Raises :class:`~interaural.quadrature.QuadratureError` if an integral
    fails to converge.
    """
    report = VerificationReport(seed=seed, samples=samples)
    for snr in snr_db_list:
        for psi in psi_list:
            params = StimulusParams.from_snr_db(snr, psi)
            add = report.add
            add("normalization", params, "abs(int f_R,dphi - 1)",
                abs(normalization_r_ipd(params, cfg).value - 1.0), THRESHOLDS["norm_r_ipd"])
            add("normalization", params, "abs(int f_P',dphi - 1)",
                abs(normalization_pow_ipd(params, cfg).value - 1.0), THRESHOLDS["norm_pow_ipd"])
            add("route_agreement", params, "max |via_r - via_p|",
                route_agreement(params, cfg=cfg), THRESHOLDS["route_agreement"])
            for name, val in identity_errors(params, seed=seed).items():
                add("identity", params, name, val, THRESHOLDS[name])
            if samples > 0:
                # TV noise floor grows as 1/sqrt(n); thresholds are pinned at 1e7 samples
                tv_scale = max(1.0, math.sqrt(1e7 / samples))
                smp = sample_interaural(params, samples, seed)
                add("support_bound", params, "violations",
                    support_violations(params, smp), THRESHOLDS["support_violations"])
                for name, val in oracle_distances(params, smp).items():
                    thr = THRESHOLDS[name] * (tv_scale if name.startswith("tv") else 1.0)
                    add("oracle_distance", params, name, val, thr)
            if log:
                log(f"snr={snr:g} dB psi={psi:.6g}: "
                    f"{'pass' if report.passed else 'FAIL'}")
    return report
