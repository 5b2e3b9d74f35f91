"""Joint densities of the interaural cues for a tone in diotic noise.

Evaluates the (r, dphi) and (p', dphi) joint densities, shows where the
(p', dphi) density is undefined, and checks the exact symmetries.

    python3 demos/joint_densities.py
"""
import math

import numpy as np

from interaural import (StimulusParams, joint_grid, joint_pow_ipd_pdf, joint_r_ipd_pdf,
                        support_p_hat)
from interaural.marginals import normalization_pow_ipd, normalization_r_ipd

p = StimulusParams.from_snr_db(0.0, math.pi / 2)
print(f"C = {p.tone_amplitude_c:.4f}, sigma^2 = {p.noise_variance}, psi = {p.tone_ipd_psi:.4f}")

# a few point values
for r, dphi in [(1.0, 0.0), (1.0, math.pi / 2), (2.0, math.pi / 2), (0.5, -1.0)]:
    print(f"f_R,dphi({r}, {dphi:+.3f}) = {float(joint_r_ipd_pdf(p, r, dphi)):.6g}")

# the p' density only lives below p_hat(dphi); beyond it we get NaN, not 0
for dphi in (p.tone_ipd_psi, math.pi):
    top = float(support_p_hat(p, dphi))
    inside = float(joint_pow_ipd_pdf(p, 0.5 * top, dphi))
    outside = float(joint_pow_ipd_pdf(p, 1.5 * top, dphi))
    print(f"dphi = {dphi:.3f}: p_hat = {top:.4f}, f(p_hat/2) = {inside:.4g}, "
          f"f(1.5 p_hat) = {outside}")

# both joints integrate to one
print("integral of f_R,dphi  - 1 =", f"{normalization_r_ipd(p).value - 1:.2e}")
print("integral of f_P',dphi - 1 =", f"{normalization_pow_ipd(p).value - 1:.2e}")

# reciprocity f(1/r) = r^2 f(r) and reflection f_psi(r, dphi) = f_-psi(r, -dphi)
rng = np.random.default_rng(0)
r = np.exp(rng.uniform(-2, 2, 1000))
phi = rng.uniform(-math.pi, math.pi, 1000)
f = joint_r_ipd_pdf(p, r, phi)
print("reciprocity max rel err:", np.max(np.abs(joint_r_ipd_pdf(p, 1 / r, phi) - r * r * f) / f))
print("reflection  max rel err:",
      np.max(np.abs(joint_r_ipd_pdf(p.reflected(), r, -phi) - f) / f))

# a coarse grid; undefined cells are -1 once exported
grid = joint_grid("pow-ipd", p, np.linspace(0, 2 * p.c2, 5), np.linspace(-math.pi, math.pi, 5))
print(np.array2string(grid.values, precision=3))
