"""Marginal distributions of IPD, ILD and P', and how they behave as the
tone gets weak or strong.

    python3 demos/marginals_and_limits.py
"""
import math

import numpy as np
from scipy.integrate import trapezoid

from interaural import StimulusParams
from interaural.marginals import (circular_moments, ild_mean, ipd_mass_within, marginal_curve,
                                  marginal_ild, marginal_ipd, marginal_pow)

psi = math.pi
print("IPD circular mean / variance vs SNR at psi = pi")
for snr in (-30, -20, -10, 0, 10, 20, 30):
    mean, var, std = circular_moments(StimulusParams.from_snr_db(snr, psi))
    print(f"  {snr:+3d} dB: mean={mean:+.3f} circ var={var:.3f} std={std:.3f}")

# two routes to the IPD marginal agree
p = StimulusParams.from_snr_db(-5, 2.0)
phi = np.linspace(-math.pi, math.pi, 37)
print("via r vs via p' max diff:",
      f"{np.max(np.abs(marginal_ipd(p, phi, 'via_r') - marginal_ipd(p, phi, 'via_p'))):.1e}")

# ILD marginal at psi = pi: single peak at 0 near 0 dB SNR, two peaks at low SNR
for snr in (-20, 0):
    dl = np.linspace(-6, 6, 13)
    print(f"ILD density at {snr} dB:", np.round(marginal_ild(StimulusParams.from_snr_db(snr, psi), dl), 4))

# the P' marginal has a log singularity at p'/C^2 = sin^2(psi/2)
p = StimulusParams.from_snr_db(0, math.pi / 2)
q = 0.5 + np.array([-1e-2, -1e-4, -1e-6, 1e-6, 1e-4, 1e-2])
print("P' density near p'/C^2 = 1/2:", np.round(marginal_pow(p, p.c2 * q), 3))

curve = marginal_curve("pow", p)
print(f"P' curve on {curve.axis.size} points ({curve.axis_unit}), "
      f"mass on the axis = {trapezoid(curve.density, curve.axis):.4f}")

# strong tone: IPD collapses onto psi, ILD stays centred
print("mass within 0.05 rad of psi at +40 dB:",
      f"{ipd_mass_within(StimulusParams.from_snr_db(40, math.pi / 2), math.pi / 2, 0.05):.5f}")
# weak tone: the IPD concentrates near 0, but slowly (heavy tails)
for snr in (-40, -60):
    print(f"mass within 0.05 rad of 0 at {snr} dB:",
          f"{ipd_mass_within(StimulusParams.from_snr_db(snr, math.pi), 0.0, 0.05):.4f}")
print("ILD mean at -40 dB:", f"{ild_mean(StimulusParams.from_snr_db(-40, math.pi)):.1e} dB")
