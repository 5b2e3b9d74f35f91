"""Interaural cue statistics of N0S_psi stimuli.

Closed-form joint densities of interaural phase difference, amplitude
ratio / level difference and envelope product, their marginals by adaptive
quadrature, and Monte-Carlo / waveform oracles to check them against.
"""
__version__ = "0.1.0"

from .stimulus import (DegenerateStimulusError, InterauralSample, ParameterError,  # noqa: E402
                       PdfGrid, StimulusParams, iar_from_ild, ild_from_iar,
                       joint_grid, joint_pow_ipd_pdf, joint_r_ipd_pdf,
                       support_p_hat, support_phi_hat)
from .quadrature import (QuadratureConfig, QuadratureError, QuadratureResult,  # noqa: E402
                         integrate_finite, integrate_semi_infinite)
from .marginals import (MarginalCurve, apply_global_phase, circular_moments,  # noqa: E402
                        marginal_curve, marginal_iar, marginal_ild, marginal_ipd,
                        marginal_pow)
from .montecarlo import sample_interaural  # noqa: E402
from .waveform import extract_cues, synthesize_waveform  # noqa: E402
