"""End to end: synthesize a tone in band-limited diotic noise, read the
cues off the analytic signal, and compare their histograms to the model.

    python3 demos/waveform_route.py [seconds] [out.wav]
"""
import math
import sys

from interaural import StimulusParams
from interaural.marginals import tabulated_cdf
from interaural.montecarlo import ks_statistic
from interaural.waveform import extract_cues, synthesize_waveform, write_wav

seconds = float(sys.argv[1]) if len(sys.argv) > 1 else 10.0
p = StimulusParams.from_snr_db(-10.0, math.pi)
stim = synthesize_waveform(p, sample_rate_hz=48000, center_freq_hz=500,
                           noise_bandwidth_hz=500, duration_s=seconds, seed=0)
if len(sys.argv) > 2:
    write_wav(sys.argv[2], stim)
    print("wrote", sys.argv[2])

tr = extract_cues(stim)
print(f"{tr.time_s.size} cue samples after trimming the edges")
for which, data in (("ipd", tr.ipd_rad), ("ild", tr.ild_db), ("pow", tr.power_p)):
    print(f"KS {which}: {ks_statistic(data, tabulated_cdf(which, p)):.4f}")
# consecutive samples are strongly correlated (bandwidth 500 Hz), so the
# effective sample size is ~ bandwidth x duration, not the sample count
