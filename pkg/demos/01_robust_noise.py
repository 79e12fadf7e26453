"""
Robust noise estimation
=======================

Spikes are rare, large outliers. The scaled median absolute deviation
(MAD) tracks the background noise level, whereas the plain standard
deviation is inflated by the spikes themselves.
"""

# %%
# A recording with unit-variance noise and large spikes
import numpy as np

from spikeforge import SynthConfig, generate_recording
from spikeforge.signal import mad, renormalize, sd

rec, truth = generate_recording(SynthConfig(firing_rate_hz=40.0, amplitude_range=(15, 20), seed=1))
print(f"{len(rec)} samples, {len(truth)} spikes")

# %%
# The MAD stays close to the true noise SD of 1.0; the SD does not.
print(f"sd  = {sd(rec.samples):.3f}")
print(f"mad = {mad(rec.samples):.3f}")

# %%
# Renormalizing by the MAD puts every electrode on the same noise scale,
# so one threshold multiplier works across recordings with different gains.
loud = rec.with_samples(rec.samples * 250.0)
for r in (rec, loud):
    z = renormalize(r).samples
    print(f"raw scale {np.abs(r.samples).max():9.2f} -> renormalized {np.abs(z).max():6.2f}")
