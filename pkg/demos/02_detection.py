"""
Threshold spike detection
=========================

Renormalize, smooth with a box filter, rectify, keep local maxima above
``4 x SD`` and enforce a minimum spike distance. Synthetic ground truth
lets us score the detector directly.
"""

# %%
from spikeforge import DetectionConfig, SynthConfig, detect_spikes, generate_recording
from spikeforge.detect import score_detections

rec, truth = generate_recording(SynthConfig(seed=3))
events = detect_spikes(rec)
recall, precision = score_detections(events, truth.spike_indices)
print(f"{len(truth)} true spikes, {len(events)} detected")
print(f"recall {recall:.3f}, precision {precision:.3f}")

# %%
# The first few events. Polarity is the sign of the raw sample at the peak.
for e in events[:5]:
    print(f"  index {e.index:6d}  t = {e.index / rec.sample_rate_hz * 1e3:7.2f} ms  "
          f"amplitude {e.amplitude:5.2f}  {e.polarity.value}")

# %%
# Raising the threshold trades recall for precision.
for k in (3.0, 4.0, 6.0, 8.0):
    found = detect_spikes(rec, DetectionConfig(threshold_multiplier=k))
    r, p = score_detections(found, truth.spike_indices)
    print(f"multiplier {k:3.1f}: {len(found):3d} events, recall {r:.3f}, precision {p:.3f}")
