"""Reproducible campaign: how many random rows preserve the NSP in practice.

The closed-form guarantees are astronomically conservative, so this sweeps
an empirical m grid: sample a Gaussian map, certify the composition, and
record the frequency of intact certificates per m.  Identical configs and
seeds reproduce the CSV byte for byte (timestamp line aside).
"""

from nsplab import ExperimentConfig, run_experiment

preserve = ExperimentConfig(
    experiment="preserve_nsp",
    d=8, n=11, s=1, gamma=0.9,
    seed=31415,
    m_grid=(3, 4, 5, 6, 7, 8),
    trials=40,
)
print("== NSP preservation frequency of Phi @ D (8 x 11 dictionary, s = 1) ==")
text = run_experiment(preserve)
print(f"{'m':>3} {'frequency':>10}")
for line in text.splitlines():
    parts = line.split(",")
    if len(parts) == 4 and parts[1] == "summary":
        print(f"{parts[0]:>3} {float(parts[3]):>10.3f}")
print("(at m = d the map is square Gaussian, hence invertible: frequency 1)")

phase = ExperimentConfig(
    experiment="phase_transition",
    d=24, n=24, s=2, gamma=0.9,
    seed=2718,
    dict_kind="identity",
    m_grid=(4, 8, 12, 16, 20),
    trials=25,
    eps=0.0,
)
print("\n== recovery phase transition (identity dictionary, n = 24, s = 2) ==")
text = run_experiment(phase)
print(f"{'m':>3} {'success':>9}")
for line in text.splitlines():
    parts = line.split(",")
    if len(parts) == 6 and parts[1] == "summary":
        print(f"{parts[0]:>3} {float(parts[2]):>9.2f}")
print("(recovery kicks in at a handful of measurements, far below the")
print(" printed worst-case constants: that gap is the point of the sweep)")
