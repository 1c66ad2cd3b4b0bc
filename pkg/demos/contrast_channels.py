"""Contrast loss under three ways of coupling noise to the arms.

Common-mode acceleration noise leaves the contrast at 1. Independent arm
noise and gradient noise (which pushes the arms apart) both lose contrast,
and frequency noise loses it through the arms' different trap response.

    python demos/contrast_channels.py
"""
from sgdeco import PhysParams, Psd, ScenarioConfig, run_magnetic_scenario, run_scenario

line = Psd.lorentzian_pair(1e-3, 1.0, 0.05)
cases = [
    ("common-mode acceleration", ScenarioConfig(PhysParams(), "acceleration", line, 4000, "common-mode")),
    ("independent acceleration", ScenarioConfig(PhysParams(), "acceleration", line, 4000, "independent")),
    ("gradient noise", ScenarioConfig(PhysParams(), "magnetic-gradient", line, 4000, "anti-correlated")),
    ("trap-frequency noise", ScenarioConfig(PhysParams(eta=0.5), "quadratic", line.scaled(10.0), 4000,
                                            "common-mode")),
]
print(f"{'channel':28s} {'E[C]':>10s} {'exp(-E[-log C])':>16s} {'quadrature':>11s} {'closed form':>12s}")
for name, cfg in cases:
    run = run_magnetic_scenario if cfg.noise_kind == "magnetic-gradient" else run_scenario
    stats, report = run(cfg)
    nl = report["neg_log_contrast"]
    closed = "" if nl.closed_form is None else f"{nl.closed_form:.4g}"
    print(f"{name:28s} {stats['contrast'].mean:10.6f} {stats['contrast_log'].mean:16.6f} "
          f"{nl.quadrature:11.4g} {closed:>12s}")
print("(quadrature and closed form columns are -log C)")
