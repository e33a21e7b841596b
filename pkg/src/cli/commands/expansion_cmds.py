# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Expansion Commands - Duhamel iterates, linear propagation, decay of the time signal, regime checks

PRINT_PREFIX = "EXPANSION COMMANDS"

# Third-party imports
import numpy as np

# Local imports
from src.cli.commands.common import complex_pair, out_path, time_grid
from src.cli.models import ScenarioConfig
from src.datamanager import results_manager
from src.numerics import duhamel
from src.numerics import gaussian_core as gc
from src.numerics.errors import GuardViolation
from src.numerics.initial_data import LatticeSpec, build_phi, coarse_grain, validate_regime
from src.shared import register_command
from src.utils.utils import loglog_slope


@register_command("expansion", "First and second Duhamel iterates, exact and leading order")
def expansion(config: ScenarioConfig, out_dir: str) -> dict:
    params = config.regime.to_params()
    prof = config.profile.build()
    opts = config.options
    results = []
    for t in time_grid(config):
        for K in config.sites:
            results.append(duhamel.expansion(params, prof, K, t, opts.orders, opts.exact, opts.allow_beyond_guard))
    rows = (row for result in results for row in result.rows())
    results_manager.write_csv(out_path(out_dir, "expansion.csv"), duhamel.EXPANSION_COLUMNS, rows)
    report = {"regime": results[0].regime if results else validate_regime(params).as_dict(), "results": []}
    for result in results:
        report["results"].append({"K": list(result.K), "t": result.t, "v1_exact": result.v1_exact,
                                  "v1_leading": result.v1_leading, "v2_exact": result.v2_exact,
                                  "v2_leading": result.v2_leading, "budget_used": result.budget_used})
    if params.eps is not None and opts.exact:
        report["predictions"] = [duhamel.deterministic_prediction(params, prof, K, config.time.t) for K in config.sites]
    return report


@register_command("propagate", "Free propagation of the initial packet sum and its coarse-grained observable")
def propagate(config: ScenarioConfig, out_dir: str) -> dict:
    params = config.regime.to_params()
    prof = config.profile.build()
    phi = build_phi(LatticeSpec(params.L, prof.radius), prof, params.h)
    rows = []
    for t in time_grid(config):
        moved = phi.propagate(t)
        l2, sigma_norm = gc.norms(moved)
        for K in config.sites:
            value = coarse_grain(moved, K, params.sigma)
            rows.append((t, K[0], K[1], value.real, value.imag, l2, sigma_norm))
    columns = ["t", "K1", "K2", "re", "im", "l2", "sigma_norm"]
    results_manager.write_csv(out_path(out_dir, "propagate.csv"), columns, rows)
    print(f"[INFO] [{PRINT_PREFIX}] propagated {len(phi)} packets over {len(time_grid(config))} times")
    return {"terms": len(phi), "rows": [dict(zip(columns, row)) for row in rows]}


@register_command("decay", "Closed-form decay of R_k(t) for Gaussian triples")
def decay(config: ScenarioConfig, out_dir: str) -> dict:
    widths = config.options.widths
    if len(widths) != 3:
        widths = [widths[0]] * 3
    packets = [gc.WavePacketSum((gc.ComplexGaussian.from_amplitude(1.0, 1.0 / (w * w)),)) for w in widths]
    times = np.asarray(config.time.times if config.time.times else np.logspace(1.0, 3.0, 25))
    K = config.sites[0]
    values = duhamel.decay_profile(packets[0], packets[1], packets[2], times, K)
    results_manager.write_csv(out_path(out_dir, "decay.csv"), ["t", "re", "im", "abs"],
                              ((t, v.real, v.imag, abs(v)) for t, v in zip(times, values)))
    late = times >= 10.0
    slope = loglog_slope(times[late], np.abs(values[late]))[0] if np.count_nonzero(late) >= 2 else float("nan")
    print(f"[INFO] [{PRINT_PREFIX}] decay slope {slope:.4f}")
    return {"K": list(K), "widths": list(widths), "slope": slope, "first": complex_pair(values[0])}


@register_command("validate", "Check the scaling regime and report the admissible time windows")
def validate(config: ScenarioConfig, out_dir: str) -> dict:
    params = config.regime.to_params()
    report = validate_regime(params).as_dict()
    results_manager.write_json(out_path(out_dir, "regime.json"), report)
    if not report["passed"]:
        raise GuardViolation(f"regime violated: {', '.join(report['violations'])}", constraint=report["violations"][0])
    print(f"[INFO] [{PRINT_PREFIX}] regime passes ({report['mode']})")
    return report
