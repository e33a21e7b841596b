# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Lattice Commands - Level sets of the resonance defect and resonant asymptotics

PRINT_PREFIX = "LATTICE COMMANDS"

# Local imports
from src.cli.commands.common import out_path, site_tag
from src.cli.models import ScenarioConfig
from src.datamanager import results_manager
from src.numerics import lattice_resonance
from src.numerics.initial_data import LatticeSpec
from src.shared import register_command


@register_command("resonances", "Level-set profile of the resonance defect on the lattice")
def resonances(config: ScenarioConfig, out_dir: str) -> dict:
    prof = config.profile.build()
    lat = LatticeSpec(config.regime.L, prof.radius)
    opts = config.options
    report = {"L": lat.L, "B": lat.B, "sites": []}
    for K in config.sites:
        levels = lattice_resonance.level_set_profile(lat, prof, K, weight=opts.weight, k2_filter=opts.k2_filter)
        lattice_resonance.export_level_sets(levels, out_path(out_dir, f"levels_{site_tag(K)}.csv"))
        resonant = next((lv for lv in levels if lv.xi_num == 0), None)
        fast_value, fast_count = lattice_resonance.resonant_sum_fast(lat, prof, K)
        entry = {
            "K": list(K),
            "levels": len(levels),
            "pairs": sum(lv.count for lv in levels),
            "resonant_count": resonant.count if resonant else 0,
            "method": opts.method,
            "resonant_sum": lattice_resonance.resonant_sum(lat, prof, K, method=opts.method),
            "resonant_sum_levels": resonant.value if resonant else 0j,
            "resonant_sum_fast": fast_value,
            "resonant_count_fast": fast_count,
        }
        print(f"[INFO] [{PRINT_PREFIX}] K={tuple(K)}: {entry['resonant_count']} resonant of {entry['pairs']} pairs")
        report["sites"].append(entry)

    if opts.L_values:
        K = config.sites[0]
        rows = lattice_resonance.asymptotic_constants(prof, K, opts.L_values, opts.delta)
        columns = ["L", "max_level_const", "harmonic_const", "nonresonant_const", "nonresonant_naive_const",
                   "resonant_ratio"]
        results_manager.write_csv(out_path(out_dir, "asymptotics.csv"), columns,
                                  ([row[c] for c in columns] for row in rows))
        report["asymptotics"] = rows
    return report
