# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Continuum Commands - Resonant operator, level-set profile and kinetic operator

PRINT_PREFIX = "CONTINUUM COMMANDS"

# Third-party imports
import numpy as np

# Local imports
from src.cli.commands.common import out_path, site_tag, time_grid
from src.cli.models import ScenarioConfig
from src.datamanager import results_manager
from src.numerics import continuum_kinetic, duhamel
from src.shared import register_command


def _xi_grid(config: ScenarioConfig, prof, K) -> np.ndarray:
    spacing = config.options.xi_spacing
    if config.options.xi_max is None:
        return duhamel.default_xi_grid(prof, K, spacing)
    n = int(np.ceil(config.options.xi_max / spacing))
    return spacing * np.arange(-n, n + 1)


@register_command("cr-op", "Continuous resonant operator, level-set profile and its principal-value limit")
def cr_op(config: ScenarioConfig, out_dir: str) -> dict:
    prof = config.profile.build()
    tol = config.tolerances
    report = {"sites": []}
    for K in config.sites:
        cr = continuum_kinetic.cr_operator(prof, prof, prof, K, tol.rtol, tol.atol)
        profile = continuum_kinetic.khat_profile(prof, K, _xi_grid(config, prof, K), rtol=tol.rtol, atol=tol.atol)
        profile.export_csv(out_path(out_dir, f"khat_{site_tag(K)}.csv"))
        at_zero = complex(profile.values[np.argmin(np.abs(profile.xi))])
        rows = []
        for t in time_grid(config):
            pv = continuum_kinetic.pv_limit(profile, t, tol.rtol, tol.atol)
            rows.append((t, pv.finite.real, pv.finite.imag, pv.limit.real, pv.limit.imag))
        results_manager.write_csv(out_path(out_dir, f"pv_{site_tag(K)}.csv"),
                                  ["t", "finite_re", "finite_im", "limit_re", "limit_im"], rows)
        rel = abs(at_zero - cr) / abs(cr) if cr != 0 else abs(at_zero)
        print(f"[INFO] [{PRINT_PREFIX}] K={tuple(K)}: T = {cr:.8g}, R_hat(0) = {at_zero:.8g} (rel {rel:.2e})")
        report["sites"].append({"K": list(K), "cr_operator": cr, "khat_zero": at_zero, "relative_difference": rel,
                                "pv": [dict(zip(("t", "finite_re", "finite_im", "limit_re", "limit_im"), r)) for r in rows]})
    return report


@register_command("wk-op", "Wave kinetic collision operator on the resonant manifold")
def wk_op(config: ScenarioConfig, out_dir: str) -> dict:
    prof = config.profile.build()
    tol = config.tolerances
    rows = []
    for K in config.sites:
        total, terms = continuum_kinetic.wk_operator(prof, K, tol.rtol, tol.atol, parts=True)
        rows.append((K[0], K[1], total, terms["n1n2n3"], terms["n n2n3"], terms["n n1n3"], terms["n n1n2"]))
        print(f"[INFO] [{PRINT_PREFIX}] K={tuple(K)}: K_k(n) = {total:.8g}")
    columns = ["K1", "K2", "value", "n1n2n3", "n_n2n3", "n_n1n3", "n_n1n2"]
    results_manager.write_csv(out_path(out_dir, "wk_operator.csv"), columns, rows)
    return {"sites": [dict(zip(columns, row)) for row in rows]}
