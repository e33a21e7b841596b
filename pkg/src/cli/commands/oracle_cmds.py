# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Oracle Commands - Split-step NLS runs compared with the amplitude expansion

PRINT_PREFIX = "ORACLE COMMANDS"

# Standard library imports
import os

# Local imports
from src.cli.commands.common import out_path, site_tag
from src.cli.models import ScenarioConfig
from src.datamanager import results_manager
from src.numerics import nls_oracle
from src.shared import register_command


@register_command("oracle-compare", "NLS grid oracle against eps <phi> - i eps^3 V1 over an eps ladder")
def oracle_compare(config: ScenarioConfig, out_dir: str) -> dict:
    params = config.regime.to_params()
    prof = config.profile.build()
    opts = config.options
    t = config.time.t
    eps = params.eps if params.eps is not None else 0.1
    ladder = opts.eps_ladder or [eps, eps / 2.0, eps / 4.0]

    report = {"t": t, "eps_ladder": list(ladder), "sites": []}
    for K in config.sites:
        result = nls_oracle.expansion_residuals(params, prof, K, t, ladder, N=opts.N, dt=opts.dt, lam=opts.lam,
                                                box=opts.box)
        rows = ((r["eps"], r["observed"].real, r["observed"].imag, r["residual"], r["mass"], r["hamiltonian"])
                for r in result["rows"])
        results_manager.write_csv(out_path(out_dir, f"oracle_{site_tag(K)}.csv"),
                                  ["eps", "observed_re", "observed_im", "residual", "mass", "hamiltonian"], rows)
        report["sites"].append(result)

    if opts.checkpoint:
        state = nls_oracle.evolve(nls_oracle.make_state(params, prof, ladder[0], N=opts.N, box=opts.box, dt=opts.dt,
                                                        lam=opts.lam), t)
        report["checkpoint"] = os.path.basename(nls_oracle.save_checkpoint(state, out_path(out_dir, "final_state.wklc")))
    return report
