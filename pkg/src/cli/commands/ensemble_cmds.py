# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Ensemble Commands - Random-phase second moments, kinetic sums and antisymmetry

PRINT_PREFIX = "ENSEMBLE COMMANDS"

# Local imports
from src.cli.commands.common import out_path
from src.cli.models import ScenarioConfig
from src.datamanager import results_manager
from src.numerics import mc_ensemble
from src.shared import register_command


@register_command("mc", "Random-phase Monte-Carlo of E|<v(t)>|^2 with its per-order decomposition")
def mc(config: ScenarioConfig, out_dir: str) -> dict:
    params = config.regime.to_params()
    prof = config.profile.build()
    opts = config.options
    t = config.time.t
    sampling = config.sampling
    ladder = opts.eps_ladder or None
    ensemble = mc_ensemble.variance_mc(params, prof, config.sites, t, sampling.n_samples, sampling.seed, ladder,
                                       opts.second_order)

    rows = []
    for estimate in ensemble.estimates:
        dec = estimate.decomposition
        rows.append((estimate.K[0], estimate.K[1], estimate.second_moment, estimate.stderr, dec["eps2"][0], dec["eps2"][1],
                     dec["eps4"][0], dec["eps4"][1], dec["eps6"][0], dec["eps6"][1],
                     mc_ensemble.e0_analytic(params, prof, estimate.K)))
    columns = ["K1", "K2", "second_moment", "stderr", "eps2", "eps2_err", "eps4", "eps4_err", "eps6", "eps6_err",
               "e0_analytic"]
    results_manager.write_csv(out_path(out_dir, "moments.csv"), columns, rows)
    results_manager.write_csv(out_path(out_dir, "covariances.csv"), ["K1", "K2", "K1p", "K2p", "re", "im", "stderr"],
                              ((c["K"][0], c["K"][1], c["K_prime"][0], c["K_prime"][1], c["mean"].real, c["mean"].imag,
                                c["stderr"]) for c in ensemble.covariances))

    report = ensemble.as_dict()
    report["kinetic_sum"] = [{"K": list(K), "value": mc_ensemble.kinetic_sum(params, prof, K, t)} for K in config.sites]
    report["v1_second_moment"] = [dict(K=list(K), **mc_ensemble.v1_second_moment(params, prof, K, t)) for K in config.sites]
    if opts.antisymmetry:
        report["e1_antisymmetry"] = [dict(K=list(K), **mc_ensemble.e1_antisymmetry(params, prof, K, t, sampling.n_samples,
                                                                                   sampling.seed),
                                          pairing=mc_ensemble.e1_pairing(params, prof, K, t))
                                     for K in config.sites]
    return report
