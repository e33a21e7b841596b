# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Runner - Executes one scenario and maps failures to exit codes

PRINT_PREFIX = "RUNNER"

# Standard library imports
import os
import time
from typing import Optional

# Local imports
from src import shared
from src.cli.models import ScenarioConfig
from src.datamanager import results_manager
from src.numerics.errors import GuardViolation, LabError

import src.cli.commands  # Commands will auto-register via decorators

REPORT_NAME = "report.json"


def run(config: ScenarioConfig, threads: Optional[int] = None) -> int:
    """
    Run the experiment named by config.kind and persist its artifacts.

    Args:
        config: Validated scenario
        threads: Worker cap, keeps the current cap when None

    Returns:
        0 on success, 2 on guard/budget/domain/config failures, 3 on tolerance failures, 1 otherwise
    """
    if threads is not None:
        shared.set_threads(threads)
    try:
        command = shared.get_command(config.kind)
        out_dir = results_manager.prepare_output_dir(config.output.out_dir)
        print(f"[INFO] [{PRINT_PREFIX}] Running '{command.name}' into {out_dir}")
        started = time.perf_counter()
        report = command.handler(config, out_dir)
        results_manager.write_json(os.path.join(out_dir, REPORT_NAME), report)
        results_manager.write_manifest(out_dir, command.name, config.model_dump(mode="json"), config.sampling.seed,
                                       shared.get_threads())
        print(f"[INFO] [{PRINT_PREFIX}] '{command.name}' finished in {time.perf_counter() - started:.2f}s")
        return 0
    except GuardViolation as e:
        print(f"[ERROR] [{PRINT_PREFIX}] Guard violated ({e.constraint}): {e}")
        return e.exit_code
    except LabError as e:
        print(f"[ERROR] [{PRINT_PREFIX}] {type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        print(f"[ERROR] [{PRINT_PREFIX}] Unexpected failure in '{config.kind}': {e!r}")
        return 1
