# This script re-runs a finished scenario from its manifest.json into a temporary directory
# and compares every output file byte for byte against the hashes recorded in the manifest.

# On home directory of the project, run:
# python -m automations.scripts.rerun_manifest <path/to/manifest.json>
# OR
# python3 -m automations.scripts.rerun_manifest <path/to/manifest.json>

PRINT_PREFIX = "SCRIPT RERUN MANIFEST"

# Standard library imports
import tempfile


def rerun(manifest_path: str) -> list[str]:
    """
    Re-run a manifest and list the outputs whose sha256 differs.

    Returns:
        Names of mismatching or missing files, empty when the run reproduces
    """
    from src import shared
    from src.cli import config_loader, runner
    from src.datamanager import results_manager

    manifest = results_manager.read_manifest(manifest_path)
    with tempfile.TemporaryDirectory() as tmp:
        scenario = config_loader.validate({**manifest["config"], "output": {"out_dir": tmp}})
        code = runner.run(scenario, threads=manifest.get("threads") or shared.get_threads())
        if code != 0:
            return [f"run exited with code {code}"]
        fresh = results_manager.output_hashes(tmp)
    mismatches = []
    for name, digest in manifest["outputs"].items():
        if fresh.get(name) != digest:
            mismatches.append(name)
    if manifest.get("artifact_version") != results_manager.artifact_version():
        print(f"[WARNING] [{PRINT_PREFIX}] Sources changed since the manifest was written")
    return mismatches


if __name__ == "__main__":  # Main entry point enforcement, ensures the script is run directly and not imported on accident.
    import sys
    import src.log_manager  # Ensure logging is set up

    if len(sys.argv) < 2:
        print("Usage: python -m automations.scripts.rerun_manifest <manifest.json>")
        exit(1)
    try:
        different = rerun(sys.argv[1])
    except Exception as e:
        print(f"[ERROR] [{PRINT_PREFIX}] Failed to re-run {sys.argv[1]}: {e}")
        exit(1)
    if different:
        print(f"[ERROR] [{PRINT_PREFIX}] Outputs differ: {', '.join(different)}")
        exit(1)
    print(f"[INFO] [{PRINT_PREFIX}] All outputs reproduced byte for byte.")
    exit(0)
