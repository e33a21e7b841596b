# This script empties the level-set profile cache pointed to by WAVEKIN_CACHE.
# Run it after changing a profile definition, cached entries are keyed by inputs only.

# On home directory of the project, run:
# python -m automations.scripts.clear_cache
# OR
# python3 -m automations.scripts.clear_cache

if __name__ == "__main__":  # Main entry point enforcement, ensures the script is run directly and not imported on accident.
    from src.datamanager import cache_handler
    import src.log_manager  # Ensure logging is set up

    if not cache_handler.cache_enabled():
        print("[WARNING] [SCRIPT CLEAR CACHE] WAVEKIN_CACHE is not set, nothing to clear.")
        exit(0)
    try:
        removed = cache_handler.clear_cache()
        print(f"[INFO] [SCRIPT CLEAR CACHE] Removed {removed} files.")
        exit(0)
    except Exception as e:
        print(f"[ERROR] [SCRIPT CLEAR CACHE] Failed to clear the cache: {e}")
        exit(1)
