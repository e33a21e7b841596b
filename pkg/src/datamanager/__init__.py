# Franktorio Research Division
# Only these modules touch the filesystem for results, caches and checkpoints; nothing else should write there

from . import cache_handler, checkpoint_handler, results_manager

__all__ = ['cache_handler', 'checkpoint_handler', 'results_manager']
