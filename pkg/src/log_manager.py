# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Overrides the built-in print function to log messages to a file with timestamps.
# Rotates the log on startup when it belongs to an earlier day and keeps LOG_RETENTION_DAYS of history.

PRINT_PREFIX = "LOG MANAGER"

# Standard library imports
import builtins
import datetime
import os
import threading
from typing import Any

# Local imports
from config.vars import DEBUG_ENABLED, LOG_RETENTION_DAYS

LOG_DIR = "logs"
ROTATED_DIR = os.path.join(LOG_DIR, "rotated_logs")
LOG_PATH = os.path.join(LOG_DIR, "lab_logs.log")

TO_SKIP = [
    "RuntimeWarning: overflow encountered in exp",  # Expected underflow/overflow in pruned Gaussian tails
]

# Reference to the original print function
original_print = builtins.print

os.makedirs(ROTATED_DIR, exist_ok=True)

log_lock = threading.Lock()


def _rotate_if_stale() -> list[str]:
    """
    Rotate lab_logs.log when its last write happened on an earlier day.

    Returns:
        Messages to print once the override is installed
    """
    messages = []
    today = datetime.date.today()
    if os.path.exists(LOG_PATH):
        modified = datetime.date.fromtimestamp(os.path.getmtime(LOG_PATH))
        if modified < today:
            rotated_path = os.path.join(ROTATED_DIR, f"lab_logs_{modified.strftime('%Y-%m-%d')}.log")
            file_number = 1
            while os.path.exists(rotated_path):
                file_number += 1
                rotated_path = os.path.join(ROTATED_DIR, f"lab_logs_{modified.strftime('%Y-%m-%d')}_{file_number}.log")
            os.rename(LOG_PATH, rotated_path)
            messages.append(f"[INFO] [{PRINT_PREFIX}] Log file rotated to {rotated_path}")

    cutoff = today - datetime.timedelta(days=LOG_RETENTION_DAYS)
    for name in os.listdir(ROTATED_DIR):
        path = os.path.join(ROTATED_DIR, name)
        try:
            if datetime.date.fromtimestamp(os.path.getmtime(path)) < cutoff:
                os.remove(path)
                messages.append(f"[INFO] [{PRINT_PREFIX}] Deleted old log file: {path}")
        except Exception as e:
            messages.append(f"[ERROR] [{PRINT_PREFIX}] Failed to delete old log file {path}: {e}")
    return messages


_startup_messages = _rotate_if_stale()

# Open the lab log in append mode
lab_logs = open(LOG_PATH, "a")


def logging_print(*args: Any, **kwargs: Any) -> None:
    """Custom print function for logging purposes."""
    for arg in args:
        if not DEBUG_ENABLED and "[DEBUG]" in str(arg):
            return
        for skip_str in TO_SKIP:
            if skip_str in str(arg):
                return

    original_print(*args, **kwargs)  # Print to console

    text_output = " ".join(str(arg) for arg in args)
    lab_log = f"[{datetime.datetime.now().strftime('%Y-%m-%d %H:%M:%S')}] {text_output}\n"
    with log_lock:
        lab_logs.write(lab_log)
        lab_logs.flush()  # Force write to file


# Override the built-in print function
builtins.print = logging_print

for _message in _startup_messages:
    print(_message)
