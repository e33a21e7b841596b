# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# pytest configuration: markers and the quick/slow split


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long acceptance runs, deselect with -m \"not slow\"")
