"""Shared pytest setup for the root-level test scripts"""

import os
import sys

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

# reference material, not part of the suite
collect_ignore = ["examples"]


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: recovery, sweep, image and timing checks (minutes)")
