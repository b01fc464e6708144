import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")


@pytest.fixture(scope="session")
def dedup_program():
    from fungi import corpus
    from fungi.parser import parse_program
    return parse_program(corpus.source("dedup.fg"), "dedup.fg")


@pytest.fixture(scope="session")
def dedup_env(dedup_program):
    from fungi.typecheck import check_program
    return check_program(dedup_program)[1]


@pytest.fixture(scope="session")
def example_runs():
    """The two recorded runs under the example hash: {file: (program, env, run)}."""
    from fungi import corpus
    from fungi.dynamics import hash_example, run_program
    from fungi.parser import parse_program
    from fungi.typecheck import check_program
    out = {}
    for f in corpus.RUNS:
        p = parse_program(corpus.source(f), f)
        env = check_program(p)[1]
        out[f] = (p, env, run_program(p, env, hash_bit=hash_example))
    return out


@pytest.fixture(scope="session")
def harness():
    from fungi.corpus import DedupHarness
    return DedupHarness()
