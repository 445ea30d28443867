import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from gapqi import build_instance, m0, random_model  # noqa: E402

settings.register_profile("default", derandomize=True, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ROOT = Path(__file__).resolve().parents[1]
MODELS = ROOT / "models"


@pytest.fixture
def m0_inst():
    model, h = m0()
    return build_instance(model, h, 3)


@st.composite
def small_instances(draw, max_points=25, max_depth=5, overrides=False):
    """Random ``(Instance, rng)`` from a seed; models are kept small so
    brute-force oracles stay fast."""
    seed = draw(st.integers(0, 2**31 - 1))
    n = draw(st.integers(1, max_points))
    density = draw(st.sampled_from([0.3, 0.6, 0.9]))
    depth = draw(st.integers(0, max_depth))
    rng = np.random.default_rng(seed)
    model, h = random_model(rng, n, density)
    inst = build_instance(model, h, depth)
    if overrides:
        from gapqi.instances import random_overrides
        ov = random_overrides(rng, inst.gap)
        inst = build_instance(model, h, depth, ov)
    return inst, rng


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    RESULTS = getattr(mod, "RESULTS", None)
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=lambda k: (int(k.rstrip("abc")), k)):
        ok, detail = RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
