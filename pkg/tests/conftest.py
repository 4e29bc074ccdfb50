import shutil
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from psc2code.demo import build_demo
from psc2code.pipeline import run_pipeline

settings.register_profile(
    "default", deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return FIXTURES / "corpus"


@pytest.fixture(scope="session")
def demo_facts(tmp_path_factory) -> dict:
    """Demo fixtures rendered once per session, before any pipeline run."""
    root = tmp_path_factory.mktemp("demo")
    return build_demo(root)


@pytest.fixture(scope="session")
def processed_demo(demo_facts) -> dict:
    """The demo video run through the whole pipeline, shared read-only."""
    summary = run_pipeline(demo_facts["source"], demo_facts["config"])
    assert "failed" not in summary, summary
    return {**demo_facts, "summary": summary,
            "workspace": Path(demo_facts["config"].workspace)}


@pytest.fixture()
def demo_copy(processed_demo, tmp_path) -> dict:
    """A private mutable copy of the processed demo workspace."""
    import dataclasses

    target = tmp_path / "ws"
    shutil.copytree(processed_demo["workspace"], target)
    cfg = dataclasses.replace(processed_demo["config"], workspace=str(target))
    return {**processed_demo, "workspace": target, "config": cfg}
