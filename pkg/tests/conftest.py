"""Shared fixtures: the demo workspace and one full pipeline run."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from litmap.config import load_config          # noqa: E402
from litmap.demodata import build_workspace    # noqa: E402
from litmap.pipeline import Pipeline           # noqa: E402

DATA_DIR = Path(__file__).resolve().parent / "data"


@pytest.fixture(scope="session")
def demo_workspace(tmp_path_factory):
    return build_workspace(tmp_path_factory.mktemp("demo"))


@pytest.fixture(scope="session")
def demo_run(demo_workspace):
    """One end-to-end pipeline run over the demo workspace."""
    config = load_config(demo_workspace.config_path)
    pipeline = Pipeline(config)
    manifest = pipeline.run()
    return {
        "workspace": demo_workspace,
        "config": config,
        "pipeline": pipeline,
        "paths": pipeline.paths,
        "manifest": manifest,
        "store": pipeline.store,
    }
