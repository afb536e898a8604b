from __future__ import annotations

import subprocess
import sys
from pathlib import Path

import pytest

DEMOS = sorted((Path(__file__).resolve().parent.parent / "demos").glob("*.py"))


@pytest.mark.parametrize("script", DEMOS, ids=lambda p: p.name)
def test_demo_runs(script, tmp_path):
    env = {"WBR_CACHE_DIR": str(tmp_path), "PATH": "/usr/bin:/bin"}
    res = subprocess.run([sys.executable, str(script)], capture_output=True, text=True, env=env, check=False)
    assert res.returncode == 0, res.stderr
    assert "False" not in res.stdout.replace("integral iso: False", "")
