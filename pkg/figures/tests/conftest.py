import os
import subprocess
import sys
from pathlib import Path

import pytest

MINI_CFG = """
seed = 4242
output_dir = {out}
gallery_sizes = 60,100
set_types = closed,open
strategies = one_to_n,one_to_first
rotation_policies = 7:21
accuracy_targets = 1e-3,1e-2,5e-2
n_permutations = 2
emit_transaction_log = false
n_subjects = 170
samples_per_subject = 3
"""


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory) -> Path:
    """Sweep artifacts produced by the benchmark CLI.

    Uses the persisted desk-scale output when ISB_ACCEPT_OUT points at one;
    otherwise runs a reduced sweep through the external interface.
    """
    cache = os.environ.get("ISB_ACCEPT_OUT")
    if cache and (Path(cache) / "results.csv").is_file():
        return Path(cache)
    out = tmp_path_factory.mktemp("sweep")
    cfg = out / "mini.cfg"
    cfg.write_text(MINI_CFG.format(out=out))
    subprocess.run(
        [sys.executable, "-m", "irisbench.cli", "run", "--config", str(cfg)],
        check=True,
        capture_output=True,
        text=True,
    )
    assert (out / "results.csv").is_file()
    return out


@pytest.fixture(scope="session")
def results_csv(artifacts) -> Path:
    return artifacts / "results.csv"


@pytest.fixture(scope="session")
def distributions_csv(artifacts) -> Path:
    return artifacts / "distributions.csv"
