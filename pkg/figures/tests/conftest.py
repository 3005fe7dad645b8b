import shutil
import subprocess

import pytest


def run_sweep(tmp_path, name, extra):
    """Produce a small but real sweep CSV via the experiment CLI."""
    out = tmp_path / name
    base = ["loopcast", "--graph", "karate", "--samples", "100",
            "--mc-sims", "600", "--seed", "17", "--out", str(out)]
    subprocess.run(base + extra, check=True)
    return out


@pytest.fixture(scope="session")
def cli_available():
    if shutil.which("loopcast") is None:
        pytest.skip("loopcast CLI not installed")


@pytest.fixture(scope="session")
def rows_csv(cli_available, tmp_path_factory):
    tmp = tmp_path_factory.mktemp("sweep")
    return run_sweep(tmp, "rows.csv", [
        "--intervention", "influence", "--sets", "0;33;2,5",
        "--p", "0.1,0.2,0.3", "--r", "0,1", "--replicates", "3"])


@pytest.fixture(scope="session")
def summary_csv(cli_available, tmp_path_factory):
    tmp = tmp_path_factory.mktemp("sweep")
    return run_sweep(tmp, "summary.csv", [
        "--intervention", "influence", "--sets", "0;33;11",
        "--p", "0.1,0.25", "--r", "0,1", "--replicates", "3",
        "--emit", "summary"])


@pytest.fixture(scope="session")
def coreness_csv(cli_available, tmp_path_factory):
    tmp = tmp_path_factory.mktemp("sweep")
    return run_sweep(tmp, "coreness.csv", [
        "--intervention", "influence", "--sets", "0;33;11",
        "--p", "0.2", "--r", "1", "--replicates", "2",
        "--emit", "coreness"])


@pytest.fixture(scope="session")
def temporal_csv(cli_available, tmp_path_factory):
    tmp = tmp_path_factory.mktemp("sweep")
    return run_sweep(tmp, "temporal.csv", [
        "--intervention", "sentinel", "--sets", "0,33",
        "--p", "0.15", "--r", "1", "--replicates", "2",
        "--emit", "temporal"])
