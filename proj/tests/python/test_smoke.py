import json
import math
import os
import subprocess

import pytest

import diracgap

SCHEMA = os.environ.get("DIRACGAP_SCHEMA")
CLI = os.environ.get("DIRACGAP_CLI")


def validate(doc):
    jsonschema = pytest.importorskip("jsonschema")
    if not SCHEMA:
        pytest.skip("DIRACGAP_SCHEMA not set")
    with open(SCHEMA) as f:
        jsonschema.validate(doc, json.load(f))


def test_kato_constants():
    assert diracgap.kato_constant(3) == pytest.approx(2 / math.pi, rel=1e-13)
    assert diracgap.kato_constant(2) == pytest.approx(4 * math.gamma(0.75) ** 2 / math.gamma(0.25) ** 2, rel=1e-13)


def test_legendre_q0():
    z = 2.0
    assert diracgap.legendre_q(0, z) == pytest.approx(0.5 * math.log((z + 1) / (z - 1)), rel=1e-12)


def test_channels_listing():
    chans = diracgap.channels(3, 1)
    assert {c["kappa"] for c in chans} == {-1.0, 1.0}
    assert all(c["degeneracy"] > 0 for c in chans)


def test_ground_state_matches_closed_form():
    doc = diracgap.eigenvalues(dim=3, nu=0.5)
    rec = doc["records"][0]
    assert doc["exit_code"] == 0
    assert rec["lambda"] == pytest.approx(math.sqrt(1 - 0.25), rel=1e-4)
    doc.pop("exit_code")
    validate(doc)


def test_bad_config_raises():
    with pytest.raises(diracgap.DiracGapError):
        diracgap.eigenvalues(dim=5, nu=0.5)


def test_small_checks_pass():
    assert diracgap.hardy_check(dim=2, nu=0.25, samples=10)["passed"]
    assert diracgap.kernel_check(samples=5)["passed"]
    assert diracgap.core_check(dim=2, nu=0.5, kmax=8)["passed"]
    assert diracgap.certificate(dim=3, samples=5)["passed"]


def test_sweep_rows():
    doc = diracgap.sweep(dim=2, nus=[0.1, 0.3])
    assert [r["status"] for r in doc["rows"]] == [0, 0]


def test_run_cli_in_process():
    code, out, _ = diracgap.run_cli(["core-check", "--dim", "3", "--nu", "1.0", "--kmax", "4"])
    assert code == 0
    validate(json.loads(out))


@pytest.mark.parametrize(
    "args",
    [
        ["eigenvalues", "--dim", "2", "--nu", "0.25", "--method", "both"],
        ["hardy-check", "--dim", "3", "--nu", "0.4", "--samples", "10"],
        ["kernel-check", "--samples", "5"],
        ["core-check", "--dim", "2", "--nu", "0.2", "--kmax", "4"],
        ["certificate", "--dim", "2", "--samples", "5"],
        ["sweep", "--dim", "3", "--nus", "0.2,0.6", "--timing"],
    ],
)
def test_cli_binary_output_validates(args):
    if not CLI:
        pytest.skip("DIRACGAP_CLI not set")
    proc = subprocess.run([CLI, *args], capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    validate(json.loads(proc.stdout))


def test_cli_binary_exit_codes():
    if not CLI:
        pytest.skip("DIRACGAP_CLI not set")
    assert subprocess.run([CLI, "eigenvalues", "--dim", "3", "--nu", "0"], capture_output=True).returncode == 2
    assert subprocess.run([CLI, "eigenvalues", "--dim", "4"], capture_output=True).returncode == 1
