import json

import pytest

from symqm import io as sio
from symqm.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


@pytest.fixture(autouse=True)
def _no_env_cache(monkeypatch):
    monkeypatch.delenv(sio.CACHE_ENV, raising=False)


def test_basis_su3_ncut6(capsys):
    rc, out, _ = run(capsys, "basis", "--n", "3", "--ncut", "6")
    assert rc == 0
    data = json.loads(out)
    assert data["dimension"] == 7
    assert {tuple(s) for s in data["states"]} == {(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (3, 0), (0, 2)}


def test_basis_csv(capsys):
    rc, out, _ = run(capsys, "basis", "--n", "3", "--ncut", "2", "--format", "csv")
    assert rc == 0
    assert out.splitlines() == ["index,p2,p3,quanta", "0,0,0,0", "1,1,0,2"]


def test_rank_one_is_usage_error(capsys):
    rc, _, err = run(capsys, "basis", "--n", "1", "--ncut", "2")
    assert rc == 2
    assert "at least 2" in err


def test_missing_argument_is_usage_error(capsys):
    rc, _, _ = run(capsys, "basis", "--n", "3")
    assert rc == 2


def test_spectrum_both_matches(capsys):
    rc, out, _ = run(capsys, "spectrum", "--n", "3", "--ncut", "2")
    data = json.loads(out)
    assert rc == 0
    assert data["match"] and data["levels"] == 2


def test_spectrum_vacuum_closed(capsys):
    rc, out, _ = run(capsys, "spectrum", "--n", "4", "--ncut", "0", "--method", "closed")
    assert rc == 0
    assert [e["E"] for e in json.loads(out)["levels"]] == [3.75]


def test_fermionic_without_table(capsys):
    rc, _, err = run(capsys, "spectrum", "--n", "3", "--ncut", "4", "--sector", "nF=4")
    assert rc == 2
    assert "brick data unavailable" in err


def test_families_lists_roots(capsys):
    rc, out, _ = run(capsys, "families", "--n", "3", "--ncut", "6")
    fams = json.loads(out)["families"]
    assert rc == 0
    assert sum(len(f["energies"]) for f in fams) == 7


def test_state_dressed(capsys):
    rc, out, _ = run(capsys, "state", "--n", "3", "--ncut", "6", "--dress", "3")
    data = json.loads(out)
    assert rc == 0
    assert data["nF"] == 3
    assert data["residual"] < 1e-8


def test_state_bad_family(capsys):
    rc, _, _ = run(capsys, "state", "--n", "3", "--ncut", "6", "--family", "1,2")
    assert rc == 2


def test_state_energy_not_a_root(capsys):
    rc, _, _ = run(capsys, "state", "--n", "3", "--ncut", "6", "--energy", "1.0")
    assert rc == 2


def test_state_continuum(capsys):
    rc, out, _ = run(capsys, "state", "--n", "3", "--ncut", "0", "--mode", "continuum", "--energy", "1.5")
    assert rc == 0
    assert len(json.loads(out)["coeffs"]) > 10


def test_output_is_deterministic(capsys):
    argv = ("spectrum", "--n", "3", "--ncut", "8")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_warm_cache_equals_cold(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(sio.CACHE_ENV, str(tmp_path))
    argv = ("gram", "--n", "3", "--ncut", "6")
    cold = run(capsys, *argv)
    assert any(tmp_path.iterdir())
    warm = run(capsys, *argv)
    assert cold == warm and cold[0] == 0


def test_out_file(capsys, tmp_path):
    target = tmp_path / "basis.json"
    rc, out, _ = run(capsys, "basis", "--n", "2", "--ncut", "4", "--out", str(target))
    assert rc == 0 and out == ""
    assert json.loads(target.read_text())["dimension"] == 3


def test_verify_passing_suite(capsys):
    rc, out, _ = run(capsys, "verify", "overlap")
    assert rc == 0
    assert json.loads(out)["pass"] is True


def test_verify_failing_suite_exits_one(capsys):
    rc, out, _ = run(capsys, "verify", "appendix")
    data = json.loads(out)
    assert rc == 1
    assert data["failed"] > 0 and data["passed"] > 0


def test_expr_normal_order(capsys):
    rc, out, _ = run(capsys, "expr", "--n", "2", "(a2)(A2)")
    assert rc == 0
    assert "(A2)(a2)" in out.replace(" ", "")


def test_expr_parse_error(capsys):
    rc, _, _ = run(capsys, "expr", "--n", "2", "(q2")
    assert rc == 2
