import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symqm import io as sio
from symqm.fock_basis import gram_matrix, enumerate_basis
from symqm.hamiltonian import hamiltonian_matrix


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_float_round_trips(x):
    s = sio.format_float(x)
    assert float(s) == x
    assert "." in s or "e" in s or "inf" in s


def test_format_float_integer_gets_point():
    assert sio.format_float(3.0) == "3.0"
    assert sio.format_float(0.1) == "0.10000000000000001"


def test_format_float_rejects_nan():
    with pytest.raises(ValueError):
        sio.format_float(float("nan"))


@given(st.fractions())
def test_fraction_text_round_trip(x):
    assert sio.parse_fraction(sio.fraction_text(x)) == x


def test_fraction_text_integers_are_plain():
    assert sio.fraction_text(Fraction(4, 2)) == "2"
    assert sio.fraction_text(Fraction(-3, 6)) == "-1/2"


def test_dumps_is_valid_json_and_deterministic():
    obj = {"b": [1, 2.5, Fraction(1, 3)], "a": {"x": np.float64(0.1), "flag": np.bool_(True)}, "e": []}
    text = sio.dumps(obj)
    assert text == sio.dumps(obj)
    back = json.loads(text)
    assert back["b"] == [1, 2.5, "1/3"]
    assert back["a"] == {"x": 0.1, "flag": True}
    assert list(back) == ["b", "a", "e"]


def test_dumps_rejects_unknown_types():
    with pytest.raises(TypeError):
        sio.dumps({"x": object()})


def test_csv_text():
    text = sio.csv_text(["i", "v", "q"], [[0, 1.0, Fraction(1, 2)]])
    assert text == "i,v,q\n0,1.0,1/2\n"


def test_env_overrides_cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(sio.CACHE_ENV, str(tmp_path / "env"))
    assert sio.resolve_cache_dir(tmp_path / "arg") == tmp_path / "env"
    monkeypatch.delenv(sio.CACHE_ENV)
    assert sio.resolve_cache_dir(tmp_path / "arg") == tmp_path / "arg"
    assert sio.resolve_cache_dir(None) is None


def test_cache_round_trip(tmp_path, monkeypatch):
    monkeypatch.delenv(sio.CACHE_ENV, raising=False)
    h1, s1 = sio.load_matrices(3, 5, tmp_path)
    files = sorted(p.name for p in tmp_path.iterdir())
    assert len(files) == 2 and all(f.endswith(".json") for f in files)
    h2, s2 = sio.load_matrices(3, 5, tmp_path)
    b = enumerate_basis(3, 5)
    assert h2.entries == h1.entries == hamiltonian_matrix(b).entries
    assert s2.entries == s1.entries == gram_matrix(b).entries
