import json

import pytest

from phoneline.jsonio import (
    Fixed2,
    atomic_write_text,
    dumps_stable,
    format_float,
    sha256_hex,
    write_csv,
)


class TestFixed2:
    def test_renders_two_decimals(self):
        assert Fixed2(12345).render() == "123.45"
        assert Fixed2(5).render() == "0.05"
        assert Fixed2(0).render() == "0.00"

    def test_negative_sign_placement(self):
        assert Fixed2(-7605810).render() == "-76058.10"
        assert Fixed2(-5).render() == "-0.05"

    def test_behaves_as_int(self):
        assert Fixed2(100) + Fixed2(38) == 138


class TestFormatFloat:
    def test_integral_values_keep_decimal_point(self):
        assert format_float(120.0) == "120.0"
        assert format_float(0.0) == "0.0"

    def test_six_significant_digits(self):
        assert format_float(118.90999174) == "118.91"
        assert format_float(0.0123456789) == "0.0123457"

    def test_exact_mode_round_trips(self):
        x = 0.36995329861111115
        assert float(format_float(x, mode="exact")) == x

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            format_float(float("nan"))
        with pytest.raises(ValueError):
            format_float(float("inf"))


class TestDumpsStable:
    def test_parses_as_json_and_preserves_order(self):
        doc = {"b": 1, "a": [1.5, {"z": True, "y": None}], "m": Fixed2(123)}
        text = dumps_stable(doc)
        parsed = json.loads(text)
        assert list(parsed.keys()) == ["b", "a", "m"]
        assert parsed["m"] == 1.23

    def test_byte_stable_across_calls(self):
        doc = {"x": 1.2345678, "y": [Fixed2(-50), "s"]}
        assert dumps_stable(doc) == dumps_stable(doc)

    def test_empty_containers(self):
        assert json.loads(dumps_stable({"a": {}, "b": []})) == {"a": {}, "b": []}

    def test_unserialisable_type_rejected(self):
        with pytest.raises(TypeError):
            dumps_stable({"x": object()})


def test_atomic_write_creates_parents_and_replaces(tmp_path):
    target = tmp_path / "deep" / "dir" / "f.json"
    atomic_write_text(target, "one")
    atomic_write_text(target, "two")
    assert target.read_text() == "two"
    assert list(target.parent.glob(".f.json.*")) == []  # no temp residue


def test_sha256_hex():
    assert sha256_hex(b"") == ("e3b0c44298fc1c149afbf4c8996fb924"
                               "27ae41e4649b934ca495991b7852b855")


def test_write_csv(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(path, ["a", "b"], [["1", "2"], ["3", "4"]])
    assert path.read_text() == "a,b\n1,2\n3,4\n"
