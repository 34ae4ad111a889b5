"""
Tests for the JSON and CSV codecs.
"""
import io
import json
from pathlib import Path

import numpy as np
import pytest

from core.hardy import BoundaryGrid, RationalFunction, TaylorCoeffs
from core.operators import OperatorMatrix
from data_modules.serialization import (
    decode_complex,
    dump_report,
    function_from_dict,
    function_to_dict,
    grid_table,
    load_spec,
    operator_from_dict,
    operator_to_dict,
    pair_from_dict,
    save_csv_table,
    save_report,
    spec_from_dict,
    write_csv_table,
)
from tests.fixtures.sample_data import (
    B_TAYLOR,
    OPERATOR_HALF_2X2,
    OPERATOR_HALF_IDENTITY,
    OPERATOR_HALF_IDENTITY_ROWS,
    PAIR_SHIFT,
    SQRT_HALF,
)

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


class TestComplexCodec:
    def test_accepted_forms(self):
        assert decode_complex(2) == 2 + 0j
        assert decode_complex([1.0, -0.5]) == 1 - 0.5j
        assert decode_complex({"re": 0.25, "im": 1.0}) == 0.25 + 1j

    def test_rejects_other_forms(self):
        with pytest.raises(ValueError):
            decode_complex("1+2j")
        with pytest.raises(ValueError):
            decode_complex([1.0, 2.0, 3.0])


class TestSpecs:
    def test_rational_default_denominator(self):
        f = function_from_dict({"type": "rational", "num": [0.0, [SQRT_HALF, 0.0]]})
        assert isinstance(f, RationalFunction)
        assert np.isclose(f.evaluate(0.5), 0.5 * SQRT_HALF)

    def test_taylor_and_grid(self):
        assert isinstance(function_from_dict(B_TAYLOR), TaylorCoeffs)
        assert isinstance(function_from_dict({"type": "grid", "samples": [0.1] * 8}), BoundaryGrid)

    def test_unknown_or_incomplete(self):
        with pytest.raises(ValueError):
            function_from_dict({"type": "spline"})
        with pytest.raises(ValueError):
            function_from_dict({"type": "taylor"})

    def test_function_dict_keeps_values(self):
        f = RationalFunction([0.2, 0.1j], [1.0, -0.5])
        again = function_from_dict(function_to_dict(f))
        assert np.isclose(again.evaluate(0.3), f.evaluate(0.3))

    def test_pair(self):
        phi1, phi2 = pair_from_dict(PAIR_SHIFT)
        assert np.isclose(phi1.evaluate(0.4), SQRT_HALF)
        assert np.isclose(phi2.evaluate(0.4), 0.4 * SQRT_HALF)
        with pytest.raises(ValueError):
            pair_from_dict({"type": "pair", "phi1": B_TAYLOR, "phi2": B_TAYLOR})

    def test_operator(self):
        T = operator_from_dict(OPERATOR_HALF_IDENTITY)
        assert isinstance(T, OperatorMatrix)
        assert np.allclose(T.entries, 0.5 * np.eye(3))
        assert isinstance(spec_from_dict(OPERATOR_HALF_IDENTITY), OperatorMatrix)
        assert isinstance(spec_from_dict(PAIR_SHIFT), tuple)


class TestOperatorFormat:
    def test_row_major_without_type(self):
        T = spec_from_dict(OPERATOR_HALF_2X2)
        assert isinstance(T, OperatorMatrix)
        assert T.entries.shape == (2, 2)
        assert np.allclose(T.entries, 0.5 * np.eye(2))
        assert T.domain_label == "H"
        assert T.codomain_label == "H"

    def test_row_major_order(self):
        spec = {"dim_in": 3, "dim_out": 2, "entries": [1, 2, 3, [0.0, 1.0], 5, 6]}
        T = operator_from_dict(spec)
        assert T.entries.shape == (2, 3)
        assert T.entries[0, 2] == 3
        assert T.entries[1, 0] == 1j

    def test_labels_and_interior(self):
        spec = dict(OPERATOR_HALF_IDENTITY)
        spec["labels"] = {
            "domain": "K",
            "codomain": "K",
            "interior": {"dim_in": 1, "dim_out": 3, "entries": [1, 0, 0]},
        }
        T = operator_from_dict(spec)
        assert T.domain_label == "K"
        assert T.interior.shape == (3, 1)

    def test_legacy_rows_still_read(self):
        T = operator_from_dict(OPERATOR_HALF_IDENTITY_ROWS)
        assert np.allclose(T.entries, 0.5 * np.eye(3))

    def test_wrong_entry_count(self):
        with pytest.raises(ValueError):
            operator_from_dict({"dim_in": 2, "dim_out": 2, "entries": [1, 0, 0]})
        with pytest.raises(ValueError):
            operator_from_dict({"dim_in": 0, "dim_out": 2, "entries": []})

    def test_bad_labels(self):
        spec = dict(OPERATOR_HALF_2X2, labels=["H", "H"])
        with pytest.raises(ValueError):
            operator_from_dict(spec)

    def test_emits_same_shape(self):
        T = OperatorMatrix(np.array([[0.5, 0.25j, 0.0], [0.0, 0.1, 0.2]]), "K", "L")
        spec = operator_to_dict(T)
        assert {"dim_in", "dim_out", "entries", "labels"} <= set(spec)
        assert "type" not in spec
        assert (spec["dim_in"], spec["dim_out"]) == (3, 2)
        assert spec["entries"][1] == [0.0, 0.25]
        assert spec["labels"] == {"domain": "K", "codomain": "L"}
        assert np.allclose(operator_from_dict(json.loads(json.dumps(spec))).entries, T.entries)

    def test_example_file(self):
        T = load_spec(str(FIXTURES / "operator_half_2x2.json"))
        assert isinstance(T, OperatorMatrix)
        assert np.allclose(T.entries, 0.5 * np.eye(2))


class TestFiles:
    def test_load_spec(self, tmp_path):
        path = tmp_path / "pair.json"
        path.write_text(json.dumps(PAIR_SHIFT))
        phi1, _ = load_spec(str(path))
        assert np.isclose(phi1.evaluate(0.0), SQRT_HALF)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ValueError):
            load_spec(str(path))

    def test_report_is_deterministic(self):
        report = {"b": np.float64(0.5), "a": [np.int64(3), 1 + 2j], "flag": np.bool_(True)}
        text = dump_report(report)
        assert text == dump_report(dict(reversed(list(report.items()))))
        assert json.loads(text) == {"a": [3, [1.0, 2.0]], "b": 0.5, "flag": True}

    def test_save_report_creates_directory(self, tmp_path):
        path = tmp_path / "out" / "report.json"
        save_report({"verdict": "pass"}, str(path))
        assert json.loads(path.read_text()) == {"verdict": "pass"}


class TestCsv:
    def test_grid_table(self):
        header, rows = grid_table([1.0, 1j, -1.0, -1j])
        assert header == ["t", "re", "im", "abs"]
        assert len(rows) == 4
        assert np.isclose(rows[1][0], np.pi / 2)
        assert np.isclose(rows[1][3], 1.0)

    def test_write_and_save(self, tmp_path):
        stream = io.StringIO()
        write_csv_table(["x", "y"], [[0.5, 1]], stream)
        assert stream.getvalue() == "x,y\n0.5,1\n"
        path = tmp_path / "tables" / "t.csv"
        save_csv_table(["x"], [[0.25]], str(path))
        assert path.read_text() == "x\n0.25\n"
