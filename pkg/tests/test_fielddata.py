"""Test the fielddata module."""

import itertools
import json
from importlib import resources

import pytest

from ggcheck.criteria import TowerDecision, fukuda_check
from ggcheck.exceptions import (
    ConstantTermError,
    InvalidArgumentError,
    SchemaError,
    SplitConditionError,
)
from ggcheck.fielddata import (
    FieldRecord,
    FitResult,
    bundled_record,
    bundled_records,
    candidate_fields,
    iwasawa_fit,
    load_record,
    record_diff,
    serialize_record,
)


def _data(**changes):
    data = bundled_record(971).to_dict()
    data.update(changes)
    return data


class TestSchema:
    def test_bundled(self, records):
        """The four bundled records load in (p, d) order."""
        assert [rec.key for rec in bundled_records()] == [(3, 971), (3, 5069), (3, 17291), (5, 2239)]
        assert records[5069].layer("N").ords == (2, 3, 3)
        assert records[5069].layer("cyclotomic") is None
        assert not records[5069].is_cyclic

    @pytest.mark.parametrize(
        "changes, pointer",
        [
            ({"foo": 1}, "/foo"),
            ({"p": 4}, "/p"),
            ({"p": 2}, "/p"),
            ({"p": True}, "/p"),
            ({"d": 12}, "/d"),
            ({"s_exp": 2}, "/s_exp"),
            ({"class_group_k": [0]}, "/class_group_k/0"),
            ({"layers": [{"tower": "Z", "c": 0, "ords": [1]}]}, "/layers/0/tower"),
            ({"hilbert_aux": {"real_quad_class_number": "7"}}, "/hilbert_aux/real_quad_class_number"),
        ],
    )
    def test_schema_error(self, changes, pointer):
        """Every violation is reported with its JSON pointer."""
        data = _data(**changes)
        if "layers" in changes:
            data["provenance"]["layers"] = "manual"
        with pytest.raises(SchemaError) as e:
            FieldRecord.from_dict(data)
        assert e.value.pointer == pointer

    def test_missing_required(self):
        """Test a missing required key."""
        data = _data()
        del data["s_exp"]
        with pytest.raises(SchemaError) as e:
            FieldRecord.from_dict(data)
        assert e.value.pointer == "/s_exp"

    def test_split_condition(self):
        """3 is inert in Q(sqrt(-1))."""
        with pytest.raises(SplitConditionError):
            FieldRecord.from_dict(_data(d=1))

    def test_constant_term(self):
        """char_T must vanish at T = 0."""
        with pytest.raises(ConstantTermError) as e:
            FieldRecord.from_dict(_data(char_T={"prec_exp": 4, "coeffs": [1, 1]}))
        assert e.value.pointer == "/char_T/coeffs/0"

    def test_untagged_field(self):
        """Every present optional field needs a provenance tag."""
        data = _data()
        del data["provenance"]["char_T"]
        with pytest.raises(SchemaError) as e:
            FieldRecord.from_dict(data)
        assert e.value.pointer == "/provenance/char_T"

    def test_tag_without_field(self):
        """A tag for an absent optional field is rejected."""
        data = _data()
        data["provenance"]["layers"] = "manual"
        with pytest.raises(SchemaError) as e:
            FieldRecord.from_dict(data)
        assert e.value.pointer == "/provenance/layers"

    def test_unknown_source(self):
        """Test that only known sources are accepted."""
        data = _data()
        data["provenance"]["char_T"] = {"source": "oracle"}
        with pytest.raises(SchemaError) as e:
            FieldRecord.from_dict(data)
        assert e.value.pointer == "/provenance/char_T"

    def test_engine_tag(self):
        """Engine tags may carry details and may cover required fields."""
        data = _data()
        tag = {"source": "cas", "engine": "PARI/GP 2.15.4", "script": "bnfinit(x^2 + 971, 1)"}
        data["provenance"]["class_group_k"] = tag
        assert FieldRecord.from_dict(data).provenance["class_group_k"] == tag

    def test_invalid_json(self):
        """Test that malformed JSON is a schema error."""
        with pytest.raises(SchemaError):
            load_record(b"{")
        with pytest.raises(SchemaError):
            load_record("[]")

    def test_without(self, records):
        """Dropping a field also drops its provenance tag."""
        rec = records[971].without("hilbert_aux")
        assert rec.hilbert_aux is None
        assert "hilbert_aux" not in rec.provenance
        with pytest.raises(InvalidArgumentError):
            records[971].without("s_exp")


class TestSerialization:
    @pytest.mark.parametrize("d", [971, 17291, 2239, 5069])
    def test_canonical_form(self, d):
        """The bundled files are stored in canonical form."""
        path = resources.files("ggcheck") / "data" / f"{d}.json"
        assert serialize_record(bundled_record(d)) == path.read_text(encoding="utf-8")

    def test_reload(self, records):
        """A serialized record loads back to the same record."""
        rec = records[5069]
        assert load_record(serialize_record(rec)) == rec

    def test_sorted_keys(self, records):
        """Top-level keys are sorted."""
        keys = list(json.loads(serialize_record(records[971])))
        assert keys == sorted(keys)

    def test_record_diff(self, records):
        """Only differing fields are listed and provenance is ignored."""
        rec = records[971]
        assert record_diff(rec, rec) == []
        data = rec.to_dict()
        data["hilbert_aux"] = {"real_quad_class_number": 21}
        data["provenance"]["hilbert_aux"] = "manual"
        diff = record_diff(rec, FieldRecord.from_dict(data))
        assert len(diff) == 1
        assert diff[0].startswith("hilbert_aux:")

    def test_record_diff_other_field(self, records):
        """Test that records of different fields cannot be compared."""
        with pytest.raises(InvalidArgumentError):
            record_diff(records[971], records[5069])

    def test_unknown_bundled(self):
        """Test that only the four examples are bundled."""
        with pytest.raises(InvalidArgumentError):
            bundled_record(7)


class TestSurvey:
    def test_candidate_fields(self):
        """3 splits in Q(sqrt(-d)) exactly for d = 2 mod 3."""
        assert candidate_fields(3, 20) == [2, 5, 11, 14, 17]

    def test_congruence_class(self):
        """Test filtering by a congruence class."""
        assert candidate_fields(3, 20, residue=2, modulus=4) == [2, 14]

    def test_bundled_are_candidates(self):
        """Every bundled field is found by the survey."""
        assert 971 in candidate_fields(3, 1000, d_min=900)
        assert 2239 in candidate_fields(5, 2240, d_min=2200)

    def test_bad_arguments(self):
        """Test that p must be an odd prime and the congruence complete."""
        with pytest.raises(InvalidArgumentError):
            candidate_fields(9, 20)
        with pytest.raises(InvalidArgumentError):
            candidate_fields(2, 20)
        with pytest.raises(InvalidArgumentError):
            candidate_fields(3, 20, residue=1)


class TestIwasawaFit:
    def test_late_window(self):
        """The fit may only hold from a later layer."""
        assert iwasawa_fit([1, 3, 3, 3], 3) == FitResult(0, 0, 3, 1)

    def test_no_fit(self):
        """Test a sequence no growth formula explains."""
        assert iwasawa_fit([0, 5, 1], 3) is None

    def test_too_short(self):
        """Test that three exponents are needed."""
        with pytest.raises(ValueError):
            iwasawa_fit([1, 2], 3)

    def test_planted(self):
        """Every planted mu <= 2, lambda <= 4, nu <= 9 is recovered and matches stabilisation."""
        for p, mu, lam, nu in itertools.product([3, 5], range(3), range(5), range(10)):
            seq = [mu * p**n + lam * n + nu for n in range(5)]
            fit = iwasawa_fit(seq, p)
            assert fit == FitResult(lam, mu, nu, 0)
            stable = fukuda_check(seq, 0) == TowerDecision.LAMBDA_MU_ZERO
            assert stable == (lam == 0 and mu == 0)

    def test_offset(self):
        """Test that start shifts the layer index."""
        fit = iwasawa_fit([5, 7, 9], 3, start=2)
        assert fit.to_dict() == {"lambda": 2, "mu": 0, "nu": 1, "window_start": 2}
