"""Pytest session configuration."""

import random

import pytest

from ggcheck.fielddata import FieldRecord, bundled_record, bundled_records


@pytest.fixture()
def records():
    """The bundled records keyed by d."""
    return {rec.d: rec for rec in bundled_records()}


@pytest.fixture()
def rng():
    """A seeded generator so that randomised checks are reproducible."""
    return random.Random(20240107)


@pytest.fixture()
def make_record():
    """Build a record from the d=971 data with some fields replaced.

    Fields set to ``None`` are removed together with their provenance tag.
    """

    def build(**changes) -> FieldRecord:
        data = bundled_record(971).to_dict()
        for name, value in changes.items():
            if value is None:
                data.pop(name, None)
                data["provenance"].pop(name, None)
                continue
            data[name] = value
            if name not in ("p", "d", "class_group_k", "s_exp", "provenance"):
                data["provenance"][name] = "manual"
        return FieldRecord.from_dict(data)

    return build
