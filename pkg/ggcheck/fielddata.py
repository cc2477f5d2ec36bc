"""Field records: schema, validation, bundled data and class-number fitting.

A record gathers the arithmetic data of an imaginary quadratic field
``k = Q(sqrt(-d))`` in which ``p`` splits, as needed by the criteria engine.
Records are JSON documents with a fixed set of top-level keys.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Any

from sympy import factorint, is_quad_residue, isprime

from ggcheck.exceptions import (
    ConstantTermError,
    InvalidArgumentError,
    SchemaError,
    SplitConditionError,
)

log = logging.getLogger(__name__)

REQUIRED_KEYS = ("p", "d", "class_group_k", "s_exp", "provenance")
OPTIONAL_KEYS = (
    "hilbert_aux",
    "char_T",
    "layers",
    "capitulation",
    "n0_exp",
    "normality",
    "h_infinity_lambda_zero",
    "defining_polynomials",
)
TOWERS = ("cyclotomic", "anticyclotomic", "N", "Nstar", "H")
SOURCES = ("bundled", "cas", "manual")
# required fields an engine may fill in
TAGGABLE_REQUIRED = ("class_group_k", "s_exp")


@dataclass(frozen=True)
class HilbertAux:
    """Auxiliary class numbers used to decide whether L_k lies in the Z_p^2-extension."""

    real_quad_class_number: int | None = None
    k_zetap_class_number: int | None = None

    def to_dict(self) -> dict:
        """Convert to the record JSON dialect, omitting absent values."""
        data = {
            "real_quad_class_number": self.real_quad_class_number,
            "k_zetap_class_number": self.k_zetap_class_number,
        }
        return {k: v for k, v in data.items() if v is not None}


@dataclass(frozen=True)
class CharPolyData:
    """The cyclotomic characteristic polynomial ``h(T)`` modulo ``p**prec_exp``."""

    prec_exp: int
    coeffs: tuple[int, ...]

    def to_dict(self) -> dict:
        """Convert to the record JSON dialect."""
        return {"prec_exp": self.prec_exp, "coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class Layer:
    """Exponents ``ord_p(#A_n)`` for ``n = 0, 1, ...`` along one Z_p-extension."""

    tower: str
    c: int
    ords: tuple[int, ...]

    def to_dict(self) -> dict:
        """Convert to the record JSON dialect."""
        return {"tower": self.tower, "c": self.c, "ords": list(self.ords)}


@dataclass(frozen=True)
class CapitulationEntry:
    """Whether the class of ``generator`` becomes principal in layer ``layer``."""

    generator: str
    layer: int
    principal: bool

    def to_dict(self) -> dict:
        """Convert to the record JSON dialect."""
        return {"generator": self.generator, "layer": self.layer, "principal": self.principal}


@dataclass(frozen=True)
class FieldRecord:
    """Validated arithmetic data for ``(p, Q(sqrt(-d)))``.

    ``class_group_k`` lists the exponents of the elementary divisors of the
    p-class group, ``s_exp`` is the exponent of ``[L_k : k]``. Every present
    optional field is tagged in ``provenance``.
    """

    p: int
    d: int
    class_group_k: tuple[int, ...]
    s_exp: int
    hilbert_aux: HilbertAux | None = None
    char_T: CharPolyData | None = None
    layers: tuple[Layer, ...] | None = None
    capitulation: tuple[CapitulationEntry, ...] | None = None
    n0_exp: int | None = None
    normality: bool | None = None
    h_infinity_lambda_zero: bool | None = None
    defining_polynomials: dict[str, str] | None = None
    provenance: dict[str, Any] = field(default_factory=dict)

    @property
    def key(self) -> tuple[int, int]:
        """The ``(p, d)`` pair identifying the record."""
        return self.p, self.d

    @property
    def is_cyclic(self) -> bool:
        """True when the p-class group is cyclic."""
        return len(self.class_group_k) <= 1

    def present_optional(self) -> list[str]:
        """Names of the optional fields carrying data."""
        return [name for name in OPTIONAL_KEYS if getattr(self, name) is not None]

    def layer(self, tower: str) -> Layer | None:
        """The first layer sequence recorded for ``tower``."""
        return next((lay for lay in self.layers or () if lay.tower == tower), None)

    def without(self, name: str) -> FieldRecord:
        """Copy of the record with an optional field removed.

        Args:
            name: the optional field to drop.
        """
        if name not in OPTIONAL_KEYS:
            raise InvalidArgumentError(f"'{name}' is not an optional record field.")
        provenance = {k: v for k, v in self.provenance.items() if k != name}
        return replace(self, **{name: None}, provenance=provenance)

    def to_dict(self) -> dict:
        """Convert the record to the JSON dialect, omitting absent optional fields."""
        data: dict[str, Any] = {
            "p": self.p,
            "d": self.d,
            "class_group_k": list(self.class_group_k),
            "s_exp": self.s_exp,
            "provenance": dict(self.provenance),
        }
        for name in self.present_optional():
            value = getattr(self, name)
            if isinstance(value, tuple):
                value = [item.to_dict() for item in value]
            elif hasattr(value, "to_dict"):
                value = value.to_dict()
            elif isinstance(value, dict):
                value = dict(value)
            data[name] = value
        return data

    @classmethod
    def from_dict(cls, data: Any) -> FieldRecord:
        """Create a record from decoded JSON, validating every invariant.

        Raises:
            SchemaError: with the JSON pointer of the first violation.
            SplitConditionError: if p does not split in ``Q(sqrt(-d))``.
            ConstantTermError: if ``char_T`` has a non-zero constant term.
        """
        if not isinstance(data, dict):
            raise SchemaError("a record must be a JSON object")
        unknown = sorted(set(data) - set(REQUIRED_KEYS) - set(OPTIONAL_KEYS))
        if unknown:
            raise SchemaError("unknown key", f"/{unknown[0]}")
        for name in REQUIRED_KEYS:
            if name not in data:
                raise SchemaError("required key is missing", f"/{name}")

        p = _int(data["p"], "/p", minimum=2)
        if p == 2 or not isprime(p):
            raise SchemaError(f"{p} is not an odd prime", "/p")
        d = _int(data["d"], "/d", minimum=1)
        if any(e > 1 for e in factorint(d).values()):
            raise SchemaError(f"{d} is not square-free", "/d")
        if (-d) % p == 0 or not is_quad_residue(-d % p, p):
            raise SplitConditionError(f"{p} does not split in Q(sqrt(-{d}))", "/d")
        class_group = tuple(_int_list(data["class_group_k"], "/class_group_k", minimum=1))
        s_exp = _int(data["s_exp"], "/s_exp", minimum=0)
        if s_exp != sum(class_group):
            raise SchemaError(
                f"s_exp {s_exp} differs from the order exponent {sum(class_group)} of A_k",
                "/s_exp",
            )

        values: dict[str, Any] = {}
        for name in OPTIONAL_KEYS:
            raw = data.get(name)
            if raw is not None:
                values[name] = _PARSERS[name](raw, f"/{name}", p)

        provenance = data["provenance"]
        if not isinstance(provenance, dict):
            raise SchemaError("provenance must be an object", "/provenance")
        tagged, present = set(provenance), set(values)
        if not present <= tagged <= present | set(TAGGABLE_REQUIRED):
            extra = sorted((tagged ^ present) - set(TAGGABLE_REQUIRED))[0]
            raise SchemaError(
                "provenance must tag every present optional field and nothing else", f"/provenance/{extra}"
            )
        for name, tag in provenance.items():
            source = tag.get("source") if isinstance(tag, dict) else tag
            if source not in SOURCES:
                raise SchemaError(f"unknown source {source!r}", f"/provenance/{name}")

        return cls(p, d, class_group, s_exp, provenance=dict(provenance), **values)


# -- field parsers ---------------------------------------------------------------


def _int(value: Any, pointer: str, minimum: int | None = None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemaError(f"expected an integer, found {value!r}", pointer)
    if minimum is not None and value < minimum:
        raise SchemaError(f"expected an integer >= {minimum}, found {value}", pointer)
    return value


def _bool(value: Any, pointer: str, p: int = 0) -> bool:
    if not isinstance(value, bool):
        raise SchemaError(f"expected a boolean, found {value!r}", pointer)
    return value


def _int_list(value: Any, pointer: str, minimum: int | None = None) -> list[int]:
    if not isinstance(value, list):
        raise SchemaError(f"expected a list, found {value!r}", pointer)
    return [_int(v, f"{pointer}/{i}", minimum) for i, v in enumerate(value)]


def _object(value: Any, pointer: str, keys: Sequence[str], required: Sequence[str] = ()) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(f"expected an object, found {value!r}", pointer)
    unknown = sorted(set(value) - set(keys))
    if unknown:
        raise SchemaError("unknown key", f"{pointer}/{unknown[0]}")
    for key in required:
        if key not in value:
            raise SchemaError("required key is missing", f"{pointer}/{key}")
    return value


def _hilbert_aux(value: Any, pointer: str, p: int) -> HilbertAux:
    keys = ("real_quad_class_number", "k_zetap_class_number")
    obj = _object(value, pointer, keys)
    parsed = {k: _int(obj[k], f"{pointer}/{k}", 1) for k in keys if obj.get(k) is not None}
    return HilbertAux(**parsed)


def _char_t(value: Any, pointer: str, p: int) -> CharPolyData:
    obj = _object(value, pointer, ("prec_exp", "coeffs"), ("prec_exp", "coeffs"))
    prec = _int(obj["prec_exp"], f"{pointer}/prec_exp", 1)
    coeffs = _int_list(obj["coeffs"], f"{pointer}/coeffs")
    if not coeffs:
        raise SchemaError("at least one coefficient is required", f"{pointer}/coeffs")
    if coeffs[0] != 0:
        raise ConstantTermError(
            f"h(0) must be exactly 0, found {coeffs[0]}", f"{pointer}/coeffs/0"
        )
    return CharPolyData(prec, tuple(coeffs))


def _layers(value: Any, pointer: str, p: int) -> tuple[Layer, ...]:
    if not isinstance(value, list):
        raise SchemaError(f"expected a list, found {value!r}", pointer)
    layers = []
    for i, item in enumerate(value):
        here = f"{pointer}/{i}"
        obj = _object(item, here, ("tower", "c", "ords"), ("tower", "c", "ords"))
        if obj["tower"] not in TOWERS:
            raise SchemaError(f"unknown tower {obj['tower']!r}", f"{here}/tower")
        c = _int(obj["c"], f"{here}/c", 0)
        layers.append(Layer(obj["tower"], c, tuple(_int_list(obj["ords"], f"{here}/ords", 0))))
    return tuple(layers)


def _capitulation(value: Any, pointer: str, p: int) -> tuple[CapitulationEntry, ...]:
    if not isinstance(value, list):
        raise SchemaError(f"expected a list, found {value!r}", pointer)
    entries = []
    keys = ("generator", "layer", "principal")
    for i, item in enumerate(value):
        here = f"{pointer}/{i}"
        obj = _object(item, here, keys, keys)
        if not isinstance(obj["generator"], str) or not obj["generator"]:
            raise SchemaError("expected a generator label", f"{here}/generator")
        entries.append(
            CapitulationEntry(
                obj["generator"],
                _int(obj["layer"], f"{here}/layer", 0),
                _bool(obj["principal"], f"{here}/principal"),
            )
        )
    return tuple(entries)


def _polynomials(value: Any, pointer: str, p: int) -> dict[str, str]:
    if not isinstance(value, dict):
        raise SchemaError(f"expected an object, found {value!r}", pointer)
    for name, poly in value.items():
        if not isinstance(poly, str):
            raise SchemaError("expected a polynomial string", f"{pointer}/{name}")
    return dict(value)


_PARSERS = {
    "hilbert_aux": _hilbert_aux,
    "char_T": _char_t,
    "layers": _layers,
    "capitulation": _capitulation,
    "n0_exp": lambda v, ptr, p: _int(v, ptr, 0),
    "normality": _bool,
    "h_infinity_lambda_zero": _bool,
    "defining_polynomials": _polynomials,
}


# -- loading and serialization ---------------------------------------------------


def load_record(data: bytes | str) -> FieldRecord:
    """Parse and validate a record from UTF-8 JSON.

    Args:
        data: the JSON document.

    Returns:
        The validated record.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise SchemaError(f"not UTF-8: {e}") from e
    try:
        decoded = json.loads(data)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e}") from e
    return FieldRecord.from_dict(decoded)


def serialize_record(record: FieldRecord) -> str:
    """Canonical JSON form: sorted keys, two-space indent and a final newline."""
    return json.dumps(record.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def bundled_record(d: int) -> FieldRecord:
    """Load the bundled record for ``Q(sqrt(-d))``."""
    path = resources.files("ggcheck") / "data" / f"{d}.json"
    if not path.is_file():
        raise InvalidArgumentError(f"No bundled record for d={d}.")
    return load_record(path.read_bytes())


def bundled_records() -> list[FieldRecord]:
    """All bundled records ordered by ``(p, d)``."""
    folder = resources.files("ggcheck") / "data"
    records = [
        load_record(item.read_bytes()) for item in folder.iterdir() if item.name.endswith(".json")
    ]
    return sorted(records, key=lambda r: r.key)


def record_diff(a: FieldRecord, b: FieldRecord) -> list[str]:
    """Field-by-field differences between two records of the same field.

    Provenance is not compared.

    Returns:
        One line per differing field, empty for identical data.
    """
    if a.key != b.key:
        raise InvalidArgumentError(f"Cannot compare records for {a.key} and {b.key}.")
    da, db = a.to_dict(), b.to_dict()
    names = [n for n in (*REQUIRED_KEYS, *OPTIONAL_KEYS) if n != "provenance"]
    return [f"{n}: {da.get(n)!r} != {db.get(n)!r}" for n in names if da.get(n) != db.get(n)]


def candidate_fields(
    p: int,
    d_max: int,
    residue: int | None = None,
    modulus: int | None = None,
    d_min: int = 2,
) -> list[int]:
    """Square-free ``d`` in ``[d_min, d_max)`` for which p splits in ``Q(sqrt(-d))``.

    Args:
        p: an odd prime.
        d_max: exclusive upper bound.
        residue: optional congruence class of ``d``.
        modulus: modulus of the congruence class.
        d_min: inclusive lower bound.
    """
    if p == 2 or not isprime(p):
        raise InvalidArgumentError(f"p must be an odd prime, found {p}.")
    if (residue is None) != (modulus is None):
        raise InvalidArgumentError("residue and modulus must be given together.")
    found = []
    for d in range(max(d_min, 1), d_max):
        if modulus and d % modulus != residue % modulus:
            continue
        if (-d) % p == 0 or not is_quad_residue(-d % p, p):
            continue
        if all(e == 1 for e in factorint(d).values()):
            found.append(d)
    return found


# -- Iwasawa growth ------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    """Parameters of ``e_n = mu p^n + lambda n + nu`` valid from ``window_start``."""

    lambda_: int
    mu: int
    nu: int
    window_start: int

    def to_dict(self) -> dict:
        """Convert to a JSON friendly dict."""
        return {
            "lambda": self.lambda_,
            "mu": self.mu,
            "nu": self.nu,
            "window_start": self.window_start,
        }


def iwasawa_fit(seq: Sequence[int], p: int, start: int = 0) -> FitResult | None:
    """Fit Iwasawa's growth formula to class-number exponents.

    The three parameters are solved from the first three entries of each
    candidate tail; the earliest tail reproduced exactly wins.

    Args:
        seq: ``ord_p(#A_n)`` for consecutive ``n``.
        p: the prime.
        start: the index ``n`` of ``seq[0]``.

    Returns:
        The fit, or ``None`` when no tail of length at least 3 fits.
    """
    if len(seq) < 3:
        raise ValueError(f"At least 3 consecutive exponents are needed, found {len(seq)}.")
    for w in range(len(seq) - 2):
        n = start + w
        d1, d2 = seq[w + 1] - seq[w], seq[w + 2] - seq[w + 1]
        scale = p**n * (p - 1) ** 2
        if (d2 - d1) % scale or d2 < d1:
            continue
        mu = (d2 - d1) // scale
        lam = d1 - mu * p**n * (p - 1)
        if lam < 0:
            continue
        nu = seq[w] - mu * p**n - lam * n
        tail = range(w, len(seq))
        if all(seq[i] == mu * p ** (start + i) + lam * (start + i) + nu for i in tail):
            log.debug(f"fit {list(seq)} from n={n}: mu={mu} lambda={lam} nu={nu}")
            return FitResult(lam, mu, nu, n)
    return None
