"""Populate field records from PARI/GP.

Each task is a self-contained GP script run in its own ``gp -q -f`` process.
Scripts print their results between sentinel lines::

    @@GGCHECK-VERSION 2.15.4
    @@GGCHECK-BEGIN class_group
    cyc [3]
    @@GGCHECK-END

so the output can be parsed without binding to the engine's library
interface. Every field returned is tagged with the engine version and the
script that produced it.
"""

from __future__ import annotations

import logging
import re
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

from sympy import multiplicity

from ggcheck.config import CasSettings
from ggcheck.exceptions import (
    CasError,
    CasTimeoutError,
    DataMissingError,
    EngineMissingError,
    ParseFailureError,
    TaskUnsupportedError,
)
from ggcheck.fielddata import TOWERS, FieldRecord

log = logging.getLogger(__name__)

BEGIN = "@@GGCHECK-BEGIN"
END = "@@GGCHECK-END"
VERSION = "@@GGCHECK-VERSION"
TASKS = ("class_group", "aux_class_number", "layer_class_numbers", "capitulation")

_PRELUDE = """default(parisize, "256M");
setrand(1);
print("{version} ", strjoin(apply(x -> Str(x), Vec(version())), "."));
print("{begin} {task}");
"""
_POSTLUDE = 'print("{end}");\n'


@dataclass(frozen=True)
class Task:
    """One engine task and its parameters."""

    name: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        """Check the task name."""
        if self.name not in TASKS:
            raise TaskUnsupportedError(f"Unknown task '{self.name}'. Use one of {list(TASKS)}.")


def parse_task(text: str) -> Task:
    """Parse a command-line task description.

    Accepted forms: ``class_group``, ``aux_class_number``,
    ``layers:<tower>:<depth>[:<c>]`` and ``capitulation:<layer>:<gen>,<gen>``
    with generator labels like ``p5`` (a prime above 5).
    """
    parts = text.split(":")
    name = parts[0]
    try:
        if name in ("class_group", "aux_class_number") and len(parts) == 1:
            return Task(name)
        if name == "layers" and len(parts) in (3, 4):
            c = int(parts[3]) if len(parts) == 4 else 0
            return Task(
                "layer_class_numbers", {"tower": parts[1], "depth": int(parts[2]), "c": c}
            )
        if name == "capitulation" and len(parts) == 3:
            return Task("capitulation", {"layer": int(parts[1]), "generators": parts[2].split(",")})
    except ValueError as e:
        raise ValueError(f"Bad format for task '{text}': {e}") from e
    raise ValueError(
        f"Bad format for task '{text}'. Use class_group, aux_class_number, "
        "layers:<tower>:<depth>[:<c>] or capitulation:<layer>:<gen>,<gen>."
    )


@dataclass(frozen=True)
class PartialRecord:
    """Record fields produced by the engine, each with its provenance tag."""

    p: int
    d: int
    fields: dict[str, Any]
    provenance: dict[str, Any]

    def __post_init__(self):
        """Every field must carry a provenance tag."""
        untagged = set(self.fields) - set(self.provenance)
        if untagged:
            raise ValueError(f"Fields {sorted(untagged)} have no provenance.")

    def apply(self, record: FieldRecord) -> FieldRecord:
        """Merge the fields into ``record`` and revalidate."""
        if record.key != (self.p, self.d):
            raise ValueError(f"Cannot apply data for {(self.p, self.d)} to {record.key}.")
        data = record.to_dict()
        for name, value in self.fields.items():
            if name == "layers":
                towers = {lay["tower"] for lay in value}
                value = [lay for lay in data.get("layers", []) if lay["tower"] not in towers] + value
            if name == "capitulation":
                value = data.get("capitulation", []) + value
            if name == "hilbert_aux":
                value = {**data.get("hilbert_aux", {}), **value}
            data[name] = value
        data["provenance"] = {**data["provenance"], **self.provenance}
        return FieldRecord.from_dict(data)

    def to_record(self) -> FieldRecord:
        """Build a new record; the class group must have been fetched."""
        if "class_group_k" not in self.fields:
            raise DataMissingError("class_group_k", "A new record needs the class_group task.")
        data = {"p": self.p, "d": self.d, **self.fields, "provenance": dict(self.provenance)}
        return FieldRecord.from_dict(data)


# -- scripts -------------------------------------------------------------------


def _wrap(task: str, body: str) -> str:
    return (
        _PRELUDE.format(version=VERSION, begin=BEGIN, task=task)
        + body
        + _POSTLUDE.format(end=END)
    )


def _layer_polynomial(record: FieldRecord | None, tower: str, n: int) -> str:
    polys = (record.defining_polynomials if record else None) or {}
    name = f"{tower}{n}"
    if name not in polys:
        raise TaskUnsupportedError(
            f"Layer {n} of the {tower} tower needs defining_polynomials['{name}']."
        )
    return polys[name].replace(" ", "")


def build_script(p: int, d: int, task: Task, record: FieldRecord | None = None) -> str:
    """Generate the GP script for one task.

    Args:
        p: the prime.
        d: the field is ``Q(sqrt(-d))``.
        task: what to compute.
        record: supplies defining polynomials for non-cyclotomic layers.
    """
    if task.name == "class_group":
        body = f"K = bnfinit(x^2 + {d}, 1);\nprint(\"cyc \", K.cyc);\n"
    elif task.name == "aux_class_number":
        if p == 3:
            body = f"print(\"real_quad \", bnfinit(x^2 - {3 * d}, 1).no);\n"
        else:
            body = (
                f"F = polredbest(polcompositum(x^2 + {d}, polcyclo({p}))[1]);\n"
                "print(\"k_zetap \", bnfinit(F, 1).no);\n"
            )
    elif task.name == "layer_class_numbers":
        tower, depth = task.params["tower"], int(task.params["depth"])
        if tower not in TOWERS:
            raise TaskUnsupportedError(f"Unknown tower '{tower}'.")
        lines = [f"print(\"ord 0 \", valuation(bnfinit(x^2 + {d}, 1).no, {p}));"]
        for n in range(1, depth + 1):
            if tower == "cyclotomic":
                poly = f"polredbest(polcompositum(x^2 + {d}, polsubcyclo({p}^{n + 1}, {p}^{n}))[1])"
            else:
                poly = f"polredbest({_layer_polynomial(record, tower, n)})"
            lines.append(f"print(\"ord {n} \", valuation(bnfinit({poly}, 1).no, {p}));")
        body = "\n".join(lines) + "\n"
    else:
        layer = int(task.params["layer"])
        poly = _layer_polynomial(record, "N", layer)
        lines = [
            f"K = bnfinit(x^2 + {d}, 1);",
            f"L = bnfinit({poly}, 1);",
            f"e = nfisincl(x^2 + {d}, L.pol)[1];",
        ]
        for label in task.params["generators"]:
            match = re.fullmatch(r"p(\d+)", label)
            if not match:
                raise TaskUnsupportedError(f"Generator label '{label}' is not of the form p<prime>.")
            q = match.group(1)
            lines += [
                f"pr = idealprimedec(K, {q})[1];",
                "a = lift(subst(lift(nfbasistoalg(K, pr.gen[2])), x, Mod(e, L.pol)));",
                f"J = idealadd(L, {q}, a);",
                f"print(\"principal {label} \", norml2(bnfisprincipal(L, J, 0)) == 0);",
            ]
        body = "\n".join(lines) + "\n"
    return _wrap(task.name, body)


# -- running and parsing -----------------------------------------------------------


def run_script(script: str, settings: CasSettings) -> str:
    """Run a script in a fresh engine process and return its standard output."""
    cmd = [settings.gp_path, "-q", "-f"]
    log.info(f"running {' '.join(cmd)} (timeout {settings.timeout}s)")
    try:
        result = subprocess.run(
            cmd, input=script, capture_output=True, text=True, timeout=settings.timeout
        )
    except FileNotFoundError as e:
        raise EngineMissingError(f"Engine '{settings.gp_path}' not found.") from e
    except subprocess.TimeoutExpired as e:
        raise CasTimeoutError(f"Engine gave no answer within {settings.timeout}s.") from e
    if result.returncode != 0:
        raise ParseFailureError(
            f"Engine exited with status {result.returncode}: {result.stderr.strip()}",
            raw=result.stdout,
        )
    return result.stdout


def parse_output(task: str, raw: str) -> tuple[str, list[str]]:
    """Extract the engine version and the payload lines of one task.

    Raises:
        ParseFailureError: when the sentinels are missing or out of order.
    """
    lines = [line.strip() for line in raw.splitlines()]
    version = next((ln.split(" ", 1)[1] for ln in lines if ln.startswith(VERSION + " ")), None)
    try:
        start = lines.index(f"{BEGIN} {task}")
        stop = lines.index(END, start)
    except ValueError as e:
        raise ParseFailureError(f"No {BEGIN} {task} ... {END} block in engine output.", raw) from e
    if version is None:
        raise ParseFailureError("Engine output lacks the version line.", raw)
    return version, [ln for ln in lines[start + 1 : stop] if ln]


def _int_vector(text: str, raw: str) -> list[int]:
    if not re.fullmatch(r"\[\s*(-?\d+\s*(,\s*-?\d+\s*)*)?\]", text):
        raise ParseFailureError(f"Expected an integer vector, found '{text}'.", raw)
    return [int(v) for v in re.findall(r"-?\d+", text)]


def _value(payload: list[str], key: str, raw: str) -> str:
    for line in payload:
        name, _, value = line.partition(" ")
        if name == key:
            return value.strip()
    raise ParseFailureError(f"Engine output lacks '{key}'.", raw)


def _fields(p: int, task: Task, payload: list[str], raw: str) -> dict[str, Any]:
    if task.name == "class_group":
        cyc = _int_vector(_value(payload, "cyc", raw), raw)
        exponents = sorted((int(multiplicity(p, c)) for c in cyc if c % p == 0), reverse=True)
        return {"class_group_k": exponents, "s_exp": sum(exponents)}
    if task.name == "aux_class_number":
        key = "real_quad" if p == 3 else "k_zetap"
        number = _value(payload, key, raw)
        if not number.isdigit():
            raise ParseFailureError(f"Expected a class number, found '{number}'.", raw)
        name = "real_quad_class_number" if p == 3 else "k_zetap_class_number"
        return {"hilbert_aux": {name: int(number)}}
    if task.name == "layer_class_numbers":
        depth = int(task.params["depth"])
        ords = []
        for n in range(depth + 1):
            line = next((ln for ln in payload if ln.startswith(f"ord {n} ")), None)
            if line is None or not line.split()[-1].isdigit():
                raise ParseFailureError(f"Expected 'ord {n} <int>' in engine output.", raw)
            ords.append(int(line.split()[-1]))
        layer = {"tower": task.params["tower"], "c": int(task.params.get("c", 0)), "ords": ords}
        return {"layers": [layer]}
    entries = []
    for label in task.params["generators"]:
        line = next((ln for ln in payload if ln.startswith(f"principal {label} ")), "")
        flag = line.split()[-1] if line else ""
        if flag not in ("0", "1"):
            raise ParseFailureError(f"Expected 'principal {label} 0|1', found '{line}'.", raw)
        entries.append(
            {"generator": label, "layer": int(task.params["layer"]), "principal": flag == "1"}
        )
    return {"capitulation": entries}


def cas_fetch(
    p: int,
    d: int,
    tasks: list[Task | str],
    settings: CasSettings | None = None,
    record: FieldRecord | None = None,
) -> PartialRecord:
    """Compute record fields with the external engine.

    Args:
        p: the prime.
        d: the field is ``Q(sqrt(-d))``.
        tasks: what to compute, as :class:`Task` objects or task strings.
        settings: engine path and timeout, defaults to the environment.
        record: an existing record supplying defining polynomials.

    Raises:
        EngineMissingError: the executable cannot be found.
        CasTimeoutError: a task exceeded the timeout.
        ParseFailureError: the output does not follow the protocol.
        TaskUnsupportedError: the task cannot be run for this field.
    """
    settings = settings or CasSettings.from_env()
    fields: dict[str, Any] = {}
    provenance: dict[str, Any] = {}
    for task in tasks:
        task = task if isinstance(task, Task) else parse_task(task)
        script = build_script(p, d, task, record)
        raw = run_script(script, settings)
        version, payload = parse_output(task.name, raw)
        produced = _fields(p, task, payload, raw)
        for name, value in produced.items():
            if name in ("layers", "capitulation") and name in fields:
                value = fields[name] + value
            fields[name] = value
            provenance[name] = {"source": "cas", "engine": f"PARI/GP {version}", "script": script}
    log.info(f"fetched {sorted(fields)} for p={p} d={d}")
    return PartialRecord(p, d, fields, provenance)


def fetch_many(
    pairs: list[tuple[int, int]],
    tasks: list[Task | str],
    settings: CasSettings | None = None,
    max_workers: int = 4,
) -> dict[tuple[int, int], PartialRecord | CasError]:
    """Run :func:`cas_fetch` for several fields concurrently, one process per worker.

    Returns:
        The partial record or the engine error for each ``(p, d)``.
    """
    settings = settings or CasSettings.from_env()

    def one(pair: tuple[int, int]) -> PartialRecord | CasError:
        try:
            return cas_fetch(*pair, tasks, settings)
        except CasError as e:
            log.warning(f"engine failed for p={pair[0]} d={pair[1]}: {e}")
            return e

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return dict(zip(pairs, pool.map(one, pairs)))
