"""Decision engine for weak GGC and GGC on imaginary quadratic fields.

Every criterion returns a three-valued answer and the pipeline records one
:class:`TraceEntry` per criterion it consults. Verdicts are one-sided: the
engine reports when GGC or weak GGC is proved and otherwise stays
inconclusive, naming the first precondition that failed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Any

from sympy import multiplicity

from ggcheck.exceptions import (
    AmbiguityError,
    DataMissingError,
    InvalidArgumentError,
    InvalidCharError,
)
from ggcheck.fielddata import FieldRecord
from ggcheck.padics import PadicInt, Valuation
from ggcheck.series import (
    Irreducibility,
    PowerSeries,
    SquarefreeCertificate,
    Squarefreeness,
    Undetermined,
    extract_t_factor,
    irreducible_by_newton,
    lambda_invariant,
    mu_invariant,
    newton_polygon,
    squarefree_check,
)

log = logging.getLogger(__name__)

VALUATION_READING = "exponent: ord_p(g0(0)) > s where p^s = [L_k : k]"


class Decision(Enum):
    """Three-valued answer of a criterion."""

    TRUE = "True"
    FALSE = "False"
    UNKNOWN = "Unknown"


class TowerDecision(Enum):
    """Outcome of the Z_p-extension tests."""

    LAMBDA_MU_ZERO = "LambdaMuZero"
    LAMBDA_ZERO = "LambdaZero"
    UNKNOWN = "Unknown"


class Level(IntEnum):
    """Verdict strength, ordered."""

    INCONCLUSIVE = 0
    WEAK_GGC_HOLDS = 1
    GGC_HOLDS = 2

    @property
    def label(self) -> str:
        """Name used in reports and JSON."""
        return _LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> Level:
        """Inverse of :attr:`label`."""
        for level, name in _LABELS.items():
            if name == label:
                return level
        raise ValueError(f"Unknown verdict level '{label}'. Use one of {list(_LABELS.values())}.")


_LABELS = {
    Level.INCONCLUSIVE: "Inconclusive",
    Level.WEAK_GGC_HOLDS: "WeakGGCHolds",
    Level.GGC_HOLDS: "GGCHolds",
}


@dataclass(frozen=True)
class TraceEntry:
    """One consulted criterion.

    ``grants`` is the verdict level the entry establishes on its own, if any.
    """

    criterion: str
    inputs: dict[str, Any]
    outcome: str
    statement: str
    reading: str | None = None
    grants: Level | None = None

    def to_dict(self) -> dict:
        """Convert the entry to a JSON friendly dict."""
        return {
            "criterion": self.criterion,
            "inputs": dict(self.inputs),
            "outcome": self.outcome,
            "statement": self.statement,
            "reading": self.reading,
            "grants": None if self.grants is None else self.grants.label,
        }

    @classmethod
    def from_dict(cls, data: dict) -> TraceEntry:
        """Create an entry from the output of :meth:`to_dict`."""
        grants = data.get("grants")
        return cls(
            data["criterion"],
            dict(data.get("inputs", {})),
            data["outcome"],
            data.get("statement", ""),
            data.get("reading"),
            None if grants is None else Level.from_label(grants),
        )


@dataclass(frozen=True)
class Verdict:
    """Strongest justified conclusion and the trace supporting it."""

    level: Level
    trace: tuple[TraceEntry, ...] = ()
    reason: str | None = None

    def to_dict(self) -> dict:
        """Convert the verdict to a JSON friendly dict."""
        return {
            "level": self.level.label,
            "reason": self.reason,
            "trace": [entry.to_dict() for entry in self.trace],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Verdict:
        """Create a verdict from the output of :meth:`to_dict`."""
        trace = tuple(TraceEntry.from_dict(entry) for entry in data.get("trace", []))
        return cls(Level.from_label(data["level"]), trace, data.get("reason"))


def replay_trace(trace: tuple[TraceEntry, ...] | list[TraceEntry]) -> Level:
    """Recompute the verdict level from the levels granted along a trace.

    GGC needs both a weak GGC entry and an upgrade entry.
    """
    granted = {entry.grants for entry in trace}
    if Level.WEAK_GGC_HOLDS not in granted:
        return Level.INCONCLUSIVE
    if Level.GGC_HOLDS in granted:
        return Level.GGC_HOLDS
    return Level.WEAK_GGC_HOLDS


# -- characteristic polynomial -----------------------------------------------------


@dataclass(frozen=True)
class CharData:
    """Invariants of the cyclotomic characteristic polynomial ``h(T)``."""

    h: PowerSeries
    lambda_cyc: int | Undetermined
    mu: Valuation
    squarefree: SquarefreeCertificate
    g0_val: Valuation
    t_multiplicity: int
    cofactor: PowerSeries

    @property
    def lambda_at_least_two(self) -> Decision:
        """Whether the cyclotomic λ-invariant is at least 2."""
        if isinstance(self.lambda_cyc, Undetermined):
            return Decision.UNKNOWN
        return Decision.TRUE if self.lambda_cyc >= 2 else Decision.FALSE


def char_analysis(h: PowerSeries, p: int | None = None) -> CharData:
    """Derive λ, μ, square-freeness and ``vp(g0(0))`` from ``h(T)``.

    ``h`` must vanish at ``T = 0``; its constant term is treated as an exact
    zero. ``g0_val`` is the valuation of the constant term of ``h / T``.

    Raises:
        InvalidCharError: if ``h(0)`` is not zero.
    """
    if p is not None and h.p != p:
        raise InvalidArgumentError(f"h is a {h.p}-adic polynomial, expected p={p}.")
    if h.coeffs[0].residue:
        raise InvalidCharError(f"h(0) must vanish, found {h.coeffs[0]}.")
    coeffs = (PadicInt(h.p, h.prec, lift=0), *h.coeffs[1:])
    exact = PowerSeries(h.p, h.prec, coeffs, h.is_polynomial)
    try:
        a, g = extract_t_factor(exact)
    except AmbiguityError as e:
        raise InvalidCharError(f"h vanishes modulo {h.p}^{h.prec}: {e}") from e
    data = CharData(
        h=exact,
        lambda_cyc=lambda_invariant(exact),
        mu=mu_invariant(exact),
        squarefree=squarefree_check(exact),
        g0_val=exact.coefficient(1).valuation(),
        t_multiplicity=a,
        cofactor=g,
    )
    log.debug(f"char analysis of {h}: lambda={data.lambda_cyc} g0_val={data.g0_val}")
    return data


def record_char(rec: FieldRecord) -> CharData:
    """Run :func:`char_analysis` on the record's ``char_T``."""
    if rec.char_T is None:
        raise DataMissingError("char_T")
    h = PowerSeries.polynomial(rec.char_T.coeffs, rec.p, rec.char_T.prec_exp)
    return char_analysis(h, rec.p)


# -- individual criteria ---------------------------------------------------------


def hilbert_in_ztilde(rec: FieldRecord) -> Decision:
    """Decide whether the p-Hilbert class field lies in the Z_p^2-extension.

    A trivial p-class group gives ``TRUE`` and a non-cyclic one ``FALSE``. For
    ``p = 3`` and ``d`` not congruent to 3 mod 9 the answer is ``TRUE`` exactly
    when 3 does not divide the class number of ``Q(sqrt(3d))``. For ``p >= 5``
    equal p-class numbers of ``k`` and ``k(zeta_p)`` give ``TRUE``.

    Raises:
        DataMissingError: when the auxiliary class number is absent.
    """
    if not rec.class_group_k:
        return Decision.TRUE
    if not rec.is_cyclic:
        return Decision.FALSE
    aux = rec.hilbert_aux
    if rec.p == 3:
        if rec.d % 9 == 3:
            return Decision.UNKNOWN
        if aux is None or aux.real_quad_class_number is None:
            raise DataMissingError("hilbert_aux", "hilbert_aux.real_quad_class_number is required.")
        return Decision.FALSE if aux.real_quad_class_number % 3 == 0 else Decision.TRUE
    if aux is None or aux.k_zetap_class_number is None:
        raise DataMissingError("hilbert_aux", "hilbert_aux.k_zetap_class_number is required.")
    if int(multiplicity(rec.p, aux.k_zetap_class_number)) == rec.s_exp:
        return Decision.TRUE
    return Decision.UNKNOWN


@dataclass(frozen=True)
class IndexReport:
    """Consistency of the decomposition index ``p^n0`` with the ingested data."""

    consistent: bool
    normal: Decision
    n0_lower: int
    n0_upper: int | None
    notes: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        """Convert the report to a JSON friendly dict."""
        return {
            "consistent": self.consistent,
            "normal": self.normal.value,
            "n0_lower": self.n0_lower,
            "n0_upper": self.n0_upper,
            "notes": list(self.notes),
        }


def index_bounds_validate(
    n0_exp: int | None,
    s_exp: int,
    g0_val: Valuation,
    normal: bool | None = None,
    hilbert_in: Decision = Decision.UNKNOWN,
) -> IndexReport:
    """Check the index bounds of the decomposition group of p.

    With ``e`` the exponent of ``[L_k ∩ k~ : k]`` (``e <= s``, equal when
    ``L_k`` lies in ``k~``): ``n0 <= vp(g0(0))`` always, ``n0 <= e`` exactly
    when ``D_p`` is normal, and then ``n0 = vp(g0(0))``.
    """
    notes: list[str] = []
    consistent = True
    g0 = g0_val.value if g0_val.is_known else None
    upper = g0
    lower = 0
    inferred = Decision.UNKNOWN if normal is None else Decision(str(normal))
    e_known = hilbert_in == Decision.TRUE

    if e_known and g0 is not None:
        implied = Decision.TRUE if g0 <= s_exp else Decision.FALSE
        if inferred not in (Decision.UNKNOWN, implied):
            consistent = False
            notes.append(f"normality {normal} contradicts vp(g0(0))={g0} against s={s_exp}")
        inferred = implied
    if g0_val.kind == "at_least" and e_known and g0_val.value > s_exp:
        inferred = Decision.FALSE

    if inferred == Decision.TRUE:
        upper = s_exp if upper is None else min(upper, s_exp)
        if e_known and g0 is not None:
            lower = g0
    elif inferred == Decision.FALSE:
        lower = s_exp + 1 if e_known else 1
    if upper is not None and lower > upper:
        consistent = False
        notes.append(f"no n0 satisfies {lower} <= n0 <= {upper}")

    if n0_exp is not None:
        if n0_exp < lower or (upper is not None and n0_exp > upper):
            consistent = False
            notes.append(f"n0={n0_exp} outside [{lower}, {upper}]")
        lower = upper = n0_exp

    if g0 is not None and inferred == Decision.UNKNOWN:
        notes.append(f"n0 <= {g0}; if D_p is normal then n0 <= {min(g0, s_exp)}")
    if upper == 0:
        notes.append("degenerate: D_p is the whole group, all indices are 1")
    if inferred == Decision.TRUE and lower == upper:
        notes.append(f"anticyclotomic characteristic ideal ((1+S)^(p^{lower}) - 1)")
    if inferred == Decision.FALSE:
        notes.append(f"if mu(g0) = 0 then lambda(g0) >= p^{s_exp}")
    return IndexReport(consistent, inferred, lower, upper, tuple(notes))


def p_split_p_rational(
    rec: FieldRecord,
    char: CharData | None = None,
    hilbert: Decision | None = None,
) -> Decision:
    """Decide whether ``k`` is p-split p-rational.

    ``TRUE`` needs ``L_k`` inside ``k~``, λ at least 2 and a normal ``D_p``
    whose index is ``p^vp(g0(0))``. Any refuted conjunct gives ``FALSE``, in
    particular ``vp(g0(0)) > s``, which makes ``D_p`` non-normal.

    Raises:
        DataMissingError: when ``char_T`` is absent.
    """
    char = char or record_char(rec)
    if hilbert is None:
        try:
            hilbert = hilbert_in_ztilde(rec)
        except DataMissingError:
            hilbert = Decision.UNKNOWN
    if hilbert == Decision.FALSE or not rec.is_cyclic:
        return Decision.FALSE
    if char.lambda_at_least_two == Decision.FALSE:
        return Decision.FALSE
    if char.g0_val.lower_bound > rec.s_exp:
        return Decision.FALSE
    if hilbert != Decision.TRUE or char.lambda_at_least_two != Decision.TRUE:
        return Decision.UNKNOWN
    return Decision.TRUE if char.g0_val.is_known else Decision.UNKNOWN


def weak_ggc_by_valuation(
    rec: FieldRecord, char: CharData, hilbert: Decision
) -> tuple[TraceEntry, str | None]:
    """Weak GGC from the valuation of ``g0(0)``.

    Needs ``L_k`` inside ``k~``, λ at least 2, a square-free ``h`` and
    ``vp(g0(0)) > s``.

    Returns:
        The trace entry and the first failed clause, ``None`` on success.
    """
    inputs = {
        "hilbert_in_ztilde": hilbert.value,
        "lambda_cyc": str(char.lambda_cyc),
        "squarefree": char.squarefree.decision.value,
        "g0_val": str(char.g0_val),
        "s_exp": rec.s_exp,
    }
    failed = None
    if hilbert != Decision.TRUE:
        failed = "L_k in k~ not established"
    elif char.lambda_at_least_two != Decision.TRUE:
        failed = "lambda_cyc >= 2 not established"
    elif char.squarefree.decision != Squarefreeness.SQUARE_FREE:
        failed = "square-free generator not certified"
    elif not char.g0_val.is_known:
        failed = "vp(g0(0)) not known at precision"
    elif char.g0_val.value <= rec.s_exp:
        failed = f"vp(g0(0))={char.g0_val.value} does not exceed s={rec.s_exp}"
    entry = TraceEntry(
        "weak-ggc-valuation",
        inputs,
        "WeakGGCHolds" if failed is None else f"not applicable: {failed}",
        "L_k in k~, lambda_cyc >= 2, square-free char ideal and ord_p(g0(0)) > [L_k:k] "
        "give weak GGC",
        reading=VALUATION_READING,
        grants=Level.WEAK_GGC_HOLDS if failed is None else None,
    )
    return entry, failed


def ggc_upgrade(char: CharData, weak: Verdict) -> Verdict:
    """Upgrade weak GGC to GGC when ``g = h / T`` is certified irreducible.

    The certificate is trivial for a degree-one cofactor and otherwise comes
    from the Newton polygon. Without it the weak verdict is returned unchanged.
    """
    if weak.level != Level.WEAK_GGC_HOLDS:
        return weak
    g = char.cofactor
    degree = None
    try:
        decision = irreducible_by_newton(g)
        degree = g.degree()
        try:
            certificate = newton_polygon(g).describe()
        except AmbiguityError:
            certificate = "degree 1"
    except (AmbiguityError, InvalidArgumentError) as e:
        decision, certificate = Irreducibility.INCONCLUSIVE, str(e)
    upgraded = decision == Irreducibility.IRREDUCIBLE and char.t_multiplicity == 1
    entry = TraceEntry(
        "ggc-prime-coinvariants",
        {
            "cofactor": g.to_string("T"),
            "degree": degree,
            "certificate": certificate,
        },
        "GGCHolds" if upgraded else "not applicable: cofactor irreducibility not certified",
        "weak GGC and a prime characteristic ideal of the coinvariants give GGC",
        grants=Level.GGC_HOLDS if upgraded else None,
    )
    if not upgraded:
        return Verdict(weak.level, (*weak.trace, entry), weak.reason)
    return Verdict(Level.GGC_HOLDS, (*weak.trace, entry))


def fukuda_check(ords: list[int] | tuple[int, ...], c: int) -> TowerDecision:
    """λ = μ = 0 from two equal consecutive p-class numbers at or after layer ``c``.

    Args:
        ords: ``ord_p(#A_n)`` for ``n = 0, 1, ...``.
        c: a layer beyond which every ramified prime is totally ramified.

    Raises:
        DataMissingError: when the sequence does not reach layer ``c + 1``.
    """
    if c < 0:
        raise InvalidArgumentError(f"c must be non-negative, found {c}.")
    if len(ords) < c + 2:
        raise DataMissingError(
            "layers", f"Layers {c} and {c + 1} are needed, only {len(ords)} recorded."
        )
    for n in range(c, len(ords) - 1):
        if ords[n] == ords[n + 1]:
            return TowerDecision.LAMBDA_MU_ZERO
    return TowerDecision.UNKNOWN


def capitulation_check(rec: FieldRecord) -> TowerDecision:
    """λ = 0 for the tower when every generator of ``A_k`` capitulates in it.

    Raises:
        DataMissingError: when the record lists no capitulation data.
    """
    if not rec.class_group_k:
        return TowerDecision.LAMBDA_ZERO
    if rec.capitulation is None:
        raise DataMissingError("capitulation")
    generators = list(dict.fromkeys(entry.generator for entry in rec.capitulation))
    if len(generators) < len(rec.class_group_k):
        return TowerDecision.UNKNOWN
    principal = {entry.generator for entry in rec.capitulation if entry.principal}
    if all(gen in principal for gen in generators):
        return TowerDecision.LAMBDA_ZERO
    return TowerDecision.UNKNOWN


# -- pipeline --------------------------------------------------------------------


def _lambda_n_zero(rec: FieldRecord, trace: list[TraceEntry]) -> bool:
    try:
        outcome = capitulation_check(rec)
        detail = f"{len(rec.capitulation or ())} capitulation entries"
    except DataMissingError as e:
        outcome, detail = TowerDecision.UNKNOWN, str(e)
    trace.append(
        TraceEntry(
            "capitulation",
            {"class_group_k": list(rec.class_group_k), "data": detail},
            outcome.value,
            "lambda(N_inf/k) = 0 iff every class of A_k capitulates in N_inf",
        )
    )
    if outcome == TowerDecision.LAMBDA_ZERO:
        return True
    layer = rec.layer("N")
    if layer is None:
        return False
    try:
        stable = fukuda_check(layer.ords, layer.c)
    except DataMissingError:
        stable = TowerDecision.UNKNOWN
    trace.append(
        TraceEntry(
            "class-number-stabilization",
            {"tower": "N", "c": layer.c, "ords": list(layer.ords)},
            stable.value,
            "#A_n = #A_(n+1) for some n >= c gives lambda = mu = 0",
        )
    )
    return stable == TowerDecision.LAMBDA_MU_ZERO


def verdict_pipeline(rec: FieldRecord) -> Verdict:
    """Run every criterion on a record and return the strongest verdict.

    Order: characteristic polynomial, Hilbert class field, p-split
    p-rationality, then the valuation path, the tower path
    (λ(N_inf/k) = 0 plus square-freeness, for fields that are not p-split
    p-rational) and the p-rational path, and finally the GGC upgrade.
    """
    trace: list[TraceEntry] = []
    failures: list[str] = []

    try:
        char = record_char(rec)
    except (DataMissingError, InvalidCharError) as e:
        trace.append(TraceEntry("char-analysis", {}, f"missing: {e}", "h(T) = T * g(T)"))
        return Verdict(Level.INCONCLUSIVE, tuple(trace), str(e))
    trace.append(
        TraceEntry(
            "char-analysis",
            {"h": char.h.to_string("T")},
            f"lambda={char.lambda_cyc} mu={char.mu} g0_val={char.g0_val} "
            f"squarefree={char.squarefree.decision.value} ({char.squarefree.method})",
            "T divides h; g0(0) has the valuation of the constant term of h / T",
        )
    )

    try:
        hilbert = hilbert_in_ztilde(rec)
        detail = None
    except DataMissingError as e:
        hilbert, detail = Decision.UNKNOWN, str(e)
        failures.append(str(e))
    trace.append(
        TraceEntry(
            "hilbert-in-ztilde",
            {"p": rec.p, "d": rec.d, "aux": rec.hilbert_aux and rec.hilbert_aux.to_dict()},
            hilbert.value if detail is None else f"{hilbert.value}: {detail}",
            "class number tests for L_k inside the Z_p^2-extension",
        )
    )

    rational = p_split_p_rational(rec, char, hilbert)
    report = index_bounds_validate(rec.n0_exp, rec.s_exp, char.g0_val, rec.normality, hilbert)
    trace.append(
        TraceEntry(
            "p-split-p-rational",
            {"g0_val": str(char.g0_val), "s_exp": rec.s_exp, "index": report.to_dict()},
            rational.value,
            "p-split p-rational iff D_p normal of index #(Z_p/g0(0)) and lambda_cyc >= 2",
        )
    )

    entry, failed = weak_ggc_by_valuation(rec, char, hilbert)
    trace.append(entry)
    weak = failed is None
    if failed:
        failures.append(failed)

    if not weak:
        if rational != Decision.FALSE:
            failures.append(f"p-split p-rationality is {rational.value}, tower path needs False")
        else:
            lambda_n = _lambda_n_zero(rec, trace)
            squarefree = char.squarefree.decision == Squarefreeness.SQUARE_FREE
            weak = lambda_n and squarefree
            if not lambda_n:
                failures.append("lambda(N_inf/k) = 0 not established")
            elif not squarefree:
                failures.append("square-free generator not certified")
            trace.append(
                TraceEntry(
                    "weak-ggc-tower",
                    {"lambda_n_zero": lambda_n, "squarefree": squarefree},
                    "WeakGGCHolds" if weak else "not applicable",
                    "not p-split p-rational, lambda(N_inf/k) = 0 and a square-free "
                    "generator give weak GGC",
                    grants=Level.WEAK_GGC_HOLDS if weak else None,
                )
            )

    if not weak and rational == Decision.TRUE:
        weak = rec.h_infinity_lambda_zero is True
        if not weak:
            failures.append("lambda(H_inf/H) = 0 not recorded")
        trace.append(
            TraceEntry(
                "weak-ggc-p-rational",
                {"h_infinity_lambda_zero": rec.h_infinity_lambda_zero},
                "WeakGGCHolds" if weak else "not applicable",
                "p-split p-rational with lambda(H_inf/H) = 0 gives weak GGC",
                grants=Level.WEAK_GGC_HOLDS if weak else None,
            )
        )

    if not weak:
        return Verdict(Level.INCONCLUSIVE, tuple(trace), failures[0] if failures else None)
    verdict = ggc_upgrade(char, Verdict(Level.WEAK_GGC_HOLDS, tuple(trace)))
    log.debug(f"verdict for p={rec.p} d={rec.d}: {verdict.level.label}")
    return verdict
