"""Truncated power series over Z_p.

A :class:`PowerSeries` holds the coefficients ``b_0 .. b_{D-1}`` of an element
of Z_p[[X]] modulo ``p**prec``; every operation is exact modulo
``(p**prec, X**D)``. A series flagged ``is_polynomial`` is known to vanish
beyond the cutoff, which is what polynomial-only algorithms (Newton polygons,
Hensel lifting, discriminants) require.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb

from sympy import Poly, symbols

from ggcheck import helpers
from ggcheck.exceptions import (
    AmbiguityError,
    CannotPrepareError,
    HenselConditionError,
    InvalidArgumentError,
    UnboundedTailError,
)
from ggcheck.padics import PadicInt, Valuation, binom_padic, check_prime

log = logging.getLogger(__name__)

DEFAULT_CUTOFF = 32

_X = symbols("X")


@dataclass(frozen=True)
class Undetermined:
    """A λ-invariant that is not visible below the degree cutoff."""

    cutoff: int

    def __str__(self) -> str:
        return f"undetermined below degree {self.cutoff}"


def _mul_lifts(a: int | None, b: int | None) -> int | None:
    if a == 0 or b == 0:
        return 0
    if a is None or b is None:
        return None
    return a * b


@dataclass(frozen=True, eq=False)
class PowerSeries:
    """A truncated element of Z_p[[X]]."""

    p: int
    prec: int
    coeffs: tuple[PadicInt, ...]
    is_polynomial: bool = False

    def __post_init__(self):
        """Validate the coefficient domain and reduce to the series precision."""
        check_prime(self.p)
        if len(self.coeffs) < 1:
            raise InvalidArgumentError("A power series needs a positive degree cutoff.")
        coeffs = []
        for c in self.coeffs:
            if c.p != self.p:
                raise InvalidArgumentError(f"Coefficient {c} is not a {self.p}-adic value.")
            if c.prec < self.prec:
                raise InvalidArgumentError(
                    f"Coefficient {c} has less precision than the series ({self.prec})."
                )
            coeffs.append(c if c.prec == self.prec else c.reduce(self.prec))
        object.__setattr__(self, "coeffs", tuple(coeffs))

    # -- construction ---------------------------------------------------------

    @classmethod
    def polynomial(
        cls,
        coefficients: Sequence[int],
        p: int,
        prec: int,
        cutoff: int | None = None,
        exact: bool = False,
    ) -> PowerSeries:
        """Build a polynomial from ascending integer coefficients.

        Args:
            coefficients: ``b_0, b_1, ...`` as integers.
            p: the prime.
            prec: the precision exponent.
            cutoff: the degree cutoff, defaults to ``max(DEFAULT_CUTOFF, len + 1)``.
            exact: whether the integers are the true coefficients rather than
                residues modulo ``p**prec``.
        """
        coefficients = [int(c) for c in coefficients]
        cutoff = cutoff or max(DEFAULT_CUTOFF, len(coefficients) + 1)
        values: list[PadicInt] = [
            PadicInt.from_int(c, p, prec, exact=exact) for c in coefficients[:cutoff]
        ]
        values += [PadicInt(p, prec, lift=0)] * (cutoff - len(values))
        dropped = coefficients[cutoff:]
        if any(dropped):
            log.warning(f"Polynomial of degree {len(coefficients) - 1} truncated at X^{cutoff}.")
        return cls(p, prec, tuple(values), is_polynomial=not any(dropped))

    @classmethod
    def _from_ints(
        cls,
        p: int,
        prec: int,
        values: Sequence[int],
        lifts: Sequence[int | None] | None = None,
        is_polynomial: bool = False,
    ) -> PowerSeries:
        lifts = lifts or [None] * len(values)
        coeffs = tuple(PadicInt(p, prec, v, lift) for v, lift in zip(values, lifts))
        return cls(p, prec, coeffs, is_polynomial)

    @classmethod
    def zero(cls, p: int, prec: int, cutoff: int = DEFAULT_CUTOFF) -> PowerSeries:
        """The exact zero series."""
        return cls.polynomial([0], p, prec, cutoff, exact=True)

    @classmethod
    def one(cls, p: int, prec: int, cutoff: int = DEFAULT_CUTOFF) -> PowerSeries:
        """The exact unit series ``1``."""
        return cls.polynomial([1], p, prec, cutoff, exact=True)

    @classmethod
    def variable(cls, p: int, prec: int, cutoff: int = DEFAULT_CUTOFF) -> PowerSeries:
        """The series ``X``."""
        return cls.polynomial([0, 1], p, prec, cutoff, exact=True)

    # -- accessors ------------------------------------------------------------

    @property
    def cutoff(self) -> int:
        """Exclusive degree bound ``D``."""
        return len(self.coeffs)

    @property
    def residues(self) -> tuple[int, ...]:
        """Coefficient residues modulo ``p**prec``."""
        return tuple(c.residue for c in self.coeffs)

    @property
    def modulus(self) -> int:
        """The coefficient modulus ``p**prec``."""
        return self.p**self.prec

    @property
    def is_exact_zero(self) -> bool:
        """True when every stored coefficient is an exact zero."""
        return self._exact_degree() < 0

    def coefficient(self, i: int) -> PadicInt:
        """Coefficient of ``X**i``; beyond the cutoff only for polynomials."""
        if i < self.cutoff:
            return self.coeffs[i]
        if self.is_polynomial:
            return PadicInt(self.p, self.prec, lift=0)
        raise IndexError(f"Coefficient {i} lies beyond the cutoff {self.cutoff}.")

    def degree(self) -> int:
        """Index of the highest coefficient that is not zero at precision, -1 for zero."""
        for i in range(self.cutoff - 1, -1, -1):
            if self.coeffs[i].residue:
                return i
        return -1

    def mu(self) -> Valuation:
        """μ-invariant of the series, see :func:`mu_invariant`."""
        return mu_invariant(self)

    def lambda_(self) -> int | Undetermined:
        """λ-invariant of the series, see :func:`lambda_invariant`."""
        return lambda_invariant(self)

    def evaluate(self, x: PadicInt | int) -> PadicInt:
        """Value of the series at ``x``, see :func:`eval_series`."""
        return eval_series(self, x)

    # -- arithmetic -----------------------------------------------------------

    def _check(self, other: PowerSeries) -> None:
        if not isinstance(other, PowerSeries):
            raise TypeError(f"Cannot combine PowerSeries with {type(other)}.")
        if other.p != self.p:
            raise InvalidArgumentError(
                f"Cannot combine series over Z_{self.p} and Z_{other.p}."
            )

    def truncate(self, cutoff: int) -> PowerSeries:
        """Drop the coefficients of degree ``cutoff`` and above."""
        if cutoff >= self.cutoff:
            return self
        kept_poly = self.is_polynomial and all(c.is_exact_zero for c in self.coeffs[cutoff:])
        return PowerSeries(self.p, self.prec, self.coeffs[:cutoff], kept_poly)

    def with_precision(self, prec: int) -> PowerSeries:
        """Reduce every coefficient to a lower precision."""
        if prec == self.prec:
            return self
        return PowerSeries(
            self.p, prec, tuple(c.reduce(prec) for c in self.coeffs), self.is_polynomial
        )

    def __add__(self, other: PowerSeries) -> PowerSeries:
        self._check(other)
        cutoff = min(self.cutoff, other.cutoff)
        a, b = self.truncate(cutoff), other.truncate(cutoff)
        coeffs = tuple(x + y for x, y in zip(a.coeffs, b.coeffs))
        return PowerSeries(
            self.p, min(self.prec, other.prec), coeffs, a.is_polynomial and b.is_polynomial
        )

    def __neg__(self) -> PowerSeries:
        return PowerSeries(self.p, self.prec, tuple(-c for c in self.coeffs), self.is_polynomial)

    def __sub__(self, other: PowerSeries) -> PowerSeries:
        return self + (-other)

    def __mul__(self, other: PowerSeries | PadicInt | int) -> PowerSeries:
        if isinstance(other, (PadicInt, int)):
            return self.scale(other)
        self._check(other)
        cutoff = min(self.cutoff, other.cutoff)
        prec = min(self.prec, other.prec)
        modulus = self.p**prec
        a, b = self.truncate(cutoff), other.truncate(cutoff)
        ra, rb = a.residues, b.residues
        la = [c.lift for c in a.coeffs]
        lb = [c.lift for c in b.coeffs]
        values, lifts = [], []
        for k in range(cutoff):
            total = 0
            lift: int | None = 0
            for i in range(k + 1):
                total += ra[i] * rb[k - i]
                term = _mul_lifts(la[i], lb[k - i])
                lift = None if term is None or lift is None else lift + term
            values.append(total % modulus)
            lifts.append(lift)
        is_poly = (
            a.is_polynomial and b.is_polynomial and a._exact_degree() + b._exact_degree() < cutoff
        )
        return PowerSeries._from_ints(self.p, prec, values, lifts, is_poly)

    __rmul__ = __mul__

    def _exact_degree(self) -> int:
        # highest index that is not an exact zero
        for i in range(self.cutoff - 1, -1, -1):
            if not self.coeffs[i].is_exact_zero:
                return i
        return -1

    def scale(self, c: PadicInt | int) -> PowerSeries:
        """Multiply every coefficient by a scalar."""
        coeffs = tuple(x * c for x in self.coeffs)
        prec = min(x.prec for x in coeffs)
        return PowerSeries(self.p, prec, coeffs, self.is_polynomial)

    def __pow__(self, exponent: int) -> PowerSeries:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = PowerSeries.one(self.p, self.prec, self.cutoff)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def shift(self, k: int) -> PowerSeries:
        """Multiply by ``X**k``, keeping the cutoff."""
        zeros = (PadicInt(self.p, self.prec, lift=0),) * k
        shifted = PowerSeries(self.p, self.prec, zeros + self.coeffs, self.is_polynomial)
        return shifted.truncate(self.cutoff)

    def divide_by_x(self, k: int) -> PowerSeries:
        """Drop the first ``k`` coefficients, i.e. divide by ``X**k`` (cutoff shrinks by ``k``)."""
        if k >= self.cutoff:
            raise InvalidArgumentError(f"Cannot divide by X^{k} below the cutoff {self.cutoff}.")
        return PowerSeries(self.p, self.prec, self.coeffs[k:], self.is_polynomial)

    def derivative(self) -> PowerSeries:
        """Formal derivative; the cutoff shrinks by one."""
        if self.cutoff == 1:
            return PowerSeries.zero(self.p, self.prec, 1)
        coeffs = tuple(self.coeffs[i] * i for i in range(1, self.cutoff))
        return PowerSeries(self.p, self.prec, coeffs, self.is_polynomial)

    def inverse(self) -> PowerSeries:
        """Inverse of a unit series (constant term a p-adic unit)."""
        b0 = self.coeffs[0].inverse()
        inv = [b0]
        for k in range(1, self.cutoff):
            acc = PadicInt(self.p, self.prec, lift=0)
            for i in range(1, k + 1):
                acc = acc + self.coeffs[i] * inv[k - i]
            inv.append(-(b0 * acc))
        is_poly = self.is_polynomial and self._exact_degree() <= 0
        return PowerSeries(self.p, self.prec, tuple(inv), is_poly)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return (self.p, self.prec, self.residues) == (other.p, other.prec, other.residues)

    def __hash__(self) -> int:
        return hash((self.p, self.prec, self.residues))

    # -- text -----------------------------------------------------------------

    def to_string(self, var: str = "X", modulus: bool = True) -> str:
        """Descending-degree textual form, e.g. ``T^2 + 64638*T (mod 3^11)``.

        Args:
            var: the variable name.
            modulus: whether to append the modulus annotation.
        """
        terms = [
            helpers.format_monomial(c.residue, [(var, i)])
            for i, c in reversed(list(enumerate(self.coeffs)))
            if c.residue
        ]
        text = helpers.join_terms(terms)
        if not self.is_polynomial:
            text += f" + O({var}^{self.cutoff})"
        if modulus:
            text += " " + helpers.format_modulus(self.p, self.prec)
        return text

    def __str__(self) -> str:
        return self.to_string()


@dataclass(frozen=True)
class DistinguishedPolynomial:
    """A monic polynomial of degree λ whose lower coefficients are divisible by p."""

    series: PowerSeries
    lambda_: int

    def __post_init__(self):
        """Check the distinguished shape."""
        s = self.series
        if self.lambda_ >= s.cutoff or s.coeffs[self.lambda_].residue != 1 % s.modulus:
            raise InvalidArgumentError(f"{s} is not monic of degree {self.lambda_}.")
        if any(c.residue for c in s.coeffs[self.lambda_ + 1 :]):
            raise InvalidArgumentError(f"{s} has terms above degree {self.lambda_}.")
        if any(c.residue % s.p for c in s.coeffs[: self.lambda_]):
            raise InvalidArgumentError(f"{s} has a lower coefficient prime to {s.p}.")

    def to_string(self, var: str = "X", modulus: bool = True) -> str:
        """Textual form, see :meth:`PowerSeries.to_string`."""
        return self.series.to_string(var, modulus)

    def __str__(self) -> str:
        return self.to_string()


@dataclass(frozen=True)
class Preparation:
    """Result of the p-adic Weierstrass preparation ``V = p^mu * P * U``."""

    mu: int
    distinguished: DistinguishedPolynomial
    unit: PowerSeries

    @property
    def slack(self) -> int:
        """Digits of precision lost by the preparation."""
        return self.mu


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of the points ``(i, vp(b_i))``."""

    vertices: tuple[tuple[int, int], ...]
    segments: tuple[tuple[Fraction, int], ...]

    @property
    def degree(self) -> int:
        """Abscissa of the last vertex."""
        return self.vertices[-1][0]

    def describe(self) -> str:
        """Short description used by reports and the CLI."""
        if not self.segments:
            return f"single vertex {self.vertices[0]}"
        if len(self.segments) == 1:
            return f"single segment slope {self.segments[0][0]}"
        slopes = ", ".join(f"{s} (length {n})" for s, n in self.segments)
        return f"{len(self.segments)} segments slopes {slopes}"


class Irreducibility(Enum):
    """One-sided outcome of the Newton polygon test."""

    IRREDUCIBLE = "irreducible"
    INCONCLUSIVE = "inconclusive"


class Squarefreeness(Enum):
    """Outcome of :func:`squarefree_check`."""

    SQUARE_FREE = "square-free"
    NOT_SQUARE_FREE = "not square-free"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SquarefreeCertificate:
    """Decision of :func:`squarefree_check` and the valuations backing it.

    ``method`` is ``discriminant`` (disc(h) non-zero at precision),
    ``factored`` (h = T*g with T exactly dividing once, g(0) and disc(g)
    non-zero at precision), ``exact-factor`` (T^2 divides h exactly) or
    ``none``.
    """

    decision: Squarefreeness
    method: str
    disc_val: Valuation
    cofactor_disc_val: Valuation | None = None
    precision: int = 0

    def to_dict(self) -> dict:
        """Convert the certificate to a JSON friendly dict."""
        return {
            "decision": self.decision.value,
            "method": self.method,
            "disc_val": str(self.disc_val),
            "cofactor_disc_val": None
            if self.cofactor_disc_val is None
            else str(self.cofactor_disc_val),
            "precision": self.precision,
        }


# -- invariants ----------------------------------------------------------------


def mu_invariant(v: PowerSeries) -> Valuation:
    """μ-invariant: the minimal coefficient valuation.

    Returns:
        ``Known(m)`` if some coefficient is non-zero at precision,
        ``AtLeast(N)`` if all vanish modulo ``p**N``, exact zeros included.
    """
    known = [c.valuation().value for c in v.coeffs if c.residue]
    if known:
        return Valuation.known(min(known))
    return Valuation.at_least(v.prec)


def lambda_invariant(v: PowerSeries) -> int | Undetermined:
    """λ-invariant: the index of the first unit coefficient."""
    for i, c in enumerate(v.coeffs):
        if c.is_unit:
            return i
    return Undetermined(v.cutoff)


# -- special series ------------------------------------------------------------


def nu_polynomial(m: int, p: int, prec: int, cutoff: int | None = None) -> PowerSeries:
    """The polynomial ``((1+S)^(p^m) - 1) / S``.

    Args:
        m: non-negative exponent.
        p: the prime.
        prec: the precision exponent.
        cutoff: degree cutoff, defaults to ``max(DEFAULT_CUTOFF, p**m)``.
    """
    if m < 0:
        raise InvalidArgumentError(f"m must be non-negative, found {m}.")
    n = p**m
    cutoff = cutoff or max(DEFAULT_CUTOFF, n)
    if cutoff <= n - 1:
        log.warning(f"nu_{m} has degree {n - 1}, truncated at S^{cutoff}.")
    return PowerSeries.polynomial([comb(n, i + 1) for i in range(n)], p, prec, cutoff, exact=True)


def binom_series(u: PadicInt, stride: int = 1, cutoff: int = DEFAULT_CUTOFF) -> PowerSeries:
    """The series ``(1 + X^stride)^u = sum_j C(u, j) X^(j*stride)``.

    Args:
        u: the exponent, a p-adic integer.
        stride: positive spacing of the non-zero terms.
        cutoff: degree cutoff.

    Raises:
        PrecisionUnderflowError: if a binomial coefficient exhausts the
            precision of ``u``.
    """
    if stride < 1:
        raise InvalidArgumentError(f"stride must be positive, found {stride}.")
    terms = {j * stride: binom_padic(u, j) for j in range((cutoff - 1) // stride + 1)}
    prec = min(c.prec for c in terms.values())
    zero = PadicInt(u.p, prec, lift=0)
    coeffs = tuple(terms[i].reduce(prec) if i in terms else zero for i in range(cutoff))
    is_poly = u.lift is not None and 0 <= u.lift and u.lift * stride < cutoff
    return PowerSeries(u.p, prec, coeffs, is_poly)


# -- evaluation and factors ----------------------------------------------------


def eval_series(v: PowerSeries, x: PadicInt | int) -> PadicInt:
    """Evaluate ``sum b_i x^i``.

    Polynomials evaluate exactly. For a truncated series the argument must be
    divisible by p so that the unknown tail is ``O(p^(D * vp(x)))``; the
    result is reduced to the precision this guarantees.

    Raises:
        UnboundedTailError: for a unit argument on a truncated series.
    """
    if isinstance(x, int):
        x = PadicInt.from_int(x, v.p, v.prec)
    if x.p != v.p:
        raise InvalidArgumentError(f"Cannot evaluate a {v.p}-adic series at a {x.p}-adic value.")
    prec = min(v.prec, x.prec)
    if not v.is_polynomial and not x.is_exact_zero:
        bound = x.valuation().lower_bound
        if bound < 1:
            raise UnboundedTailError(
                f"Evaluating a series truncated at degree {v.cutoff} at the unit {x}."
            )
        prec = int(min(prec, v.cutoff * bound))
    acc = PadicInt(v.p, prec, lift=0)
    for c in reversed(v.coeffs):
        acc = acc * x + c
    return acc.reduce(prec)


def extract_t_factor(h: PowerSeries) -> tuple[int, PowerSeries]:
    """Split ``h = X^a * g`` with ``g(0)`` non-zero at precision.

    Raises:
        AmbiguityError: if every coefficient vanishes at precision.
    """
    for a, c in enumerate(h.coeffs):
        if c.residue:
            return a, h.divide_by_x(a)
    raise AmbiguityError(f"All coefficients of {h} vanish, the multiplicity of X is ambiguous.")


# -- Weierstrass preparation -------------------------------------------------


def _conv(a: Sequence[int], b: Sequence[int], length: int, modulus: int) -> list[int]:
    out = [0] * length
    for i, x in enumerate(a[:length]):
        if x:
            for j, y in enumerate(b[: length - i]):
                out[i + j] += x * y
    return [c % modulus for c in out]


def _inverse_mod_x(a: Sequence[int], length: int, modulus: int) -> list[int]:
    b0 = pow(a[0], -1, modulus)
    inv = [b0]
    for k in range(1, length):
        acc = sum(a[i] * inv[k - i] for i in range(1, min(k, len(a) - 1) + 1))
        inv.append(-b0 * acc % modulus)
    return inv


def weierstrass_prepare(v: PowerSeries) -> Preparation:
    """p-adic Weierstrass preparation ``V = p^mu * P(X) * U(X)``.

    Coefficients beyond the cutoff are taken to be zero, so ``V`` is treated
    as a polynomial; ``P * U`` then equals ``V / p^mu`` modulo
    ``(p^(N - mu), X^D)``. The only precision lost is the division by
    ``p^mu``.

    Raises:
        InvalidArgumentError: for a series that vanishes at precision.
        CannotPrepareError: if ``V / p^mu`` has no unit coefficient below the cutoff.
    """
    mu = mu_invariant(v)
    if not mu.is_known:
        raise InvalidArgumentError(f"Cannot prepare {v}: it vanishes at precision {v.prec}.")
    m = mu.value
    reduced = PowerSeries(
        v.p, v.prec - m, tuple(c.divide_by_p_power(m) for c in v.coeffs), v.is_polynomial
    )
    lam = lambda_invariant(reduced)
    if isinstance(lam, Undetermined):
        raise CannotPrepareError(f"No unit coefficient of {reduced} below degree {v.cutoff}.")
    modulus = reduced.modulus
    cutoff = reduced.cutoff
    w = list(reduced.residues)
    low, high = w[:lam], w[lam:]
    # fixed point of R = low * U^-1 mod X^lam, U = high - tau(R * U); contracts by p
    unit = list(high)
    for _ in range(reduced.prec + 2):
        r = _conv(low, _inverse_mod_x(unit, lam, modulus), lam, modulus) if lam else []
        ru = _conv(r, unit, cutoff - 1 + lam, modulus) if lam else []
        tau = ru[lam:] + [0] * (len(high) - len(ru[lam:]))
        new_unit = [(h - t) % modulus for h, t in zip(high, tau)]
        if new_unit == unit:
            break
        unit = new_unit
    r = _conv(low, _inverse_mod_x(unit, lam, modulus), lam, modulus) if lam else []
    distinguished = PowerSeries._from_ints(
        v.p, reduced.prec, r + [1] + [0] * (cutoff - lam - 1), is_polynomial=True
    )
    unit_series = PowerSeries._from_ints(
        v.p, reduced.prec, unit + [0] * lam, is_polynomial=reduced.is_polynomial
    )
    log.debug(f"prepared {v}: mu={m}, lambda={lam}")
    return Preparation(m, DistinguishedPolynomial(distinguished, lam), unit_series)


# -- Newton polygons -----------------------------------------------------------


def _polynomial_degree(h: PowerSeries) -> int:
    if not h.is_polynomial:
        raise InvalidArgumentError(f"{h} is truncated, a polynomial is required.")
    deg = h.degree()
    if deg < 0 or not h.coeffs[deg].is_unit:
        raise AmbiguityError(f"The leading coefficient of {h} is not a unit at precision.")
    if any(not c.is_exact_zero for c in h.coeffs[deg + 1 :]):
        raise AmbiguityError(f"Coefficients of {h} above degree {deg} vanish only at precision.")
    return deg


def _cross(o: tuple[int, int], a: tuple[int, int], b: tuple[int, int]) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def newton_polygon(h: PowerSeries) -> NewtonPolygon:
    """Newton polygon of a polynomial with unit leading coefficient.

    Exact-zero coefficients contribute no point. A coefficient that vanishes
    only at precision contributes nothing when the polygon already passes
    below ``(i, N)``; otherwise the polygon is ambiguous.

    Raises:
        AmbiguityError: if the leading coefficient is not a unit or a
            zero-at-precision coefficient could change the polygon.
    """
    deg = _polynomial_degree(h)
    points, uncertain = [], []
    for i, c in enumerate(h.coeffs[: deg + 1]):
        val = c.valuation()
        if val.is_known:
            points.append((i, val.value))
        elif not val.is_infinite:
            uncertain.append((i, val.value))
    hull: list[tuple[int, int]] = []
    for pt in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    for i, bound in uncertain:
        if i < hull[0][0]:
            raise AmbiguityError(f"Coefficient {i} of {h} vanishes only modulo {h.p}^{bound}.")
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            if x1 <= i <= x2 and Fraction(bound) < y1 + Fraction(y2 - y1, x2 - x1) * (i - x1):
                raise AmbiguityError(
                    f"Coefficient {i} of {h} vanishes only modulo {h.p}^{bound}."
                )
    segments = tuple(
        (Fraction(y2 - y1, x2 - x1), x2 - x1) for (x1, y1), (x2, y2) in zip(hull, hull[1:])
    )
    return NewtonPolygon(tuple(hull), segments)


def irreducible_by_newton(h: PowerSeries) -> Irreducibility:
    """Irreducibility certificate over Z_p from the Newton polygon.

    A single segment from ``(0, v)`` to ``(n, 0)`` whose slope has
    denominator ``n`` forces every root to generate a totally ramified
    extension of degree ``n``. A polynomial of degree one is irreducible
    whatever its constant term. The test never claims reducibility.
    """
    if _polynomial_degree(h) == 1:
        return Irreducibility.IRREDUCIBLE
    polygon = newton_polygon(h)
    n = polygon.degree
    if (
        len(polygon.segments) == 1
        and polygon.vertices[0][0] == 0
        and polygon.segments[0][0].denominator == n
    ):
        return Irreducibility.IRREDUCIBLE
    return Irreducibility.INCONCLUSIVE


# -- square-freeness and roots -------------------------------------------------


def _discriminant_valuation(h: PowerSeries, deg: int) -> Valuation:
    if deg < 1:
        return Valuation.known(0)
    disc = Poly(list(reversed(h.residues[: deg + 1])), _X).discriminant()
    return PadicInt(h.p, h.prec, int(disc)).valuation()


def squarefree_check(h: PowerSeries) -> SquarefreeCertificate:
    """Certify that a polynomial with unit leading coefficient is square-free.

    The discriminant is a polynomial in the coefficients, so its residue is
    determined by the data; a non-zero residue proves every lift square-free.
    When it vanishes at precision, ``h = X * g`` with an exact simple factor
    ``X``, ``g(0) != 0`` and ``disc(g) != 0`` at precision also suffices.
    """
    deg = h.degree()
    if deg < 0 or not h.coeffs[deg].is_unit:
        return SquarefreeCertificate(
            Squarefreeness.INCONCLUSIVE, "none", Valuation.at_least(h.prec), precision=h.prec
        )
    if deg >= 2 and h.coeffs[0].is_exact_zero and h.coeffs[1].is_exact_zero:
        return SquarefreeCertificate(
            Squarefreeness.NOT_SQUARE_FREE, "exact-factor", Valuation.infinite(), precision=h.prec
        )
    disc_val = _discriminant_valuation(h, deg)
    if disc_val.is_known:
        return SquarefreeCertificate(
            Squarefreeness.SQUARE_FREE, "discriminant", disc_val, precision=h.prec
        )
    if h.coeffs[0].is_exact_zero:
        a, g = extract_t_factor(h)
        g_disc = _discriminant_valuation(g, deg - a)
        if a == 1 and g.coeffs[0].valuation().is_known and g_disc.is_known:
            return SquarefreeCertificate(
                Squarefreeness.SQUARE_FREE, "factored", disc_val, g_disc, precision=h.prec
            )
    return SquarefreeCertificate(Squarefreeness.INCONCLUSIVE, "none", disc_val, precision=h.prec)


def hensel_lift_root(h: PowerSeries, r0: PadicInt | int) -> PadicInt:
    """Lift an approximate root by Newton iteration.

    Requires ``v(h(r0)) > 2 v(h'(r0))``. The root is returned at precision
    ``N - v(h'(r0))``, the precision to which it is unique.

    Raises:
        HenselConditionError: if the starting point does not satisfy the
            condition, or the iteration fails to reach a root.
    """
    if isinstance(r0, int):
        r0 = PadicInt.from_int(r0, h.p, h.prec)
    if not h.is_polynomial:
        raise InvalidArgumentError(f"{h} is truncated, a polynomial is required.")
    prec = min(h.prec, r0.prec)
    h = h.with_precision(prec)
    r0 = r0.reduce(prec)
    dh = h.derivative()
    value_val = eval_series(h, r0).valuation()
    slope_val = eval_series(dh, r0).valuation()
    if not slope_val.is_known or value_val.lower_bound <= 2 * slope_val.value:
        raise HenselConditionError(
            f"Hensel condition fails at {r0}: v(h)={value_val}, v(h')={slope_val}.",
            value_valuation=value_val,
            slope_valuation=slope_val,
        )
    vd = slope_val.value
    modulus = h.modulus
    shift = h.p**vd
    r = r0.residue
    for _ in range(prec + 1):
        value = eval_series(h, PadicInt(h.p, prec, r)).residue
        if value == 0:
            break
        slope = eval_series(dh, PadicInt(h.p, prec, r)).residue
        r = (r - (value // shift) * pow(slope // shift, -1, modulus)) % modulus
    if eval_series(h, PadicInt(h.p, prec, r)).residue:
        raise HenselConditionError(
            f"Newton iteration from {r0} did not converge.", value_val, slope_val
        )
    log.debug(f"lifted root of {h} from {r0} to {r}")
    root = PadicInt(h.p, prec, r, r0.lift if r == r0.residue else None)
    return root.reduce(prec - vd)
