"""Truncated two-variable series Z_p[[S, T]].

A :class:`BivarSeries` is stored as its T-expansion ``sum_j c_j(S) T^j``: the
row ``c_j`` is a :class:`~ggcheck.series.PowerSeries` in S. The generators
of the Galois groups are identified with ``1 + S`` and ``1 + T``.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

from ggcheck import helpers
from ggcheck.exceptions import InvalidArgumentError, UnboundedTailError
from ggcheck.padics import PadicInt, check_prime
from ggcheck.series import DEFAULT_CUTOFF, PowerSeries, binom_series

log = logging.getLogger(__name__)

Orientation = Literal["T", "S"]
Direction = Literal["forward", "backward"]
Specialization = Literal["S=0", "T=0", "both"]


@dataclass(frozen=True, eq=False)
class BivarSeries:
    """An element of Z_p[[S, T]] modulo ``(p**prec, S**D_S, T**D_T)``.

    ``t_polynomial`` marks series known to vanish in T-degree ``D_T`` and
    above, which is what exact substitutions in T require.
    """

    p: int
    prec: int
    rows: tuple[PowerSeries, ...]
    t_polynomial: bool = False

    def __post_init__(self):
        """Validate the rows and bring them to a common precision and cutoff."""
        check_prime(self.p)
        if not self.rows:
            raise InvalidArgumentError("A bivariate series needs a positive T cutoff.")
        if any(row.p != self.p for row in self.rows):
            raise InvalidArgumentError(f"Every row must be a {self.p}-adic series.")
        s_cutoff = min(row.cutoff for row in self.rows)
        rows = tuple(row.truncate(s_cutoff).with_precision(self.prec) for row in self.rows)
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_grid(
        cls,
        grid: Sequence[Sequence[int]],
        p: int,
        prec: int,
        cutoffs: tuple[int, int] | None = None,
        exact: bool = True,
    ) -> BivarSeries:
        """Build a polynomial from its coefficient grid.

        Args:
            grid: ``grid[i][j]`` is the coefficient of ``S^i T^j``.
            p: the prime.
            prec: the precision exponent.
            cutoffs: ``(D_S, D_T)``; defaults to ``DEFAULT_CUTOFF`` in S and one
                more than the T-degree in T.
            exact: whether the integers are exact coefficients.
        """
        t_len = max((len(row) for row in grid), default=1)
        d_s, d_t = cutoffs or (max(DEFAULT_CUTOFF, len(grid) + 1), t_len + 1)
        columns = [
            [row[j] if j < len(row) else 0 for row in grid] or [0] for j in range(t_len)
        ]
        rows = [PowerSeries.polynomial(col, p, prec, d_s, exact=exact) for col in columns]
        return cls.from_t_coefficients(rows, d_t)

    @classmethod
    def from_t_coefficients(
        cls, rows: Sequence[PowerSeries], t_cutoff: int | None = None
    ) -> BivarSeries:
        """Assemble ``sum_j rows[j] T^j``, a polynomial in T.

        Args:
            rows: the T-coefficients as series in S.
            t_cutoff: the T cutoff, at least ``len(rows)``.
        """
        if not rows:
            raise InvalidArgumentError("At least one T-coefficient is required.")
        first = rows[0]
        t_cutoff = t_cutoff or len(rows) + 1
        if t_cutoff < len(rows):
            raise InvalidArgumentError(
                f"T cutoff {t_cutoff} cannot hold {len(rows)} coefficients."
            )
        prec = min(row.prec for row in rows)
        s_cutoff = min(row.cutoff for row in rows)
        padded = list(rows) + [PowerSeries.zero(first.p, prec, s_cutoff)] * (
            t_cutoff - len(rows)
        )
        return cls(first.p, prec, tuple(padded), t_polynomial=True)

    @classmethod
    def constant(cls, series: PowerSeries, t_cutoff: int = 2) -> BivarSeries:
        """Embed a series in S as a T-constant."""
        return cls.from_t_coefficients([series], t_cutoff)

    @classmethod
    def t_variable(
        cls, p: int, prec: int, cutoffs: tuple[int, int] = (DEFAULT_CUTOFF, 3)
    ) -> BivarSeries:
        """The series ``T``."""
        d_s, d_t = cutoffs
        return cls.from_t_coefficients(
            [PowerSeries.zero(p, prec, d_s), PowerSeries.one(p, prec, d_s)], d_t
        )

    @classmethod
    def s_variable(
        cls, p: int, prec: int, cutoffs: tuple[int, int] = (DEFAULT_CUTOFF, 2)
    ) -> BivarSeries:
        """The series ``S``."""
        d_s, d_t = cutoffs
        return cls.from_t_coefficients([PowerSeries.variable(p, prec, d_s)], d_t)

    @property
    def s_cutoff(self) -> int:
        """Exclusive degree bound in S."""
        return self.rows[0].cutoff

    @property
    def t_cutoff(self) -> int:
        """Exclusive degree bound in T."""
        return len(self.rows)

    @property
    def cutoffs(self) -> tuple[int, int]:
        """``(D_S, D_T)``."""
        return self.s_cutoff, self.t_cutoff

    @property
    def grid(self) -> tuple[tuple[int, ...], ...]:
        """Residues ``c_ij`` of ``S^i T^j`` as a ``D_S x D_T`` grid."""
        return tuple(
            tuple(row.coeffs[i].residue for row in self.rows) for i in range(self.s_cutoff)
        )

    def coefficient(self, i: int, j: int) -> PadicInt:
        """Coefficient of ``S^i T^j``."""
        return self.t_coefficient(j).coefficient(i)

    def t_coefficient(self, j: int) -> PowerSeries:
        """Coefficient of ``T^j`` as a series in S."""
        if j < self.t_cutoff:
            return self.rows[j]
        if self.t_polynomial:
            return PowerSeries.zero(self.p, self.prec, self.s_cutoff)
        raise IndexError(f"T-coefficient {j} lies beyond the cutoff {self.t_cutoff}.")

    def t_degree(self) -> int:
        """Highest T-degree whose coefficient is not an exact zero."""
        for j in range(self.t_cutoff - 1, -1, -1):
            if not self.rows[j].is_exact_zero:
                return j
        return -1

    def truncate(self, s_cutoff: int, t_cutoff: int) -> BivarSeries:
        """Lower the cutoffs."""
        rows = tuple(row.truncate(s_cutoff) for row in self.rows[:t_cutoff])
        t_poly = self.t_polynomial and self.t_degree() < t_cutoff
        return BivarSeries(self.p, self.prec, rows, t_poly)

    def swap(self) -> BivarSeries:
        """Exchange the roles of S and T."""
        columns = [
            PowerSeries(
                self.p,
                self.prec,
                tuple(row.coeffs[i] for row in self.rows),
                self.t_polynomial,
            )
            for i in range(self.s_cutoff)
        ]
        s_poly = all(row.is_polynomial for row in self.rows)
        return BivarSeries(self.p, self.prec, tuple(columns), s_poly)

    def _check(self, other: BivarSeries) -> None:
        if not isinstance(other, BivarSeries):
            raise TypeError(f"Cannot combine BivarSeries with {type(other)}.")
        if other.p != self.p:
            raise InvalidArgumentError(f"Cannot combine series over Z_{self.p} and Z_{other.p}.")

    def __add__(self, other: BivarSeries) -> BivarSeries:
        self._check(other)
        d_t = min(self.t_cutoff, other.t_cutoff)
        d_s = min(self.s_cutoff, other.s_cutoff)
        a, b = self.truncate(d_s, d_t), other.truncate(d_s, d_t)
        rows = tuple(x + y for x, y in zip(a.rows, b.rows))
        return BivarSeries(
            self.p, min(self.prec, other.prec), rows, a.t_polynomial and b.t_polynomial
        )

    def __neg__(self) -> BivarSeries:
        return BivarSeries(self.p, self.prec, tuple(-row for row in self.rows), self.t_polynomial)

    def __sub__(self, other: BivarSeries) -> BivarSeries:
        return self + (-other)

    def __mul__(self, other: BivarSeries | PowerSeries | PadicInt | int) -> BivarSeries:
        if isinstance(other, (PowerSeries, PadicInt, int)):
            rows = tuple(row * other for row in self.rows)
            return BivarSeries(self.p, min(r.prec for r in rows), rows, self.t_polynomial)
        self._check(other)
        d_t = min(self.t_cutoff, other.t_cutoff)
        d_s = min(self.s_cutoff, other.s_cutoff)
        prec = min(self.prec, other.prec)
        a, b = self.truncate(d_s, d_t), other.truncate(d_s, d_t)
        rows = [PowerSeries.zero(self.p, prec, d_s) for _ in range(d_t)]
        for i, x in enumerate(a.rows):
            if x.is_exact_zero:
                continue
            for j, y in enumerate(b.rows[: d_t - i]):
                if not y.is_exact_zero:
                    rows[i + j] = rows[i + j] + x * y
        t_poly = a.t_polynomial and b.t_polynomial and a.t_degree() + b.t_degree() < d_t
        return BivarSeries(self.p, prec, tuple(rows), t_poly)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BivarSeries):
            return NotImplemented
        return (self.p, self.prec, self.grid) == (other.p, other.prec, other.grid)

    def __hash__(self) -> int:
        return hash((self.p, self.prec, self.grid))

    def to_string(self, modulus: bool = True) -> str:
        """Monomials ``c*S^i*T^j`` in graded-lex order, S before T."""
        monomials = [
            (i + j, i, j, c.residue)
            for j, row in enumerate(self.rows)
            for i, c in enumerate(row.coeffs)
            if c.residue
        ]
        monomials.sort(key=lambda m: (-m[0], -m[1]))
        terms = [helpers.format_monomial(c, [("S", i), ("T", j)]) for _, i, j, c in monomials]
        text = helpers.join_terms(terms)
        tails = []
        if not all(row.is_polynomial for row in self.rows):
            tails.append(f"S^{self.s_cutoff}")
        if not self.t_polynomial:
            tails.append(f"T^{self.t_cutoff}")
        if tails:
            text += f" + O({', '.join(tails)})"
        if modulus:
            text += " " + helpers.format_modulus(self.p, self.prec)
        return text

    def __str__(self) -> str:
        return self.to_string()


@dataclass(frozen=True)
class SeriesMatrix:
    """A square matrix of series in one variable over a common domain."""

    entries: tuple[tuple[PowerSeries, ...], ...]

    def __post_init__(self):
        """Check squareness and a uniform coefficient domain."""
        n = len(self.entries)
        if n < 1 or any(len(row) != n for row in self.entries):
            raise InvalidArgumentError(f"A SeriesMatrix must be square, found {n} rows.")
        domains = {(e.p, e.prec, e.cutoff) for row in self.entries for e in row}
        if len(domains) != 1:
            raise InvalidArgumentError(f"Entries live in different domains: {sorted(domains)}.")

    @classmethod
    def from_ints(
        cls,
        rows: Sequence[Sequence[Sequence[int]]],
        p: int,
        prec: int,
        cutoff: int = DEFAULT_CUTOFF,
    ) -> SeriesMatrix:
        """Build a matrix of exact polynomials from coefficient lists."""
        return cls(
            tuple(
                tuple(PowerSeries.polynomial(e, p, prec, cutoff, exact=True) for e in row)
                for row in rows
            )
        )

    @classmethod
    def identity(cls, n: int, p: int, prec: int, cutoff: int = DEFAULT_CUTOFF) -> SeriesMatrix:
        """The ``n x n`` identity matrix."""
        zero, one = PowerSeries.zero(p, prec, cutoff), PowerSeries.one(p, prec, cutoff)
        return cls(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @property
    def size(self) -> int:
        """Number of rows."""
        return len(self.entries)

    @property
    def p(self) -> int:
        """The prime."""
        return self.entries[0][0].p

    @property
    def prec(self) -> int:
        """The common coefficient precision."""
        return self.entries[0][0].prec

    @property
    def cutoff(self) -> int:
        """The common degree cutoff."""
        return self.entries[0][0].cutoff

    def entry(self, i: int, j: int) -> PowerSeries:
        """Entry in row ``i`` and column ``j``."""
        return self.entries[i][j]

    def _check(self, other: SeriesMatrix) -> None:
        if other.size != self.size:
            raise InvalidArgumentError(f"Sizes differ: {self.size} and {other.size}.")

    def __add__(self, other: SeriesMatrix) -> SeriesMatrix:
        self._check(other)
        return SeriesMatrix(
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            )
        )

    def __matmul__(self, other: SeriesMatrix) -> SeriesMatrix:
        self._check(other)
        n = self.size
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = self.entries[i][0] * other.entries[0][j]
                for k in range(1, n):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            rows.append(tuple(row))
        return SeriesMatrix(tuple(rows))

    def scale(self, c: PowerSeries | PadicInt | int) -> SeriesMatrix:
        """Multiply every entry by a series or scalar."""
        return SeriesMatrix(tuple(tuple(e * c for e in row) for row in self.entries))

    def is_zero(self) -> bool:
        """True when every entry vanishes modulo ``(p**prec, X**cutoff)``."""
        return all(not any(e.residues) for row in self.entries for e in row)


def determinant(
    entries: Sequence[Sequence[BivarSeries]], along: tuple[str, int] = ("row", 0)
) -> BivarSeries:
    """Determinant by cofactor expansion.

    Args:
        entries: a square array of bivariate series.
        along: ``("row", i)`` or ``("column", j)``, the line expanded first;
            minors are expanded along their first row.
    """
    n = len(entries)
    if n < 1 or any(len(row) != n for row in entries):
        raise InvalidArgumentError(f"Determinant of a non-square array with {n} rows.")
    kind, index = along
    if kind not in ("row", "column") or not 0 <= index < n:
        raise InvalidArgumentError(f"Cannot expand along {kind} {index} of a {n}x{n} array.")
    if n == 1:
        return entries[0][0]
    if kind == "column":
        entries = [list(col) for col in zip(*entries)]
    total: BivarSeries | None = None
    for k in range(n):
        minor = [
            [entries[r][c] for c in range(n) if c != k] for r in range(n) if r != index
        ]
        term = entries[index][k] * determinant(minor)
        if (index + k) % 2:
            term = -term
        total = term if total is None else total + term
    return total


def char_det(
    matrix: SeriesMatrix,
    orientation: Orientation = "T",
    t_cutoff: int | None = None,
    along: tuple[str, int] = ("row", 0),
) -> BivarSeries:
    """Characteristic determinant ``det(X I - F)``.

    With ``orientation="T"`` the entries of ``F`` are series in S and
    ``X = T``; with ``"S"`` they are series in T and ``X = S``. The result is
    monic of degree ``n`` in ``X``.

    Args:
        matrix: the relation matrix ``F``.
        orientation: the diagonal variable.
        t_cutoff: cutoff in the diagonal variable, defaults to ``n + 1``.
        along: expansion line, see :func:`determinant`.
    """
    if not isinstance(matrix, SeriesMatrix):
        raise InvalidArgumentError(f"Expected a SeriesMatrix, found {type(matrix)}.")
    n = matrix.size
    x_cutoff = t_cutoff or n + 1
    if x_cutoff <= n:
        raise InvalidArgumentError(f"Cutoff {x_cutoff} cannot hold a degree {n} polynomial.")
    p, prec, cutoff = matrix.p, matrix.prec, matrix.cutoff
    x = BivarSeries.t_variable(p, prec, (cutoff, x_cutoff))
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            entry = -BivarSeries.constant(matrix.entry(i, j), x_cutoff)
            row.append(x + entry if i == j else entry)
        rows.append(row)
    det = determinant(rows, along)
    leading = det.t_coefficient(n)
    if leading.residues != PowerSeries.one(p, prec, cutoff).residues or det.t_degree() != n:
        raise ArithmeticError(f"det(X I - F) is not monic of degree {n}: {det}")
    log.debug(f"char_det of a {n}x{n} matrix: {det}")
    return det if orientation == "T" else det.swap()


def matrix_substitute(f: BivarSeries, matrix: SeriesMatrix) -> SeriesMatrix:
    """Evaluate ``f(S, F) = sum_j c_j(S) F^j`` for a polynomial in T."""
    if not f.t_polynomial:
        raise InvalidArgumentError("Substituting a matrix needs a polynomial in T.")
    n = matrix.size
    identity = SeriesMatrix.identity(n, matrix.p, min(f.prec, matrix.prec), matrix.cutoff)
    degree = max(f.t_degree(), 0)
    acc = identity.scale(f.rows[degree])
    for j in range(degree - 1, -1, -1):
        acc = acc @ matrix + identity.scale(f.rows[j])
    return acc


def substitute_t(f: BivarSeries, phi: PowerSeries) -> PowerSeries:
    """The series ``f(S, phi(S))``.

    Exact for polynomials in T. Otherwise the T-tail is controlled by
    ``phi``: an exactly vanishing constant term bounds it S-adically and a
    constant term divisible by p bounds it p-adically.

    Raises:
        UnboundedTailError: when neither bound applies.
    """
    if phi.p != f.p:
        raise InvalidArgumentError(f"Cannot substitute a {phi.p}-adic series into Z_{f.p}[[S,T]].")
    cutoff = min(f.s_cutoff, phi.cutoff)
    prec = min(f.prec, phi.prec)
    if not f.t_polynomial:
        head = phi.coeffs[0]
        if head.is_exact_zero:
            cutoff = min(cutoff, f.t_cutoff)
        elif head.valuation().lower_bound >= 1:
            prec = int(min(prec, f.t_cutoff * head.valuation().lower_bound))
        else:
            raise UnboundedTailError(
                f"Substituting T = {phi} into a series truncated at T^{f.t_cutoff}."
            )
    phi = phi.truncate(cutoff).with_precision(prec)
    rows = [row.truncate(cutoff).with_precision(prec) for row in f.rows]
    degree = f.t_degree() if f.t_polynomial else f.t_cutoff - 1
    acc = rows[max(degree, 0)]
    for j in range(degree - 1, -1, -1):
        acc = acc * phi + rows[j]
    return acc


def _linear_change(f: BivarSeries, exponent: PadicInt) -> BivarSeries:
    # T -> c(S) (1 + T) - 1 with c = (1 + S)^exponent
    c = binom_series(exponent, 1, f.s_cutoff)
    one = PowerSeries.one(f.p, c.prec, f.s_cutoff)
    image = BivarSeries.from_t_coefficients([c - one, c], f.t_cutoff)
    degree = max(f.t_degree(), 0)
    acc = BivarSeries.constant(f.rows[degree], f.t_cutoff)
    for j in range(degree - 1, -1, -1):
        acc = acc * image + BivarSeries.constant(f.rows[j], f.t_cutoff)
    return acc


def ts_change(f: BivarSeries, u: PadicInt, s: int, direction: Direction = "forward") -> BivarSeries:
    """Move between the ``(S, T)`` and ``(S, T_s)`` coordinates.

    ``forward`` rewrites ``f(S, T)`` through ``T = (1 + T_s)(1 + S)^(-u p^s) - 1``;
    ``backward`` applies ``T_s = (1 + S)^(u p^s)(1 + T) - 1``. The two are
    mutually inverse up to truncation.

    Args:
        f: a polynomial in T.
        u: a p-adic unit.
        s: non-negative exponent.
        direction: ``forward`` or ``backward``.

    Raises:
        PrecisionUnderflowError: when the binomial expansion of an inexact
            ``u`` runs out of digits.
    """
    if not f.t_polynomial:
        raise InvalidArgumentError("Coordinate changes need a polynomial in T.")
    if u.p != f.p or not u.is_unit:
        raise InvalidArgumentError(f"u must be a {f.p}-adic unit, found {u}.")
    if s < 0:
        raise InvalidArgumentError(f"s must be non-negative, found {s}.")
    if direction not in ("forward", "backward"):
        raise InvalidArgumentError(f"Unknown direction {direction!r}.")
    exponent = u * f.p**s
    return _linear_change(f, -exponent if direction == "forward" else exponent)


def specialize(f: BivarSeries, which: Specialization) -> PowerSeries | PadicInt:
    """Restrict to ``S = 0`` (a series in T), ``T = 0`` (in S) or both."""
    if which == "T=0":
        return f.rows[0]
    if which == "both":
        return f.rows[0].coeffs[0]
    if which == "S=0":
        return PowerSeries(f.p, f.prec, tuple(row.coeffs[0] for row in f.rows), f.t_polynomial)
    raise InvalidArgumentError(f"Unknown specialization {which!r}.")
