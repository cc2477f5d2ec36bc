"""Finite-precision p-adic integers.

A :class:`PadicInt` is a residue modulo ``p**prec``. Precision only ever goes
down through arithmetic; nothing renormalises behind the caller's back.
A value may also remember the exact integer it was built from (``lift``),
which is how an exact zero is told apart from a zero at precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

from sympy import binomial, factorial, isprime, multiplicity

from ggcheck.exceptions import InvalidArgumentError, NotInvertibleError, PrecisionUnderflowError

ValuationKind = Literal["known", "at_least", "infinite"]


@lru_cache(maxsize=64)
def check_prime(p: int) -> int:
    """Validate that ``p`` is a prime number and return it."""
    if not isinstance(p, int) or isinstance(p, bool) or p < 2 or not isprime(p):
        raise InvalidArgumentError(f"p must be a prime number, found {p!r}.")
    return p


@dataclass(frozen=True)
class Valuation:
    """Outcome of a valuation computation.

    ``known`` carries the exact valuation, ``at_least`` the precision at
    which the value vanished and ``infinite`` marks an exact zero.
    """

    kind: ValuationKind
    value: int = 0

    @classmethod
    def known(cls, v: int) -> Valuation:
        """Exact valuation ``v``."""
        return cls("known", v)

    @classmethod
    def at_least(cls, n: int) -> Valuation:
        """Zero modulo ``p**n``, valuation unknown beyond ``n``."""
        return cls("at_least", n)

    @classmethod
    def infinite(cls) -> Valuation:
        """Valuation of an exact zero."""
        return cls("infinite", 0)

    @property
    def is_known(self) -> bool:
        """True when the valuation is exactly determined."""
        return self.kind == "known"

    @property
    def is_infinite(self) -> bool:
        """True for the valuation of an exact zero."""
        return self.kind == "infinite"

    @property
    def lower_bound(self) -> float:
        """Largest number the valuation is guaranteed to reach."""
        if self.kind == "infinite":
            return float("inf")
        return self.value

    def to_dict(self) -> dict:
        """Convert the valuation to a JSON friendly dict."""
        return {"kind": self.kind, "value": self.value}

    @classmethod
    def from_dict(cls, data: dict) -> Valuation:
        """Create a valuation from the output of :meth:`to_dict`."""
        return cls(data["kind"], int(data.get("value", 0)))

    def __str__(self) -> str:
        if self.kind == "known":
            return str(self.value)
        if self.kind == "at_least":
            return f">={self.value}"
        return "inf"


def vp(n: int, p: int) -> Valuation:
    """p-adic valuation of an exact integer.

    Args:
        n: an exact, untruncated integer.
        p: a prime number.

    Returns:
        ``Valuation.known(v)`` with ``p**v`` exactly dividing ``n``, or the
        infinite marker for ``n == 0``.
    """
    check_prime(p)
    if n == 0:
        return Valuation.infinite()
    return Valuation.known(int(multiplicity(p, n)))


@dataclass(frozen=True, eq=False)
class PadicInt:
    """A p-adic integer known modulo ``p**prec``."""

    p: int
    prec: int
    residue: int = 0
    lift: int | None = field(default=None)

    def __post_init__(self):
        """Validate the precision and reduce the residue."""
        check_prime(self.p)
        if not isinstance(self.prec, int) or self.prec < 1:
            raise InvalidArgumentError(f"Precision must be a positive integer, found {self.prec!r}.")
        value = self.lift if self.lift is not None else self.residue
        object.__setattr__(self, "residue", value % self.p**self.prec)

    @classmethod
    def from_int(cls, n: int, p: int, prec: int, exact: bool = True) -> PadicInt:
        """Lift an ordinary integer.

        Args:
            n: the integer.
            p: the prime.
            prec: the precision exponent.
            exact: whether ``n`` is the true value (not only its residue).
        """
        return cls(p, prec, n, lift=n if exact else None)

    @property
    def modulus(self) -> int:
        """The modulus ``p**prec``."""
        return self.p**self.prec

    @property
    def is_exact_zero(self) -> bool:
        """True when the value is known to be exactly zero."""
        return self.lift == 0

    @property
    def is_zero(self) -> bool:
        """True when the value vanishes at the available precision."""
        return self.residue == 0

    @property
    def is_unit(self) -> bool:
        """True when the value is a unit of Z_p."""
        return self.residue % self.p != 0

    def valuation(self) -> Valuation:
        """Valuation of the value at the available precision."""
        if self.lift == 0:
            return Valuation.infinite()
        if self.residue == 0:
            return Valuation.at_least(self.prec)
        return Valuation.known(int(multiplicity(self.p, self.residue)))

    def _coerce(self, other: PadicInt | int) -> PadicInt:
        if isinstance(other, PadicInt):
            if other.p != self.p:
                raise InvalidArgumentError(
                    f"Cannot combine p-adic values for different primes ({self.p} and {other.p})."
                )
            return other
        if isinstance(other, int):
            return PadicInt(self.p, self.prec, lift=other)
        raise TypeError(f"Cannot combine PadicInt with {type(other)}.")

    def __add__(self, other: PadicInt | int) -> PadicInt:
        other = self._coerce(other)
        lift = self.lift + other.lift if self.lift is not None and other.lift is not None else None
        return PadicInt(self.p, min(self.prec, other.prec), self.residue + other.residue, lift)

    __radd__ = __add__

    def __neg__(self) -> PadicInt:
        lift = -self.lift if self.lift is not None else None
        return PadicInt(self.p, self.prec, -self.residue, lift)

    def __sub__(self, other: PadicInt | int) -> PadicInt:
        return self + (-self._coerce(other))

    def __rsub__(self, other: int) -> PadicInt:
        return self._coerce(other) - self

    def __mul__(self, other: PadicInt | int) -> PadicInt:
        other = self._coerce(other)
        if self.lift == 0 or other.lift == 0:
            lift: int | None = 0
        elif self.lift is not None and other.lift is not None:
            lift = self.lift * other.lift
        else:
            lift = None
        return PadicInt(self.p, min(self.prec, other.prec), self.residue * other.residue, lift)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> PadicInt:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        lift = self.lift**exponent if self.lift is not None else None
        return PadicInt(self.p, self.prec, pow(self.residue, exponent, self.modulus), lift)

    def inverse(self) -> PadicInt:
        """Multiplicative inverse of a unit.

        Raises:
            NotInvertibleError: if the value is divisible by p.
        """
        if not self.is_unit:
            raise NotInvertibleError(f"{self} is not a unit.", valuation=self.valuation())
        lift = self.lift if self.lift in (1, -1) else None
        return PadicInt(self.p, self.prec, pow(self.residue, -1, self.modulus), lift)

    def reduce(self, prec: int) -> PadicInt:
        """Reduce the value to a lower precision.

        Args:
            prec: the target precision, at most the current one.
        """
        if prec > self.prec:
            raise InvalidArgumentError(
                f"Cannot raise precision from {self.prec} to {prec} without new information."
            )
        return PadicInt(self.p, prec, self.residue, self.lift)

    def divide_by_p_power(self, k: int) -> PadicInt:
        """Exact division by ``p**k``, losing ``k`` digits of precision.

        Args:
            k: the exponent, the value must be divisible by ``p**k``.
        """
        if k == 0:
            return self
        if k >= self.prec:
            raise PrecisionUnderflowError(
                f"Dividing {self} by {self.p}^{k} leaves no digits.", needed=k, available=self.prec
            )
        if self.residue % self.p**k != 0:
            raise NotInvertibleError(f"{self} is not divisible by {self.p}^{k}.", self.valuation())
        lift = self.lift // self.p**k if self.lift is not None else None
        return PadicInt(self.p, self.prec - k, self.residue // self.p**k, lift)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PadicInt):
            return (self.p, self.prec, self.residue) == (other.p, other.prec, other.residue)
        if isinstance(other, int):
            return self.residue == other % self.modulus
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.p, self.prec, self.residue))

    def __str__(self) -> str:
        return f"{self.residue} mod {self.p}^{self.prec}"


def binom_padic(u: PadicInt, j: int) -> PadicInt:
    """Binomial coefficient ``C(u, j) = u (u-1) ... (u-j+1) / j!`` in Z_p.

    An exact integer argument gives the exact binomial at unchanged
    precision. Otherwise the division by ``j!`` costs ``vp(j!)`` digits.

    Args:
        u: the upper argument.
        j: the lower argument, a non-negative integer.

    Raises:
        PrecisionUnderflowError: if ``vp(j!)`` consumes every digit of ``u``.
    """
    if j < 0:
        raise InvalidArgumentError(f"Binomial index must be non-negative, found {j}.")
    if u.lift is not None:
        return PadicInt(u.p, u.prec, lift=int(binomial(u.lift, j)))
    loss = int(multiplicity(u.p, factorial(j))) if j > 1 else 0
    if loss >= u.prec:
        raise PrecisionUnderflowError(
            f"C(u, {j}) needs {loss + 1} digits of u, only {u.prec} available.",
            needed=loss + 1,
            available=u.prec,
        )
    # C(r, j) for the residue r agrees with C(u, j) modulo p^(prec - loss)
    return PadicInt(u.p, u.prec - loss, int(binomial(u.residue, j)))
