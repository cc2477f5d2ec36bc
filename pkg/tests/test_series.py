"""Test the series module."""

import itertools

import pytest

from ggcheck.exceptions import (
    AmbiguityError,
    HenselConditionError,
    InvalidArgumentError,
    UnboundedTailError,
)
from ggcheck.padics import PadicInt, Valuation
from ggcheck.series import (
    Irreducibility,
    PowerSeries,
    Squarefreeness,
    Undetermined,
    binom_series,
    eval_series,
    extract_t_factor,
    hensel_lift_root,
    irreducible_by_newton,
    lambda_invariant,
    mu_invariant,
    newton_polygon,
    nu_polynomial,
    squarefree_check,
    weierstrass_prepare,
)


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


class TestPowerSeries:
    def test_to_string(self):
        """Test the descending textual form."""
        h = PowerSeries.polynomial([0, 64638, 1], 3, 11)
        assert h.to_string("T") == "T^2 + 64638*T (mod 3^11)"
        assert h.to_string("T", modulus=False) == "T^2 + 64638*T"

    def test_truncated_to_string(self):
        """A truncated series shows its tail."""
        s = PowerSeries(3, 2, PowerSeries.polynomial([1, 1], 3, 2, 4).coeffs)
        assert s.to_string() == "X + 1 + O(X^4) (mod 3^2)"

    def test_arithmetic(self):
        """(1 + X)(1 - X) = 1 - X^2."""
        a = PowerSeries.polynomial([1, 1], 3, 4, 8, exact=True)
        b = PowerSeries.polynomial([1, -1], 3, 4, 8, exact=True)
        product = a * b
        assert product.residues[:3] == (1, 0, 80)
        assert product.is_polynomial
        assert (a + b).residues[:2] == (2, 0)
        assert (a - b).residues[:2] == (0, 2)
        assert (a * 3).residues[:2] == (3, 3)

    def test_inverse(self):
        """A unit times its inverse is one."""
        a = PowerSeries.polynomial([2, 3, 1], 3, 5, 10)
        assert (a * a.inverse()).residues == PowerSeries.one(3, 5, 10).residues

    def test_pow(self):
        """(1 + X)^3 = 1 + 3X + 3X^2 + X^3."""
        a = PowerSeries.polynomial([1, 1], 3, 4, 8, exact=True)
        assert (a**3).residues[:5] == (1, 3, 3, 1, 0)

    def test_derivative(self):
        """Test the formal derivative."""
        h = PowerSeries.polynomial([0, 64638, 1], 3, 11)
        assert h.derivative().residues[:2] == (64638, 2)


class TestInvariants:
    @pytest.mark.parametrize(
        "coeffs, p, prec, mu, lam",
        [
            ([0, 64638, 1], 3, 11, Valuation.known(0), 2),
            ([0, 522, 72, 405, 1], 3, 7, Valuation.known(0), 4),
            ([0, 3100, 1], 5, 5, Valuation.known(0), 2),
            ([3, 9, 1], 3, 4, Valuation.known(0), 2),
            ([9, 18, 27], 3, 4, Valuation.known(2), Undetermined(32)),
        ],
    )
    def test_mu_lambda(self, coeffs, p, prec, mu, lam):
        """Test the invariants of characteristic polynomials."""
        h = PowerSeries.polynomial(coeffs, p, prec)
        assert mu_invariant(h) == mu
        assert lambda_invariant(h) == lam

    def test_undetermined_lambda(self):
        """No unit below the cutoff leaves lambda undetermined."""
        v = PowerSeries(3, 4, PowerSeries.polynomial([3, 6], 3, 4, 4).coeffs)
        assert mu_invariant(v) == Valuation.known(1)
        assert lambda_invariant(v) == Undetermined(4)

    def test_zero_series(self):
        """A zero series only bounds mu from below, exact or not."""
        assert mu_invariant(PowerSeries.zero(3, 4, 4)) == Valuation.at_least(4)
        vanishing = PowerSeries(3, 4, PowerSeries.zero(3, 4, 4).coeffs[:3] + (PadicInt(3, 4, 0),))
        assert mu_invariant(vanishing) == Valuation.at_least(4)

    def test_additivity(self, rng):
        """mu and lambda are additive on 200 random products."""
        for _ in range(200):
            p = rng.choice([3, 5])
            prec = 6
            series = []
            for _ in range(2):
                coeffs = [rng.randrange(p**prec) for _ in range(rng.randint(1, 4))]
                k = rng.randrange(len(coeffs))
                coeffs[k] = coeffs[k] * p + 1
                shift = rng.randint(0, 2)
                series.append(
                    (PowerSeries.polynomial(coeffs, p, prec, 16), shift)
                )
            (f, a), (g, b) = series
            assert lambda_invariant(f * g) == lambda_invariant(f) + lambda_invariant(g)
            fs, gs = f.scale(p**a), g.scale(p**b)
            assert mu_invariant(fs * gs) == Valuation.known(a + b)


class TestSpecialSeries:
    def test_nu_polynomial(self):
        """nu_1 for p = 3 is S^2 + 3S + 3."""
        nu = nu_polynomial(1, 3, 5)
        assert nu.to_string("S") == "S^2 + 3*S + 3 (mod 3^5)"

    def test_nu_zero(self):
        """nu_0 is 1."""
        assert nu_polynomial(0, 5, 3).residues[:2] == (1, 0)

    def test_binomial_inverse_law(self, rng):
        """(1 + X)^u (1 + X)^-u = 1 on 200 random exponents."""
        for _ in range(200):
            p = rng.choice([3, 5])
            value = rng.randrange(-100, 100)
            exact = rng.random() < 0.5
            u = PadicInt.from_int(value, p, 6, exact=exact)
            product = binom_series(u, 1, 8) * binom_series(-u, 1, 8)
            assert product.residues == PowerSeries.one(p, product.prec, 8).residues

    def test_binom_series_stride(self):
        """(1 + X^3)^2 = 1 + 2X^3 + X^6."""
        s = binom_series(PadicInt.from_int(2, 3, 4), stride=3, cutoff=8)
        assert s.residues == (1, 0, 0, 2, 0, 0, 1, 0)
        assert s.is_polynomial


class TestEvaluation:
    def test_polynomial(self):
        """Test the evaluation of a polynomial."""
        h = PowerSeries.polynomial([0, 64638, 1], 3, 11)
        assert eval_series(h, -64638).is_zero
        assert h.evaluate(1).residue == 64639

    def test_truncated_at_unit(self):
        """A truncated series cannot be evaluated at a unit."""
        s = PowerSeries(3, 4, PowerSeries.one(3, 4, 4).coeffs)
        with pytest.raises(UnboundedTailError):
            eval_series(s, 1)

    def test_truncated_at_multiple_of_p(self):
        """Evaluating at 3 loses the digits the tail may carry."""
        s = PowerSeries(3, 6, PowerSeries.polynomial([1, 1], 3, 6, 2).coeffs)
        value = eval_series(s, 3)
        assert (value.residue, value.prec) == (4, 2)

    def test_extract_t_factor(self):
        """T^2 + 64638T = T (T + 64638)."""
        a, g = extract_t_factor(PowerSeries.polynomial([0, 64638, 1], 3, 11))
        assert a == 1
        assert g.residues[:3] == (64638, 1, 0)

    def test_extract_t_factor_ambiguous(self):
        """Test that a series vanishing at precision has no multiplicity."""
        with pytest.raises(AmbiguityError):
            extract_t_factor(PowerSeries.polynomial([0, 9], 3, 2))


class TestWeierstrass:
    def test_round_trip(self, rng):
        """p^mu * P * U is recovered on 200 random products."""
        for _ in range(200):
            p = rng.choice([3, 5])
            prec, cutoff = 6, 12
            lam = rng.randint(1, 4)
            dist = [p * rng.randrange(p ** (prec - 1)) for _ in range(lam)] + [1]
            unit = [rng.randrange(p**prec) for _ in range(rng.randint(1, 4))]
            if unit[0] % p == 0:
                unit[0] += 1
            mu = rng.randint(0, 1)
            product = [p**mu * c for c in _poly_mul(dist, unit)]
            prep = weierstrass_prepare(PowerSeries.polynomial(product, p, prec, cutoff))
            modulus = p ** (prec - mu)
            assert prep.mu == mu
            assert prep.slack == mu
            assert prep.distinguished.lambda_ == lam
            assert list(prep.distinguished.series.residues[: lam + 1]) == [
                c % modulus for c in dist
            ]
            expected_unit = [c % modulus for c in unit] + [0] * (cutoff - len(unit))
            assert list(prep.unit.residues) == expected_unit

    def test_already_distinguished(self):
        """T^2 + 64638T is its own distinguished polynomial with unit 1."""
        prep = weierstrass_prepare(PowerSeries.polynomial([0, 64638, 1], 3, 11, 8))
        assert prep.mu == 0
        assert prep.distinguished.series.residues[:3] == (0, 64638, 1)
        assert prep.unit.residues == (1, 0, 0, 0, 0, 0, 0, 0)

    @pytest.mark.parametrize(
        "coeffs, mu, lam, distinguished, unit",
        [
            ([3, 3], 1, 0, (1, 0, 0, 0), (1, 1, 0, 0)),
            ([0, 1], 0, 1, (0, 1, 0, 0), (1, 0, 0, 0)),
        ],
    )
    def test_small_cases(self, coeffs, mu, lam, distinguished, unit):
        """3(1 + S) prepares to (1, 1, 1 + S) and S to (0, S, 1)."""
        prep = weierstrass_prepare(PowerSeries.polynomial(coeffs, 3, 4, 4))
        assert prep.mu == mu
        assert prep.distinguished.lambda_ == lam
        assert prep.distinguished.series.residues == distinguished
        assert prep.unit.residues == unit

    def test_vanishing_series(self):
        """Test that a series vanishing at precision cannot be prepared."""
        with pytest.raises(InvalidArgumentError):
            weierstrass_prepare(PowerSeries.polynomial([0, 9, 27], 3, 2))


class TestNewtonPolygon:
    def test_single_segment(self):
        """T^3 + 405T^2 + 72T + 522 has the single segment (0,2)-(3,0)."""
        h = PowerSeries.polynomial([522, 72, 405, 1], 3, 7)
        polygon = newton_polygon(h)
        assert polygon.vertices == ((0, 2), (3, 0))
        assert polygon.describe() == "single segment slope -2/3"
        assert irreducible_by_newton(h) == Irreducibility.IRREDUCIBLE

    def test_linear(self):
        """T + 486 has slope -5 and is irreducible."""
        h = PowerSeries.polynomial([486, 1], 3, 6)
        assert newton_polygon(h).describe() == "single segment slope -5"
        assert irreducible_by_newton(h) == Irreducibility.IRREDUCIBLE

    def test_inconclusive(self):
        """(T + 3)^2 has an integral slope, so no certificate."""
        h = PowerSeries.polynomial([9, 6, 1], 3, 6)
        assert newton_polygon(h).vertices == ((0, 2), (2, 0))
        assert irreducible_by_newton(h) == Irreducibility.INCONCLUSIVE

    @pytest.mark.parametrize(
        "coeffs, exact, vertices, decision",
        [
            ([0, 0, 1], True, ((2, 0),), Irreducibility.INCONCLUSIVE),
            ([3, 3, 1], False, ((0, 1), (2, 0)), Irreducibility.IRREDUCIBLE),
        ],
    )
    def test_quadratics(self, coeffs, exact, vertices, decision):
        """Exact T^2 is a single vertex, T^2 + 3T + 3 is Eisenstein."""
        h = PowerSeries.polynomial(coeffs, 3, 4, exact=exact)
        assert newton_polygon(h).vertices == vertices
        assert irreducible_by_newton(h) == decision

    def test_ambiguous(self):
        """A constant term vanishing at precision hides the first vertex."""
        with pytest.raises(AmbiguityError):
            newton_polygon(PowerSeries.polynomial([0, 3, 1], 3, 4))
        with pytest.raises(AmbiguityError):
            irreducible_by_newton(PowerSeries.polynomial([0, 3, 1], 3, 4))

    def test_linear_vanishing_constant(self):
        """T + 0 mod 3^4 is irreducible although its polygon is unknown."""
        h = PowerSeries.polynomial([0, 1], 3, 4)
        with pytest.raises(AmbiguityError):
            newton_polygon(h)
        assert irreducible_by_newton(h) == Irreducibility.IRREDUCIBLE

    def test_soundness(self):
        """No product of two distinguished polynomials mod 3^3 is certified irreducible."""
        p, prec = 3, 3
        lower = [p * k for k in range(p ** (prec - 1))]
        for a, b in [(1, 1), (1, 2), (1, 3), (2, 2)]:
            for low in itertools.product(lower, repeat=a + b):
                f, g = [*low[:a], 1], [*low[a:], 1]
                h = PowerSeries.polynomial(_poly_mul(f, g), p, prec)
                try:
                    decision = irreducible_by_newton(h)
                except AmbiguityError:
                    continue
                assert decision != Irreducibility.IRREDUCIBLE, f"{f} * {g}"


class TestSquarefree:
    def test_discriminant_route(self):
        """disc(T^2 + 64638T) has valuation 10 < 11."""
        h = PowerSeries.polynomial([0, 64638, 1], 3, 11, exact=True)
        certificate = squarefree_check(h)
        assert certificate.decision == Squarefreeness.SQUARE_FREE
        assert certificate.method == "discriminant"
        assert certificate.disc_val == Valuation.known(10)

    def test_factored_route(self):
        """disc(h) vanishes modulo 3^7 but disc(g) has valuation 6."""
        h = PowerSeries.polynomial([0, 522, 72, 405, 1], 3, 7, exact=True)
        certificate = squarefree_check(h)
        assert certificate.decision == Squarefreeness.SQUARE_FREE
        assert certificate.method == "factored"
        assert certificate.disc_val == Valuation.at_least(7)
        assert certificate.cofactor_disc_val == Valuation.known(6)

    def test_exact_square_factor(self):
        """T^2 dividing h exactly is not square-free."""
        h = PowerSeries.polynomial([0, 0, 5, 1], 3, 4, exact=True)
        assert squarefree_check(h).decision == Squarefreeness.NOT_SQUARE_FREE

    def test_inconclusive(self):
        """(T + 1)^2 has discriminant zero at every precision."""
        h = PowerSeries.polynomial([1, 2, 1], 3, 4)
        assert squarefree_check(h).decision == Squarefreeness.INCONCLUSIVE


class TestHensel:
    @pytest.mark.parametrize(
        "coeffs, p, prec, r0, alpha, alpha_prec",
        [
            ([0, 64638, 1], 3, 11, -64638, 486, 6),
            ([0, 3100, 1], 5, 5, -3100, 100, 3),
            ([0, 1989, 1], 3, 7, -1989, 45, 5),
            ([486, 1], 3, 6, -486, 486, 6),
        ],
    )
    def test_known_roots(self, coeffs, p, prec, r0, alpha, alpha_prec):
        """The root -alpha is returned at precision N - vp(h'(r0))."""
        h = PowerSeries.polynomial(coeffs, p, prec)
        root = hensel_lift_root(h, r0)
        assert root.prec == alpha_prec
        assert (-root).residue == alpha

    def test_lift(self):
        """T^2 + T + 5 has a root congruent to 20 mod 25 lifting 0 mod 5."""
        h = PowerSeries.polynomial([5, 1, 1], 5, 6)
        root = hensel_lift_root(h, 0)
        assert root.residue % 25 == 20
        assert eval_series(h, root).is_zero

    def test_condition_fails(self):
        """h'(0) vanishes for T^2 + 3, so 0 cannot be lifted."""
        h = PowerSeries.polynomial([3, 0, 1], 3, 4)
        with pytest.raises(HenselConditionError):
            hensel_lift_root(h, 0)
