import pytest

from ggcheck import helpers


class TestParsing:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("0,64638,1", [0, 64638, 1]),
            (" 522, 72 ,405,1", [522, 72, 405, 1]),
            ("-3", [-3]),
        ],
    )
    def test_parse_int_list_valid(self, text, expected):
        """Test parse_int_list with exact decimal integers."""
        assert helpers.parse_int_list(text) == expected

    @pytest.mark.parametrize("text", ["", "1,,2", "1.5", "a,1", "1;2"])
    def test_parse_int_list_invalid(self, text):
        """Test that parse_int_list rejects anything but integers."""
        with pytest.raises(ValueError):
            helpers.parse_int_list(text)

    def test_parse_matrix(self):
        """Test parse_matrix on a 2x2 matrix of polynomials."""
        assert helpers.parse_matrix("0 1,1;2 0") == [[[0], [1, 1]], [[2], [0]]]

    @pytest.mark.parametrize("text", ["", "1 2;3", "1 2 3"])
    def test_parse_matrix_invalid(self, text):
        """Test that parse_matrix rejects non-square input."""
        with pytest.raises(ValueError):
            helpers.parse_matrix(text)


class TestFormatting:
    @pytest.mark.parametrize(
        "coefficient, powers, expected",
        [
            (1, [("T", 2)], "T^2"),
            (64638, [("T", 1)], "64638*T"),
            (7, [("S", 0), ("T", 0)], "7"),
            (1, [("S", 1), ("T", 1)], "S*T"),
            (3, [("S", 2), ("T", 1)], "3*S^2*T"),
        ],
    )
    def test_format_monomial(self, coefficient, powers, expected):
        """Test format_monomial drops unit coefficients and exponents."""
        assert helpers.format_monomial(coefficient, powers) == expected

    def test_join_terms(self):
        """Test join_terms, including the empty sum."""
        assert helpers.join_terms(["T^2", "3"]) == "T^2 + 3"
        assert helpers.join_terms([]) == "0"

    def test_format_modulus(self):
        """Test the modulus annotation."""
        assert helpers.format_modulus(3, 11) == "(mod 3^11)"

    @pytest.mark.parametrize("value, expected", [("12", True), (5, True), ("x", False), (True, False)])
    def test_is_int(self, value, expected):
        """Test is_int."""
        assert helpers.is_int(value) is expected
