"""
Tests for core/fxp.py: bit-exact Q4.27 arithmetic.
"""

import pytest

from core import fxp
from core.errors import FixedPointOverflow, ValidationError
from core.fxp import (RAW_MAX, RAW_MIN, RESOLUTION, SCALE, Fx32,
                      OverflowPolicy)


@pytest.mark.unit
class TestFromReal:
    @pytest.mark.parametrize(
        "value,raw",
        [
            (0.5, 67108864),
            (0.0, 0),
            (0.01, 1342177),
            (-1.0, -SCALE),
            (RESOLUTION, 1),
        ],
    )
    def test_known_words(self, value, raw):
        """Test conversion of known reals to raw words"""
        assert fxp.from_real(value).raw == raw

    def test_exact_values_round_trip(self):
        """Test that representable values survive a raw-real-raw round trip"""
        for k in (-(1 << 31), -12345, 0, 7, 1 << 30, RAW_MAX):
            assert fxp.from_real(k / SCALE).raw == k

    def test_non_finite_rejected(self):
        """Test that NaN and infinities cannot be converted"""
        with pytest.raises(ValidationError):
            fxp.from_real(float("nan"))
        with pytest.raises(ValidationError):
            fxp.from_real(float("inf"))

    def test_out_of_range_traps(self):
        """Test that TRAP raises on a real outside the Q4.27 range"""
        with pytest.raises(FixedPointOverflow):
            fxp.from_real(16.0, OverflowPolicy.TRAP)

    def test_out_of_range_saturates(self):
        """Test that SATURATE clamps an out-of-range real"""
        assert fxp.from_real(100.0, OverflowPolicy.SATURATE).raw == RAW_MAX
        assert fxp.from_real(-100.0, OverflowPolicy.SATURATE).raw == RAW_MIN

    def test_to_real_inverse(self):
        """Test that to_real inverts from_real on exact values"""
        assert fxp.from_real(0.75).to_real() == 0.75
        assert float(Fx32.from_raw(-SCALE)) == -1.0


@pytest.mark.unit
class TestAdd:
    def test_exact_sum(self):
        """Test an exactly representable sum"""
        assert fxp.add(fxp.from_real(0.5), fxp.from_real(0.25)).to_real() == 0.75

    def test_identity(self):
        """Test the arithmetic identity element"""
        a = Fx32(123456789)
        assert a + fxp.ZERO == a

    def test_wraps_to_minimum(self):
        """Test that RAW_MAX + 1 wraps to RAW_MIN"""
        top = Fx32(RAW_MAX)
        assert fxp.add(top, Fx32(1)).to_real() == -16.0

    def test_saturates(self):
        """Test that SATURATE clamps an overflowing sum"""
        assert fxp.add(Fx32(RAW_MAX), Fx32(1), OverflowPolicy.SATURATE).raw == RAW_MAX

    def test_trap_reports_operation(self):
        """Test that a trap names the operation and the raw result"""
        with pytest.raises(FixedPointOverflow) as excinfo:
            fxp.add(Fx32(RAW_MAX), Fx32(1), OverflowPolicy.TRAP)
        assert excinfo.value.operation == "add"
        assert excinfo.value.raw == RAW_MAX + 1

    def test_sub(self):
        """Test subtraction through the operator"""
        assert (fxp.from_real(0.5) - fxp.from_real(1.0)).to_real() == -0.5


@pytest.mark.unit
class TestMul:
    def test_exact_product(self):
        """Test an exactly representable product"""
        assert fxp.mul(fxp.from_real(0.5), fxp.from_real(0.5)).to_real() == 0.25

    def test_identity(self):
        """Test the arithmetic identity element"""
        a = Fx32(-987654321)
        assert a * fxp.ONE == a

    def test_truncates_below_resolution(self):
        """Test that products below the resolution truncate to zero"""
        assert fxp.mul(Fx32(1), fxp.from_real(0.5)).raw == 0

    def test_floor_on_negative_products(self):
        """Test that negative products are floored"""
        # -1 * 0.5 in raw units is -0.5, floored to -1
        assert fxp.mul(Fx32(-1), fxp.from_real(0.5)).raw == -1

    def test_overflow_wraps(self):
        """Test that an overflowing product wraps"""
        four = fxp.from_real(4.0)
        assert fxp.mul(four, four).raw == fxp.resolve_raw(16 * SCALE, OverflowPolicy.WRAP)
        assert fxp.mul(four, four).to_real() == -16.0

    def test_overflow_traps(self):
        """Test that an overflowing product raises under TRAP"""
        with pytest.raises(FixedPointOverflow):
            fxp.mul(fxp.from_real(4.0), fxp.from_real(4.0), OverflowPolicy.TRAP)


@pytest.mark.unit
class TestNegHalf:
    def test_neg(self):
        """Test negation"""
        assert fxp.neg(fxp.from_real(0.5)).to_real() == -0.5
        assert (-fxp.from_real(0.5)).to_real() == -0.5

    def test_neg_of_minimum_wraps(self):
        """Test that negating RAW_MIN wraps back to RAW_MIN"""
        assert fxp.neg(Fx32(RAW_MIN)).raw == RAW_MIN

    def test_neg_of_minimum_saturates(self):
        """Test that negating RAW_MIN saturates to RAW_MAX"""
        assert fxp.neg(Fx32(RAW_MIN), OverflowPolicy.SATURATE).raw == RAW_MAX

    def test_half(self):
        """Test halving one"""
        assert fxp.half(fxp.ONE).to_real() == 0.5

    def test_half_floors_odd_negative(self):
        """Test that halving an odd negative word floors"""
        assert fxp.half(Fx32(-3)).raw == -2


@pytest.mark.unit
class TestFx32:
    def test_range_enforced(self):
        """Test that Fx32 rejects raw values outside 32 bits"""
        with pytest.raises(ValidationError):
            Fx32(RAW_MAX + 1)
        with pytest.raises(ValidationError):
            Fx32(RAW_MIN - 1)

    @pytest.mark.parametrize(
        "raw,text",
        [
            (0, "00000000"),
            (1, "00000001"),
            (-1, "FFFFFFFF"),
            (RAW_MIN, "80000000"),
            (0xABC, "00000ABC"),
        ],
    )
    def test_hex(self, raw, text):
        """Test the two's complement hex form"""
        assert Fx32(raw).hex() == text

    def test_decimal_string_is_signed(self):
        """Test that the string form is the signed raw value"""
        assert str(Fx32(-42)) == "-42"
        assert int(Fx32(42)) == 42

    def test_from_raw_to_raw(self):
        """Test that from_raw and to_raw are inverse at the range edges"""
        for raw in (RAW_MIN, -1, 0, 1, RAW_MAX):
            assert Fx32.from_raw(raw).to_raw() == raw

    def test_immutable(self):
        """Test that Fx32 values are immutable"""
        value = Fx32(5)
        with pytest.raises(AttributeError):
            value.raw = 6
