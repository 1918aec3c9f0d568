#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>

#include "talu/formats.hpp"

using namespace talu;

namespace {

// Independent value-domain oracle: every FP8/FP16 value is exact in double, as
// is any sum/product of two of them, so IEEE RNE can be checked by nearest
// search over all patterns with ties broken to the even fraction.
double pattern_value(std::uint32_t bits, const FloatDescriptor& d) {
    int sign = int(bits >> (d.total() - 1)) & 1;
    std::uint32_t e = (bits >> d.frac_bits) & d.exp_mask();
    std::uint32_t f = bits & d.frac_mask();
    double v;
    if (e == 0)
        v = std::ldexp(double(f), d.emin() - d.frac_bits);
    else
        v = std::ldexp(double((1u << d.frac_bits) | f), int(e) - d.bias() - d.frac_bits);
    return sign ? -v : v;
}

bool pattern_is_nan(std::uint32_t bits, const FloatDescriptor& d) {
    return ((bits >> d.frac_bits) & d.exp_mask()) == d.exp_mask() && (bits & d.frac_mask());
}
bool pattern_is_inf(std::uint32_t bits, const FloatDescriptor& d) {
    return ((bits >> d.frac_bits) & d.exp_mask()) == d.exp_mask() && !(bits & d.frac_mask());
}

// Round an exact double to the format: nearest finite pattern, ties to even,
// overflow per IEEE (round with unbounded exponent, then compare).
std::uint32_t oracle_round(double x, int result_sign, const FloatDescriptor& d) {
    if (x == 0.0) return std::uint32_t(result_sign) << (d.total() - 1);
    int sign = x < 0 ? 1 : 0;
    double ax = std::fabs(x);
    double maxfin = pattern_value(d.max_finite(0), d);
    double ulp_top = std::ldexp(1.0, (int(d.exp_mask()) - 1) - d.bias() - d.frac_bits);
    if (ax >= maxfin + ulp_top / 2) return d.inf(sign);
    std::uint32_t best = 0;
    double best_err = -1;
    std::uint32_t half = 1u << (d.total() - 1);
    for (std::uint32_t b = 0; b < half; ++b) {  // positive patterns
        if (pattern_is_nan(b, d) || pattern_is_inf(b, d)) continue;
        double err = std::fabs(pattern_value(b, d) - ax);
        if (best_err < 0 || err < best_err ||
            (err == best_err && (b & 1u) == 0 && (best & 1u) == 1)) {
            best_err = err;
            best = b;
        }
    }
    return best | (std::uint32_t(sign) << (d.total() - 1));
}

}  // namespace

TEST_CASE("float decode/encode basics") {
    FloatDescriptor fp16(5, 10);
    FloatDescriptor e4m3(4, 3);
    FloatDescriptor e3m4(3, 4);

    CHECK(float_encode(Dyadic(1), fp16) == 0x3C00);
    CHECK(float_encode(Dyadic(2), fp16) == 0x4000);
    CHECK(float_encode(Dyadic(-1), fp16) == 0xBC00);
    CHECK(float_decode(0, fp16).cls == FloatClass::Zero);

    SUBCASE("0.00024 is below half the smallest subnormal of both FP8 layouts") {
        // the nearest representable is zero even with subnormals enabled
        Dyadic v = Dyadic::from_double(0.00024);
        CHECK(float_encode(v, e4m3) == 0x00);
        CHECK(float_encode(v, e3m4) == 0x00);
        FloatEnv flush{true};
        CHECK(float_encode(v, e4m3, flush) == 0x00);
    }

    SUBCASE("subnormals survive without flush and die with it") {
        Dyadic sub = Dyadic(1, -9);  // smallest e4m3 subnormal
        CHECK(float_encode(sub, e4m3) == 0x01);
        CHECK(float_encode(sub, e4m3, FloatEnv{true}) == 0x00);
        CHECK(float_decode(0x01, e4m3).cls == FloatClass::Subnormal);
        CHECK(float_decode(0x01, e4m3, FloatEnv{true}).cls == FloatClass::Zero);
    }

    SUBCASE("FP8 e4m3 overflow: maxfinite + maxfinite = +Inf") {
        std::uint32_t mf = e4m3.max_finite(0);
        CHECK(float_add(mf, mf, e4m3) == e4m3.inf(0));
    }
}

TEST_CASE("FP8 add/mul equal the nearest-search oracle on all operand pairs") {
    for (FloatDescriptor d : {FloatDescriptor(4, 3), FloatDescriptor(3, 4)}) {
        long long checked = 0;
        for (std::uint32_t a = 0; a < 256; ++a) {
            for (std::uint32_t b = 0; b < 256; ++b) {
                bool nan_in = pattern_is_nan(a, d) || pattern_is_nan(b, d);
                std::uint32_t s = float_add(a, b, d);
                std::uint32_t m = float_mul(a, b, d);
                CHECK(s == float_add(b, a, d));
                CHECK(m == float_mul(b, a, d));
                if (nan_in) {
                    CHECK(pattern_is_nan(s, d));
                    CHECK(pattern_is_nan(m, d));
                    ++checked;
                    continue;
                }
                bool ia = pattern_is_inf(a, d), ib = pattern_is_inf(b, d);
                double va = pattern_value(a, d), vb = pattern_value(b, d);
                // add
                if (ia && ib && ((a ^ b) >> (d.total() - 1)))
                    CHECK(pattern_is_nan(s, d));
                else if (ia)
                    CHECK(s == a);
                else if (ib)
                    CHECK(s == b);
                else if (va + vb == 0.0) {
                    std::uint32_t signbit = 1u << (d.total() - 1);
                    std::uint32_t want = (a & signbit) && (b & signbit) && va == 0.0
                                             ? signbit : 0u;
                    CHECK(s == want);
                } else {
                    CHECK(s == oracle_round(va + vb, 0, d));
                }
                // mul
                int msign = int((a ^ b) >> (d.total() - 1)) & 1;
                if ((ia && vb == 0.0 && !ib) || (ib && va == 0.0 && !ia))
                    CHECK(pattern_is_nan(m, d));
                else if (ia || ib)
                    CHECK(m == d.inf(msign));
                else if (va * vb == 0.0)
                    CHECK(m == (std::uint32_t(msign) << (d.total() - 1)));
                else
                    CHECK(m == oracle_round(va * vb, msign, d));
                ++checked;
            }
        }
        CHECK(checked == 65536);
    }
}

TEST_CASE("FP16 add/mul sampled against the nearest-search oracle") {
    FloatDescriptor d(5, 10);
    std::mt19937 rng(20260809);
    for (int t = 0; t < 1500; ++t) {
        std::uint32_t a = rng() & 0xFFFF, b = rng() & 0xFFFF;
        if (pattern_is_nan(a, d) || pattern_is_nan(b, d) || pattern_is_inf(a, d) ||
            pattern_is_inf(b, d))
            continue;
        double va = pattern_value(a, d), vb = pattern_value(b, d);
        std::uint32_t s = float_add(a, b, d);
        if (va + vb != 0.0) CHECK(s == oracle_round(va + vb, 0, d));
        std::uint32_t m = float_mul(a, b, d);
        if (va * vb != 0.0) CHECK(m == oracle_round(va * vb, int((a ^ b) >> 15) & 1, d));
    }
    // identities on a larger random sample
    for (int t = 0; t < 100000; ++t) {
        std::uint32_t a = rng() & 0xFFFF;
        if (pattern_is_nan(a, d)) continue;
        CHECK(float_mul(a, 0x3C00, d) == a);  // x * 1.0 == x
        if (!pattern_is_inf(a, d) && (a & 0x7FFF) != 0) CHECK(float_add(a, 0, d) == a);
    }
    CHECK(float_add(0x3C00, 0x3C00, d) == 0x4000);  // 1.0 + 1.0 = 2.0
}

TEST_CASE("int ops wrap modulo 2^width") {
    IntDescriptor i8(8), i4(4), i16(16);
    CHECK(i8.to_signed(int_add(100, 100, i8)) == -56);
    CHECK(int_add(5, 0, i8) == 5);
    CHECK(i4.to_signed(int_mul(7, 2, i4)) == -2);

    SUBCASE("ring axioms, exhaustive INT4") {
        for (std::uint32_t a = 0; a < 16; ++a)
            for (std::uint32_t b = 0; b < 16; ++b) {
                CHECK(int_add(a, b, i4) == int_add(b, a, i4));
                CHECK(int_mul(a, b, i4) == int_mul(b, a, i4));
                for (std::uint32_t c = 0; c < 16; ++c) {
                    CHECK(int_add(int_add(a, b, i4), c, i4) == int_add(a, int_add(b, c, i4), i4));
                    CHECK(int_mul(int_mul(a, b, i4), c, i4) == int_mul(a, int_mul(b, c, i4), i4));
                    CHECK(int_mul(a, int_add(b, c, i4), i4) ==
                          int_add(int_mul(a, b, i4), int_mul(a, c, i4), i4));
                }
            }
    }

    SUBCASE("sampled INT8/INT16 against 64-bit modular arithmetic") {
        std::mt19937 rng(42);
        for (int t = 0; t < 50000; ++t) {
            std::uint32_t a = rng(), b = rng();
            CHECK(int_add(a & 0xFF, b & 0xFF, i8) == ((a & 0xFF) + (b & 0xFF)) % 256);
            CHECK(int_mul(a & 0xFFFF, b & 0xFFFF, i16) ==
                  std::uint32_t((std::uint64_t(a & 0xFFFF) * (b & 0xFFFF)) & 0xFFFF));
        }
    }
}
