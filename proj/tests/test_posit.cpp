#include <doctest.h>

#include <cstdint>
#include <random>
#include <variant>

#include "talu/posit.hpp"

using namespace talu;

namespace {

// Independent run-length reference decoder, kept deliberately separate from
// posit.cpp: scans the bit string directly and evaluates Eq. 1 on BigInt.
struct OracleFields {
    int s, k, r, m;
    std::uint32_t e, f;
};

enum class OracleKind { Regular, Zero, NaR };

OracleKind oracle_decode(std::uint32_t bits, int n, int es, OracleFields* out) {
    std::uint32_t mask = n == 32 ? 0xFFFFFFFFu : ((1u << n) - 1u);
    bits &= mask;
    if (bits == 0) return OracleKind::Zero;
    if (bits == (1u << (n - 1))) return OracleKind::NaR;
    OracleFields of{};
    of.s = int(bits >> (n - 1)) & 1;
    std::uint32_t v = of.s ? ((~bits + 1u) & mask) : bits;
    // walk bits msb-1 downward
    int first = int(v >> (n - 2)) & 1;
    int i = n - 2;
    while (i >= 0 && ((int(v >> i) & 1) == first)) --i;
    of.r = (n - 2) - i;
    of.k = first ? of.r - 1 : -of.r;
    --i;  // stop bit
    int rem = i + 1;
    int ee = es < rem ? es : rem;
    of.e = 0;
    for (int j = 0; j < es; ++j) {
        int bit = j < ee ? int(v >> (rem - 1 - j)) & 1 : 0;
        of.e = (of.e << 1) | unsigned(bit);
    }
    of.m = rem - ee;
    of.f = of.m > 0 ? v & ((1u << of.m) - 1) : 0;
    *out = of;
    return OracleKind::Regular;
}

// Eq. 1 value computed straight from the oracle fields.
Dyadic oracle_value(const OracleFields& of, int es) {
    BigInt m = (BigInt(1) << unsigned(of.m)) + of.f;
    if (of.s) m = -m;
    return Dyadic(m, (long(of.k) << es) + long(of.e) - of.m);
}

PositWord pw(std::uint32_t bits, PositConfig c) { return PositWord(bits, c); }

}  // namespace

TEST_CASE("decode_reference matches the independent run-length oracle exhaustively") {
    for (auto cfg : {PositConfig(8, 0), PositConfig(8, 2), PositConfig(8, 1), PositConfig(8, 3)}) {
        for (std::uint32_t b = 0; b < 256; ++b) {
            OracleFields of{};
            OracleKind kind = oracle_decode(b, cfg.n, cfg.es, &of);
            DecodeResult got = decode_reference(pw(b, cfg));
            if (kind == OracleKind::Zero) {
                CHECK(std::holds_alternative<Zero>(got));
            } else if (kind == OracleKind::NaR) {
                CHECK(std::holds_alternative<NaR>(got));
            } else {
                REQUIRE(std::holds_alternative<PositFields>(got));
                const auto& f = std::get<PositFields>(got);
                CHECK(f.sign == of.s);
                CHECK(f.regime_value == of.k);
                CHECK(f.regime_len == of.r);
                CHECK(f.exponent == of.e);
                CHECK(f.fraction == of.f);
                CHECK(f.fraction_len == of.m);
                // field-length accounting: r + stop + len(E) + m = n - 1
                int stop = f.regime_len < cfg.n - 1 ? 1 : 0;
                int es_eff = std::min(cfg.es, cfg.n - 1 - f.regime_len - stop);
                CHECK(f.regime_len + stop + es_eff + f.fraction_len == cfg.n - 1);
            }
        }
    }
}

TEST_CASE("posit_to_rational equals Eq. 1 on decoded fields, exhaustively at 8 bit") {
    for (auto cfg : {PositConfig(8, 0), PositConfig(8, 2)}) {
        for (std::uint32_t b = 0; b < 256; ++b) {
            OracleFields of{};
            OracleKind kind = oracle_decode(b, cfg.n, cfg.es, &of);
            auto got = posit_to_rational(pw(b, cfg));
            if (kind == OracleKind::NaR) {
                CHECK(!got.has_value());
            } else if (kind == OracleKind::Zero) {
                CHECK(got->is_zero());
            } else {
                CHECK(*got == oracle_value(of, cfg.es));
            }
        }
    }
}

TEST_CASE("paper worked examples") {
    PositConfig c82(8, 2);

    SUBCASE("P(8,2) = 01110100 decodes to S=0 K=2 E=2 F=0, value 1024") {
        auto f = std::get<PositFields>(decode_reference(pw(0x74, c82)));
        CHECK(f.sign == 0);
        CHECK(f.regime_value == 2);
        CHECK(f.regime_len == 3);
        CHECK(f.exponent == 2);
        CHECK(f.fraction == 0);
        CHECK(f.fraction_len == 1);
        CHECK(*posit_to_rational(pw(0x74, c82)) == Dyadic(1024));
    }

    SUBCASE("0.00024 encodes to 00001000 (K=-3), value 2^-12, error ~1.7%") {
        PositWord p = rational_to_posit(Dyadic::from_double(0.00024), c82);
        CHECK(p.bits == 0x08);
        auto f = std::get<PositFields>(decode_reference(p));
        CHECK(f.regime_value == -3);
        CHECK(f.exponent == 0);
        CHECK(f.fraction == 0);
        CHECK(*posit_to_rational(p) == Dyadic(1, -12));
        double err = std::abs(1.0 / 4096.0 - 0.00024) / 0.00024;
        CHECK(err == doctest::Approx(0.0172526).epsilon(1e-4));
    }

    SUBCASE("unit value and simple arithmetic") {
        CHECK(*posit_to_rational(pw(0x40, c82)) == Dyadic(1));
        CHECK(posit_add(pw(0x40, c82), pw(0x40, c82)).bits == 0x48);   // 1+1=2
        CHECK(posit_mul(pw(0x48, c82), pw(0x48, c82)).bits == 0x50);   // 2*2=4
    }

    SUBCASE("overflow clamps to maxpos") {
        CHECK(rational_to_posit(Dyadic::from_double(1e9), c82).bits == 0x7F);
        CHECK(rational_to_posit(Dyadic::from_double(-1e9), c82).bits == 0x81);
        CHECK(rational_to_posit(Dyadic::from_double(1e-30), c82).bits == 0x01);
    }
}

TEST_CASE("round-trip: encode(decode(p)) == p for every non-NaR pattern") {
    for (auto cfg : {PositConfig(8, 0), PositConfig(8, 2)}) {
        for (std::uint32_t b = 0; b < 256; ++b) {
            PositWord p = pw(b, cfg);
            if (p.is_nar()) continue;
            auto v = posit_to_rational(p);
            CHECK(rational_to_posit(*v, cfg).bits == b);
        }
    }
}

TEST_CASE("monotonicity: signed pattern order equals value order") {
    for (auto cfg : {PositConfig(8, 0), PositConfig(8, 2)}) {
        Dyadic prev;
        bool have_prev = false;
        // signed pattern order: 0x80 is NaR; iterate from most negative (0x81)
        for (int s = -127; s <= 127; ++s) {
            std::uint32_t b = std::uint32_t(s) & 0xFF;
            Dyadic v = *posit_to_rational(pw(b, cfg));
            if (have_prev) CHECK(prev < v);
            prev = v;
            have_prev = true;
        }
    }
    // sampled at 16 bit
    std::mt19937 rng(20260809);
    PositConfig c(16, 2);
    for (int i = 0; i < 100000; ++i) {
        std::uint32_t a = rng() & 0xFFFF, b = rng() & 0xFFFF;
        if (a == 0x8000 || b == 0x8000) continue;
        auto as_signed = [](std::uint32_t x) { return std::int32_t(std::int16_t(x)); };
        auto va = *posit_to_rational(pw(a, c)), vb = *posit_to_rational(pw(b, c));
        if (as_signed(a) < as_signed(b)) {
            CHECK(va < vb);
        } else if (as_signed(a) > as_signed(b)) {
            CHECK(vb < va);
        } else {
            CHECK(va == vb);
        }
    }
}

TEST_CASE("negate: two's complement, exact negation, fixed points") {
    PositConfig c(8, 2);
    CHECK(posit_negate(pw(0x40, c)).bits == 0xC0);
    CHECK(posit_negate(pw(0x00, c)).bits == 0x00);
    CHECK(posit_negate(pw(0x80, c)).bits == 0x80);
    for (std::uint32_t b = 0; b < 256; ++b) {
        PositWord p = pw(b, c);
        if (p.is_nar()) continue;
        auto v = posit_to_rational(p);
        auto nv = posit_to_rational(posit_negate(p));
        CHECK(*nv == -*v);
    }
}

TEST_CASE("compare: raw signed-pattern comparison equals value ordering") {
    PositConfig c(8, 2);
    CHECK(posit_compare(pw(0x48, c), pw(0x40, c)) == Ordering::Greater);
    CHECK(posit_compare(pw(0x40, c), pw(0x40, c)) == Ordering::Equal);
    CHECK(posit_compare(pw(0xC0, c), pw(0x40, c)) == Ordering::Less);
    CHECK_THROWS_AS((void)posit_compare(pw(0x80, c), pw(0x40, c)), std::domain_error);
}

TEST_CASE("add/mul equal the exact-rational oracle on all 8-bit pairs") {
    for (auto cfg : {PositConfig(8, 0), PositConfig(8, 2)}) {
        long long checked = 0;
        for (std::uint32_t a = 0; a < 256; ++a) {
            for (std::uint32_t b = 0; b < 256; ++b) {
                PositWord pa = pw(a, cfg), pb = pw(b, cfg);
                PositWord s = posit_add(pa, pb);
                PositWord m = posit_mul(pa, pb);
                // commutativity
                CHECK(s.bits == posit_add(pb, pa).bits);
                CHECK(m.bits == posit_mul(pb, pa).bits);
                if (pa.is_nar() || pb.is_nar()) {
                    CHECK(s.is_nar());
                    CHECK(m.is_nar());
                } else {
                    Dyadic va = *posit_to_rational(pa), vb = *posit_to_rational(pb);
                    CHECK(s.bits == rational_to_posit(va + vb, cfg).bits);
                    CHECK(m.bits == rational_to_posit(va * vb, cfg).bits);
                }
                ++checked;
            }
        }
        CHECK(checked == 65536);
    }
}

TEST_CASE("special-value semantics") {
    PositConfig c(8, 2);
    PositWord nar = pw(0x80, c), zero = pw(0x00, c);
    for (std::uint32_t b = 0; b < 256; ++b) {
        PositWord x = pw(b, c);
        CHECK(posit_add(nar, x).is_nar());
        CHECK(posit_mul(nar, x).is_nar());
        if (!x.is_nar()) {
            CHECK(posit_add(x, zero).bits == x.bits);  // additive identity
            CHECK(posit_mul(x, pw(0x40, c)).bits == x.bits);  // multiplicative identity
            CHECK(posit_mul(x, zero).is_zero());
        }
    }
    CHECK(posit_mul(zero, nar).is_nar());  // NaR dominates zero
}

TEST_CASE("encode lands on an enclosing neighbor and reproduces exact values") {
    // for arbitrary values the result must be one of the two value-adjacent
    // representable posits; exact values must encode to themselves
    std::mt19937 rng(7);
    PositConfig cfg(8, 2);
    for (int t = 0; t < 2000; ++t) {
        double d = std::ldexp(double(rng() % (1u << 20)) + 0.5, int(rng() % 40) - 25);
        if (rng() & 1) d = -d;
        Dyadic v = Dyadic::from_double(d);
        PositWord p = rational_to_posit(v, cfg);
        Dyadic pv = *posit_to_rational(p);
        // no other representable value may lie strictly between v and pv
        for (std::uint32_t b = 0; b < 256; ++b) {
            if (b == 0x80 || b == p.bits) continue;
            Dyadic ov = *posit_to_rational(pw(b, cfg));
            bool between = (ov > v && ov < pv) || (ov < v && ov > pv);
            CHECK(!between);
            if (between) return;  // fail fast, avoid 5M check spam
        }
    }
}
