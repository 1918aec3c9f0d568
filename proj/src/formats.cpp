#include "talu/formats.hpp"

namespace talu {

namespace {

// round-to-nearest-even of a * 2^k to an integer, a >= 0
BigInt rne_shift(const BigInt& a, long k) {
    if (k >= 0) return a << unsigned(k);
    unsigned s = unsigned(-k);
    BigInt kept = a >> s;
    BigInt rem = a & ((BigInt(1) << s) - 1);
    BigInt half = BigInt(1) << (s - 1);
    if (rem > half || (rem == half && (kept & 1) != 0)) kept += 1;
    return kept;
}

std::uint32_t pack(int sign, std::uint32_t exp, std::uint32_t frac, const FloatDescriptor& d) {
    return (std::uint32_t(sign) << (d.total() - 1)) | (exp << d.frac_bits) | frac;
}

}  // namespace

FloatParts float_decode(std::uint32_t bits, const FloatDescriptor& d, const FloatEnv& env) {
    if ((bits & ~d.mask()) != 0) throw std::invalid_argument("float bits exceed width");
    FloatParts p;
    p.sign = int(bits >> (d.total() - 1)) & 1;
    p.exponent = (bits >> d.frac_bits) & d.exp_mask();
    p.fraction = bits & d.frac_mask();
    if (p.exponent == d.exp_mask()) {
        p.cls = p.fraction ? FloatClass::NaN : FloatClass::Inf;
        return p;
    }
    if (p.exponent == 0) {
        if (p.fraction == 0 || env.flush_subnormals) {
            p.cls = FloatClass::Zero;
            p.value = Dyadic();
            return p;
        }
        p.cls = FloatClass::Subnormal;
        BigInt m = p.fraction;
        if (p.sign) m = -m;
        p.value = Dyadic(std::move(m), d.emin() - d.frac_bits);
        return p;
    }
    p.cls = FloatClass::Normal;
    BigInt m = (BigInt(1) << unsigned(d.frac_bits)) + p.fraction;
    if (p.sign) m = -m;
    p.value = Dyadic(std::move(m), long(p.exponent) - d.bias() - d.frac_bits);
    return p;
}

std::uint32_t float_encode(const Dyadic& v, const FloatDescriptor& d, const FloatEnv& env) {
    if (v.is_zero()) return 0;
    int sign = v.negative() ? 1 : 0;
    Dyadic mag = v.abs();
    long e_unb = mag.floor_log2();
    long e_eff = e_unb < d.emin() ? d.emin() : e_unb;
    // scale so the ulp is 2^(e_eff - frac_bits)
    BigInt q = rne_shift(mag.mant(), mag.exp2() - (e_eff - d.frac_bits));
    if (q >= (BigInt(1) << unsigned(d.frac_bits + 1))) {
        q >>= 1;  // rounding crossed a binade; result is a power of two, shift exact
        e_eff += 1;
    }
    if (q >= (BigInt(1) << unsigned(d.frac_bits))) {
        long exp_field = e_eff + d.bias();
        if (exp_field >= long(d.exp_mask())) return d.inf(sign);
        std::uint32_t frac = q.convert_to<std::uint32_t>() & d.frac_mask();
        return pack(sign, std::uint32_t(exp_field), frac, d);
    }
    // subnormal range
    std::uint32_t frac = q.convert_to<std::uint32_t>();
    if (frac == 0) return pack(sign, 0, 0, d);
    if (env.flush_subnormals) return pack(sign, 0, 0, d);
    return pack(sign, 0, frac, d);
}

std::uint32_t float_add(std::uint32_t a, std::uint32_t b, const FloatDescriptor& d,
                        const FloatEnv& env) {
    FloatParts pa = float_decode(a, d, env), pb = float_decode(b, d, env);
    if (pa.cls == FloatClass::NaN || pb.cls == FloatClass::NaN) return d.quiet_nan();
    if (pa.cls == FloatClass::Inf && pb.cls == FloatClass::Inf)
        return pa.sign == pb.sign ? d.inf(pa.sign) : d.quiet_nan();
    if (pa.cls == FloatClass::Inf) return d.inf(pa.sign);
    if (pb.cls == FloatClass::Inf) return d.inf(pb.sign);
    if (pa.cls == FloatClass::Zero && pb.cls == FloatClass::Zero)
        return pack(pa.sign & pb.sign, 0, 0, d);  // -0 only when both are -0 (RNE)
    Dyadic sum = pa.value + pb.value;
    if (sum.is_zero()) return 0;  // exact cancellation gives +0 in RNE
    return float_encode(sum, d, env);
}

std::uint32_t float_mul(std::uint32_t a, std::uint32_t b, const FloatDescriptor& d,
                        const FloatEnv& env) {
    FloatParts pa = float_decode(a, d, env), pb = float_decode(b, d, env);
    int sign = pa.sign ^ pb.sign;
    if (pa.cls == FloatClass::NaN || pb.cls == FloatClass::NaN) return d.quiet_nan();
    bool za = pa.cls == FloatClass::Zero, zb = pb.cls == FloatClass::Zero;
    bool ia = pa.cls == FloatClass::Inf, ib = pb.cls == FloatClass::Inf;
    if ((ia && zb) || (ib && za)) return d.quiet_nan();
    if (ia || ib) return d.inf(sign);
    if (za || zb) return pack(sign, 0, 0, d);
    Dyadic prod = pa.value * pb.value;
    std::uint32_t out = float_encode(prod, d, env);
    if (env.flush_subnormals && (out & ~(1u << (d.total() - 1))) == 0)
        return pack(sign, 0, 0, d);  // keep the product's sign on a flushed zero
    return out;
}

std::uint32_t int_add(std::uint32_t a, std::uint32_t b, const IntDescriptor& d) {
    return (a + b) & d.mask();
}

std::uint32_t int_mul(std::uint32_t a, std::uint32_t b, const IntDescriptor& d) {
    return std::uint32_t((std::uint64_t(a & d.mask()) * std::uint64_t(b & d.mask())) & d.mask());
}

}  // namespace talu
