#include "talu/posit.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace talu {

// ---------------------------------------------------------------------------
// Dyadic
// ---------------------------------------------------------------------------

void Dyadic::normalize() {
    if (mant_ == 0) {
        exp2_ = 0;
        return;
    }
    BigInt a = mant_ < 0 ? BigInt(-mant_) : mant_;
    unsigned tz = boost::multiprecision::lsb(a);
    if (tz > 0) {
        mant_ >>= tz;
        exp2_ += long(tz);
    }
}

Dyadic Dyadic::from_double(double d) {
    if (!std::isfinite(d)) throw std::invalid_argument("non-finite double");
    if (d == 0.0) return Dyadic();
    std::uint64_t u = std::bit_cast<std::uint64_t>(d);
    bool neg = (u >> 63) != 0;
    long e = long((u >> 52) & 0x7FF);
    std::uint64_t f = u & ((std::uint64_t(1) << 52) - 1);
    BigInt m;
    long ex;
    if (e == 0) {  // subnormal
        m = f;
        ex = -1074;
    } else {
        m = (std::uint64_t(1) << 52) | f;
        ex = e - 1075;
    }
    if (neg) m = -m;
    return Dyadic(std::move(m), ex);
}

long Dyadic::floor_log2() const {
    BigInt a = mant_ < 0 ? BigInt(-mant_) : mant_;
    return long(boost::multiprecision::msb(a)) + exp2_;
}

Dyadic::Window Dyadic::window(unsigned bits) const {
    Window w;
    BigInt a = mant_ < 0 ? BigInt(-mant_) : mant_;
    if (a == 0) {
        w.top = 0;
        w.sticky = false;
        w.top_exp2 = 0;
        return w;
    }
    unsigned len = boost::multiprecision::msb(a) + 1;
    if (len > bits) {
        unsigned drop = len - bits;
        w.top = a >> drop;
        w.sticky = (a & ((BigInt(1) << drop) - 1)) != 0;
        w.top_exp2 = exp2_ + long(drop);
    } else {
        w.top = a << (bits - len);
        w.sticky = false;
        w.top_exp2 = exp2_ - long(bits - len);
    }
    return w;
}

double Dyadic::to_double_approx() const {
    if (mant_ == 0) return 0.0;
    Window w = window(53);
    double t = w.top.convert_to<double>();
    if (w.sticky) t += 0.5;  // nudge so displayed magnitude is not misleadingly exact
    double v = std::ldexp(t, int(w.top_exp2));
    return mant_ < 0 ? -v : v;
}

std::string Dyadic::to_string() const {
    if (mant_ == 0) return "0";
    bool neg = mant_ < 0;
    BigInt a = neg ? BigInt(-mant_) : mant_;
    std::string out = neg ? "-" : "";
    if (exp2_ >= 0) {
        if (exp2_ <= 512) {
            out += BigInt(a << unsigned(exp2_)).str();
        } else {
            out += a.str() + "*2^" + std::to_string(exp2_);
        }
        return out;
    }
    unsigned k = unsigned(-exp2_);
    if (k > 512) return out + a.str() + "*2^" + std::to_string(exp2_);
    BigInt scaled = a * boost::multiprecision::pow(BigInt(5), k);
    std::string digits = scaled.str();
    if (digits.size() <= k) digits.insert(0, k + 1 - digits.size(), '0');
    digits.insert(digits.size() - k, ".");
    while (digits.back() == '0') digits.pop_back();
    if (digits.back() == '.') digits.pop_back();
    return out + digits;
}

// ---------------------------------------------------------------------------
// Reference decode (Eq. 1)
// ---------------------------------------------------------------------------

DecodeResult decode_reference(const PositWord& word) {
    const PositConfig& c = word.config;
    if (word.is_zero()) return Zero{};
    if (word.is_nar()) return NaR{};

    PositFields f;
    std::uint32_t bits = word.bits;
    f.sign = int(bits >> (c.n - 1)) & 1;
    if (f.sign) bits = (~bits + 1u) & c.mask();  // decode the magnitude pattern

    int pos = c.n - 2;
    int run_bit = int(bits >> pos) & 1;
    int r = 0;
    while (pos >= 0 && ((int(bits >> pos) & 1) == run_bit)) {
        ++r;
        --pos;
    }
    f.regime_len = r;
    f.regime_value = run_bit ? r - 1 : -r;
    if (pos >= 0) --pos;  // skip the stop bit

    int rem = pos + 1;
    int es_eff = std::min(c.es, rem);
    std::uint32_t e_avail = es_eff > 0 ? (bits >> (rem - es_eff)) & ((1u << es_eff) - 1) : 0;
    f.exponent = e_avail << (c.es - es_eff);  // missing low bits read as zero
    f.fraction_len = rem - es_eff;
    f.fraction = f.fraction_len > 0 ? bits & ((1u << f.fraction_len) - 1) : 0;
    return f;
}

Dyadic fields_value(const PositFields& f, const PositConfig& cfg) {
    BigInt m = (BigInt(1) << unsigned(f.fraction_len)) + f.fraction;
    if (f.sign) m = -m;
    long e = (long(f.regime_value) << cfg.es) + long(f.exponent) - f.fraction_len;
    return Dyadic(std::move(m), e);
}

std::optional<Dyadic> posit_to_rational(const PositWord& word) {
    if (word.is_nar()) return std::nullopt;
    if (word.is_zero()) return Dyadic();
    return fields_value(std::get<PositFields>(decode_reference(word)), word.config);
}

// ---------------------------------------------------------------------------
// Encode: RNE on the encoding scale
// ---------------------------------------------------------------------------

PositWord rational_to_posit(const Dyadic& value, PositConfig config) {
    if (value.is_zero()) return PositWord(0, config);

    Dyadic mag = value.abs();
    long scale = mag.floor_log2();
    long k = scale >> config.es;  // floor division
    long e = scale - (k << config.es);

    std::uint32_t body;
    int kmax = config.n - 2;
    if (k > kmax) {
        body = config.maxpos_pattern();
    } else if (k < -kmax) {
        body = config.minpos_pattern();
    } else {
        // Bit string after the sign: regime run, stop, exponent, fraction.
        // Keep n-1 bits, round half-even on the string.
        int run = k >= 0 ? int(k) + 1 : int(-k);
        int nbody = config.n - 1;
        unsigned want = unsigned(nbody + 2 + config.es);  // hidden 1 + fraction bits
        Dyadic::Window w = mag.window(want);
        int frac_avail = int(want) - 1;

        auto bit_at = [&](int idx) -> int {
            if (idx < run) return k >= 0 ? 1 : 0;
            if (idx == run) return k >= 0 ? 0 : 1;
            int j = idx - run - 1;
            if (j < config.es) return int(e >> (config.es - 1 - j)) & 1;
            j -= config.es;  // fraction bit index, msb first
            if (j < frac_avail) return int((w.top >> unsigned(frac_avail - 1 - j)) & 1);
            return 0;
        };

        int total = run + 1 + config.es + frac_avail;
        body = 0;
        int guard = 0;
        bool sticky = w.sticky;
        for (int idx = 0; idx < total; ++idx) {
            int bit = bit_at(idx);
            if (idx < nbody)
                body = (body << 1) | unsigned(bit);
            else if (idx == nbody)
                guard = bit;
            else if (bit)
                sticky = true;
        }

        if (guard && (sticky || (body & 1)) && body != config.maxpos_pattern()) body += 1;
        if (body == 0) body = config.minpos_pattern();  // never round a nonzero to zero
    }

    std::uint32_t out = body;
    if (value.negative()) out = (~out + 1u) & config.mask();
    return PositWord(out, config);
}

// ---------------------------------------------------------------------------
// Arithmetic via the exact oracle domain
// ---------------------------------------------------------------------------

PositWord posit_add(const PositWord& a, const PositWord& b) {
    if (a.config != b.config) throw std::invalid_argument("posit config mismatch");
    if (a.is_nar() || b.is_nar()) return PositWord(a.config.nar_pattern(), a.config);
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    return rational_to_posit(*posit_to_rational(a) + *posit_to_rational(b), a.config);
}

PositWord posit_mul(const PositWord& a, const PositWord& b) {
    if (a.config != b.config) throw std::invalid_argument("posit config mismatch");
    if (a.is_nar() || b.is_nar()) return PositWord(a.config.nar_pattern(), a.config);
    if (a.is_zero() || b.is_zero()) return PositWord(0, a.config);
    return rational_to_posit(*posit_to_rational(a) * *posit_to_rational(b), a.config);
}

PositWord posit_negate(const PositWord& a) {
    return PositWord((~a.bits + 1u) & a.config.mask(), a.config);
}

Ordering posit_compare(const PositWord& a, const PositWord& b) {
    if (a.config != b.config) throw std::invalid_argument("posit config mismatch");
    if (a.is_nar() || b.is_nar()) throw std::domain_error("NaR is incomparable");
    auto as_signed = [](const PositWord& w) {
        std::int64_t v = w.bits;
        if (w.bits >> (w.config.n - 1)) v -= std::int64_t(1) << w.config.n;
        return v;
    };
    std::int64_t x = as_signed(a), y = as_signed(b);
    if (x < y) return Ordering::Less;
    if (x > y) return Ordering::Greater;
    return Ordering::Equal;
}

}  // namespace talu
