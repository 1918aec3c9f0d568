#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <cstdint>
#include <string>

namespace talu {

using BigInt = boost::multiprecision::cpp_int;

// Exact dyadic rational: value = mant * 2^exp2. Every representable posit and
// binary-float value, and every sum/product of two of them, lives here with no
// rounding. Kept normalized (mant odd or zero, exp2 = 0 when zero).
class Dyadic {
public:
    Dyadic() = default;
    Dyadic(long long m) : mant_(m) { normalize(); }
    Dyadic(BigInt m, long e) : mant_(std::move(m)), exp2_(e) { normalize(); }

    static Dyadic from_double(double d);

    bool is_zero() const { return mant_ == 0; }
    bool negative() const { return mant_ < 0; }
    const BigInt& mant() const { return mant_; }
    long exp2() const { return exp2_; }

    Dyadic operator-() const { return Dyadic(-mant_, exp2_); }
    Dyadic abs() const { return mant_ < 0 ? -*this : *this; }

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        long e = std::min(a.exp2_, b.exp2_);
        BigInt m = (a.mant_ << unsigned(a.exp2_ - e)) + (b.mant_ << unsigned(b.exp2_ - e));
        return Dyadic(std::move(m), e);
    }
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
    friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
        return Dyadic(a.mant_ * b.mant_, a.exp2_ + b.exp2_);
    }

    friend bool operator==(const Dyadic& a, const Dyadic& b) {
        return a.mant_ == b.mant_ && (a.is_zero() || a.exp2_ == b.exp2_);
    }
    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
        Dyadic d = a - b;
        if (d.mant_ == 0) return std::strong_ordering::equal;
        return d.mant_ < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    }

    // floor(log2(|v|)); undefined for zero.
    long floor_log2() const;

    // Top `bits` bits of |mant| (msb-aligned), plus a flag for any dropped ones.
    // Used by the string-rounding encoders.
    struct Window {
        BigInt top;
        bool sticky;
        long top_exp2;  // value ≈ top * 2^top_exp2
    };
    Window window(unsigned bits) const;

    double to_double_approx() const;
    std::string to_string() const;  // exact decimal when small, else m*2^e form

private:
    void normalize();

    BigInt mant_ = 0;
    long exp2_ = 0;
};

}  // namespace talu
