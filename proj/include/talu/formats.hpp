#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "talu/dyadic.hpp"

namespace talu {

// IEEE-754-style binary format with bias 2^(e-1)-1, subnormals and RNE.
struct FloatDescriptor {
    int exp_bits = 5;
    int frac_bits = 10;

    FloatDescriptor() = default;
    FloatDescriptor(int e, int m) : exp_bits(e), frac_bits(m) {
        if (e < 2 || m < 1) throw std::invalid_argument("bad float descriptor");
        int total = 1 + e + m;
        if (total != 8 && total != 16 && total != 32)
            throw std::invalid_argument("float total width must be 8, 16 or 32");
    }

    int total() const { return 1 + exp_bits + frac_bits; }
    int bias() const { return (1 << (exp_bits - 1)) - 1; }
    int emin() const { return 1 - bias(); }
    std::uint32_t exp_mask() const { return (1u << exp_bits) - 1; }
    std::uint32_t frac_mask() const { return (1u << frac_bits) - 1; }
    std::uint32_t mask() const { return total() == 32 ? 0xFFFFFFFFu : ((1u << total()) - 1u); }
    std::uint32_t quiet_nan() const {
        return (exp_mask() << frac_bits) | (1u << (frac_bits - 1));
    }
    std::uint32_t inf(int sign) const {
        return (std::uint32_t(sign) << (total() - 1)) | (exp_mask() << frac_bits);
    }
    std::uint32_t max_finite(int sign) const {
        return (std::uint32_t(sign) << (total() - 1)) |
               ((exp_mask() - 1) << frac_bits) | frac_mask();
    }
    friend bool operator==(const FloatDescriptor&, const FloatDescriptor&) = default;
    std::string str() const {
        return "fp" + std::to_string(total()) + "(e" + std::to_string(exp_bits) + "m" +
               std::to_string(frac_bits) + ")";
    }
};

enum class FloatClass { Zero, Subnormal, Normal, Inf, NaN };

struct FloatParts {
    FloatClass cls = FloatClass::Zero;
    int sign = 0;
    std::uint32_t exponent = 0;  // raw field
    std::uint32_t fraction = 0;  // raw field
    Dyadic value;                // exact, finite classes only
};

// Per-run environment. flush_subnormals reproduces hardware flush behavior:
// subnormal inputs read as zero, results in the subnormal range become zero.
struct FloatEnv {
    bool flush_subnormals = false;
};

FloatParts float_decode(std::uint32_t bits, const FloatDescriptor& d,
                        const FloatEnv& env = {});
// Encode a nonzero exact value (RNE, subnormals, overflow to Inf).
std::uint32_t float_encode(const Dyadic& v, const FloatDescriptor& d,
                           const FloatEnv& env = {});
std::uint32_t float_add(std::uint32_t a, std::uint32_t b, const FloatDescriptor& d,
                        const FloatEnv& env = {});
std::uint32_t float_mul(std::uint32_t a, std::uint32_t b, const FloatDescriptor& d,
                        const FloatEnv& env = {});

// Two's complement integers, wraparound arithmetic.
struct IntDescriptor {
    int width = 8;
    IntDescriptor() = default;
    explicit IntDescriptor(int w) : width(w) {
        if (w < 2 || w > 32) throw std::invalid_argument("int width must be in [2,32]");
    }
    std::uint32_t mask() const { return width == 32 ? 0xFFFFFFFFu : ((1u << width) - 1u); }
    std::int64_t to_signed(std::uint32_t bits) const {
        bits &= mask();
        if (bits >> (width - 1)) return std::int64_t(bits) - (std::int64_t(1) << width);
        return std::int64_t(bits);
    }
    friend bool operator==(const IntDescriptor&, const IntDescriptor&) = default;
    std::string str() const { return "int" + std::to_string(width); }
};

std::uint32_t int_add(std::uint32_t a, std::uint32_t b, const IntDescriptor& d);
std::uint32_t int_mul(std::uint32_t a, std::uint32_t b, const IntDescriptor& d);

}  // namespace talu
