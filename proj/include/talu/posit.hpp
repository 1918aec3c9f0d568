#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "talu/dyadic.hpp"

namespace talu {

// Posit configuration P(n, es). useed = 2^(2^es) is always derived.
struct PositConfig {
    int n = 8;
    int es = 2;

    PositConfig() = default;
    PositConfig(int n_, int es_) : n(n_), es(es_) {
        if (n < 4 || n > 32) throw std::invalid_argument("posit width must be in [4,32]");
        if (es < 0 || es > 3) throw std::invalid_argument("posit es must be in [0,3]");
        if (n < es + 2) throw std::invalid_argument("posit needs sign + regime bits");
    }

    std::uint32_t mask() const { return n == 32 ? 0xFFFFFFFFu : ((1u << n) - 1u); }
    std::uint32_t nar_pattern() const { return 1u << (n - 1); }
    std::uint32_t maxpos_pattern() const { return nar_pattern() - 1u; }  // 0111...1
    std::uint32_t minpos_pattern() const { return 1u; }
    int max_regime() const { return n - 1; }  // run can fill all bits after the sign

    friend bool operator==(const PositConfig&, const PositConfig&) = default;
    std::string str() const { return "p" + std::to_string(n) + "e" + std::to_string(es); }
};

struct PositWord {
    std::uint32_t bits = 0;
    PositConfig config;

    PositWord() = default;
    PositWord(std::uint32_t b, PositConfig c) : bits(b & c.mask()), config(c) {
        if ((b & ~c.mask()) != 0) throw std::invalid_argument("posit bits exceed width");
    }

    bool is_zero() const { return bits == 0; }
    bool is_nar() const { return bits == config.nar_pattern(); }
    friend bool operator==(const PositWord&, const PositWord&) = default;
};

// Decoded fields of a regular (non-zero, non-NaR) posit. For negative posits
// the fields describe the two's complement of the word.
struct PositFields {
    int sign = 0;          // S
    int regime_value = 0;  // K
    int regime_len = 0;    // r: run bits only, stop bit excluded
    std::uint32_t exponent = 0;  // E, es bits (missing low bits read as zero)
    std::uint32_t fraction = 0;  // F, m bits
    int fraction_len = 0;        // m

    friend bool operator==(const PositFields&, const PositFields&) = default;
};

struct Zero {
    friend bool operator==(const Zero&, const Zero&) = default;
};
struct NaR {
    friend bool operator==(const NaR&, const NaR&) = default;
};
using DecodeResult = std::variant<PositFields, Zero, NaR>;

enum class Ordering { Less, Equal, Greater };

// Reference semantics (Eq. 1): the oracle side of every TALU check.
DecodeResult decode_reference(const PositWord& word);

// Exact value; NaR has none.
std::optional<Dyadic> posit_to_rational(const PositWord& word);

// Nearest representable posit, RNE on the encoding scale; clamps to
// maxpos/minpos and never rounds a nonzero value to zero or NaR.
PositWord rational_to_posit(const Dyadic& value, PositConfig config);

PositWord posit_add(const PositWord& a, const PositWord& b);
PositWord posit_mul(const PositWord& a, const PositWord& b);
PositWord posit_negate(const PositWord& a);
Ordering posit_compare(const PositWord& a, const PositWord& b);  // throws on NaR

// Value of decoded fields per Eq. 1 (used by the consistency property tests).
Dyadic fields_value(const PositFields& f, const PositConfig& cfg);

}  // namespace talu
