#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "talu/formats.hpp"
#include "talu/microprogram.hpp"
#include "talu/posit.hpp"

namespace talu {

struct TraceRow {
    int cycle = 0;
    std::string unit;
    std::string opcode;
    std::string inputs;
    std::string outputs;
};

// One TALU instance: TRF, regime LUT, cluster pipeline registers, cycle
// counter. Single-threaded; distinct instances are independent.
struct TaluState {
    std::array<std::uint32_t, 16> trf{};
    std::array<int, 8> regime_lut{};  // [popcount] = K', popcounts 1..7
    long long cycle_counter = 0;
    bool posit_en = false;
    int rw = 0;  // 1 = read, 0 = write (last TRF access)

    struct Pipe {
        int cycle = -1;
        int dst = -1;
        std::uint32_t bits = 0;
    };
    Pipe pc_pipeline, sc_pipeline;

    std::vector<TraceRow>* trace = nullptr;

    TaluState() {
        for (int p = 1; p <= 7; ++p) regime_lut[std::size_t(p)] = p - 1;
        regime_lut[0] = -1;
    }

    // fault-injection hook used by selftest
    void corrupt_regime_lut() { regime_lut[3] = 5; }
};

std::uint32_t trf_read(TaluState& s, int reg);
void trf_write(TaluState& s, int reg, std::uint32_t value);

// Regime LUT lookup: K' = popcount(v) - 1. Popcount 0 cannot occur for valid
// posits after the T transform and is rejected.
int lut_lookup(TaluState& s, std::uint32_t v);

// Shifter path of Find_E_and_F: left-shift the body by run_len + 1 and split
// off (E, F). Returns the raw field values.
struct ShiftOut {
    std::uint32_t exponent = 0;
    std::uint32_t fraction = 0;
};
ShiftOut shifter_extract(TaluState& s, std::uint32_t word, int n, int run_len, int es);

// 16-bit regime combine: high-half V, low-half V over T[6:0], and the
// continuation bit T[7]. Returns the total run length.
int combiner_merge(TaluState& s, std::uint32_t v_hi, std::uint32_t v_lo, int t7);

// Execute a validated micro-program against the state. Returns cycles spent.
int run_microprogram(TaluState& s, const MicroProgram& prog);

// ---------------------------------------------------------------------------
// operation dispatch
// ---------------------------------------------------------------------------

struct Format {
    enum Kind { Posit, Float, Int } kind = Posit;
    PositConfig posit;
    FloatDescriptor flt;
    IntDescriptor integer;

    int width() const {
        switch (kind) {
            case Posit: return posit.n;
            case Float: return flt.total();
            default: return integer.width;
        }
    }
    std::string str() const;
};

// format grammar: p<n>e<es> | fp8 | fp16 | int4 | int8 | int16
Format parse_format(const std::string& text);

enum class TaluOp { Decode, Add, Mul, And, Or, Not, Xor, Comp };
const char* talu_op_name(TaluOp op);
TaluOp talu_op_from_name(const std::string& name);

struct DecodeOut {
    DecodeResult fields;
    int cycles = 0;
};

// Cycle-true posit decode on the TALU datapath (n = 8 or 16 only).
DecodeOut decode_posit_on_talu(TaluState& s, const PositWord& word);

struct ExecOut {
    std::uint32_t bits = 0;
    int decode_cycles = 0;
    int op_cycles = 0;
    int total_cycles() const { return decode_cycles + op_cycles; }
};

// Execute one ALU operation through the registered micro-programs.
ExecOut exec_op(TaluState& s, TaluOp op, const Format& fmt, std::uint32_t a,
                std::uint32_t b);

std::string trace_to_csv(const std::vector<TraceRow>& rows);

}  // namespace talu
