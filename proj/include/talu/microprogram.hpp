#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "talu/qfunc.hpp"

namespace talu {

struct ProgramError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Unit { PC, SC, BOTH, STRUCT };

// Structural micro-ops: combinational work riding on a cycle. Cluster issues
// are the only cycle consumers; everything here models the Input Generator,
// Shifter, Combiner, LUT and TRF paths of the datapath.
enum class SOp {
    Movi,
    Mov,
    Shl,
    Shr,
    Sar,
    Extract,   // dst = (src >> lo) & mask(w)
    Insert,    // dst[lo +: w] = src[w-1:0]
    Inserti,   // dst[lo +: w] = imm
    Sel,       // dst = cond ? t : f
    Tsel,      // dst = src[n-2] ? src : ~src, masked to n-1 bits (Find_R input)
    Negsel,    // dst = src[n-1] ? -src : src, masked to n bits (sign conditioning)
    LutK,      // dst = regime LUT K' = popcount(v) - 1
    LutL,      // dst = run length L = popcount(v)
    Cmb,       // 16-bit regime combine -> total run length L
    Ksign,     // dst = cond ? L-1 : ~(L-1)   (regime value sign fix)
    Kmag,      // dst = k >= 0 ? k : ~k       (run length - 1 from a regime value)
    TrfRead,   // register move modeling a TRF read  (RW = 1)
    TrfWrite,  // register move modeling a TRF write (RW = 0)
};

struct Operand {
    int reg = 0;
    int lane = 0;        // byte lane, 0..3
    bool invert = false; // input-generator complement (~r)
};

struct CinSpec {
    enum Kind { Imm, RegBit } kind = Imm;
    int imm = 0;
    int reg = 0;
    int bit = 0;
};

struct AmtSpec {
    enum Kind { Imm, Reg, RegPlusImm, ImmMinusReg } kind = Imm;
    int reg = 0;
    int imm = 0;
};

struct CondSpec {
    int reg = 0;
    int bit = -1;  // -1: whole register nonzero
};

struct MicroOp {
    int cycle = 0;
    Unit unit = Unit::STRUCT;

    // cluster issue
    QOpcode qop = QOpcode::And;
    int width = 8;  // slots
    int dst = 0;
    int dlane = 0;
    Operand a, b;
    CinSpec cin;
    int aux = -1;  // carry / and-bits vector register for step-2 ops

    // structural op
    SOp sop = SOp::Mov;
    int src = 0;
    int src2 = 0;     // Sel f / Cmb llo
    int src3 = 0;     // Cmb vlo
    int src4 = 0;     // Cmb t-register
    CondSpec cond;    // Sel / Ksign
    std::uint32_t imm = 0;
    int lo = 0, w = 0;
    AmtSpec amt;
    int nbits = 8;  // Tsel / Negsel width

    std::string comment;
};

struct MicroProgram {
    std::string name;
    std::string format;     // p8e2 | p16e0 | fp8 | fp16 | int4 | int8 | int16 | ...
    std::string operation;  // decode | decode2 | add | mul | and | or | not | xor | comp
    int declared_cycles = 0;
    std::vector<int> inputs;   // registers the program may read before writing
    std::vector<int> outputs;  // registers holding results on completion
    std::vector<MicroOp> ops;

    int measured_cycles() const;
};

// Static checks: cluster discipline (<=1 PC and <=1 SC issue per cycle),
// step-2 pairing (PC step-1 on the previous cycle via the pipeline register),
// no same-cycle consumption of cluster results, no reads of unwritten
// registers. Throws ProgramError.
void validate_program(const MicroProgram& prog);

// Text format: one op per line, `<cycle> <PC|SC|BOTH|STRUCT> <OPCODE> <args>`;
// `#` comments; `# @key: value` header directives.
MicroProgram parse_program(const std::string& text);
std::string serialize_program(const MicroProgram& prog);

// read/write sets (used by the validator and tests)
std::vector<int> op_reads(const MicroOp& op);
std::vector<int> op_writes(const MicroOp& op);

}  // namespace talu
