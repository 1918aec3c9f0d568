#include "talu/programs.hpp"

#include "talu/talu.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace talu {

namespace {

// ---------------------------------------------------------------------------
// emission helpers
// ---------------------------------------------------------------------------

Operand R(int reg, int lane = 0) { return {reg, lane, false}; }
Operand Rn(int reg, int lane = 0) { return {reg, lane, true}; }
CinSpec ci(int v) { return {CinSpec::Imm, v, 0, 0}; }
CinSpec cr(int reg, int bit) { return {CinSpec::RegBit, 0, reg, bit}; }
CondSpec C(int reg, int bit = -1) { return {reg, bit}; }
AmtSpec A(int imm) { return {AmtSpec::Imm, 0, imm}; }
AmtSpec Ar(int reg, int imm = 0) {
    return imm ? AmtSpec{AmtSpec::RegPlusImm, reg, imm} : AmtSpec{AmtSpec::Reg, reg, 0};
}
AmtSpec Air(int imm, int reg) { return {AmtSpec::ImmMinusReg, reg, imm}; }

struct Emit {
    MicroProgram p;

    Emit(std::string name, std::string format, std::string operation) {
        p.name = std::move(name);
        p.format = std::move(format);
        p.operation = std::move(operation);
    }

    MicroOp& push(MicroOp op) {
        p.ops.push_back(op);
        return p.ops.back();
    }

    // cluster issues
    void cl(int cyc, Unit u, QOpcode q, int w, int dst, int dlane, Operand a,
            Operand b = {}, CinSpec cin = {}, int aux = -1, std::string cmt = {}) {
        MicroOp op;
        op.cycle = cyc;
        op.unit = u;
        op.qop = q;
        op.width = w;
        op.dst = dst;
        op.dlane = dlane;
        op.a = a;
        op.b = b;
        op.cin = cin;
        op.aux = aux;
        op.comment = std::move(cmt);
        push(op);
    }

    // structural
    MicroOp& st(int cyc, SOp s, int dst) {
        MicroOp op;
        op.cycle = cyc;
        op.unit = Unit::STRUCT;
        op.sop = s;
        op.dst = dst;
        return push(op);
    }
    void movi(int cyc, int dst, std::uint32_t imm, std::string cmt = {}) {
        auto& o = st(cyc, SOp::Movi, dst);
        o.imm = imm;
        o.comment = std::move(cmt);
    }
    void mov(int cyc, int dst, int src, std::string cmt = {}) {
        auto& o = st(cyc, SOp::Mov, dst);
        o.src = src;
        o.comment = std::move(cmt);
    }
    void shl(int cyc, int dst, int src, AmtSpec a, std::string cmt = {}) {
        auto& o = st(cyc, SOp::Shl, dst);
        o.src = src;
        o.amt = a;
        o.comment = std::move(cmt);
    }
    void shr(int cyc, int dst, int src, AmtSpec a, std::string cmt = {}) {
        auto& o = st(cyc, SOp::Shr, dst);
        o.src = src;
        o.amt = a;
        o.comment = std::move(cmt);
    }
    void sar(int cyc, int dst, int src, AmtSpec a, std::string cmt = {}) {
        auto& o = st(cyc, SOp::Sar, dst);
        o.src = src;
        o.amt = a;
        o.comment = std::move(cmt);
    }
    void ext(int cyc, int dst, int src, int lo, int w, std::string cmt = {}) {
        auto& o = st(cyc, SOp::Extract, dst);
        o.src = src;
        o.lo = lo;
        o.w = w;
        o.comment = std::move(cmt);
    }
    void ins(int cyc, int dst, int src, int lo, int w, std::string cmt = {}) {
        auto& o = st(cyc, SOp::Insert, dst);
        o.src = src;
        o.lo = lo;
        o.w = w;
        o.comment = std::move(cmt);
    }
    void insi(int cyc, int dst, std::uint32_t imm, int lo, int w, std::string cmt = {}) {
        auto& o = st(cyc, SOp::Inserti, dst);
        o.imm = imm;
        o.lo = lo;
        o.w = w;
        o.comment = std::move(cmt);
    }
    void sel(int cyc, int dst, CondSpec c, int t, int f, std::string cmt = {}) {
        auto& o = st(cyc, SOp::Sel, dst);
        o.cond = c;
        o.src = t;
        o.src2 = f;
        o.comment = std::move(cmt);
    }
    void tsel(int cyc, int dst, int src, int n, std::string cmt = {}) {
        auto& o = st(cyc, SOp::Tsel, dst);
        o.src = src;
        o.nbits = n;
        o.comment = std::move(cmt);
    }
    void negsel(int cyc, int dst, int src, int n, std::string cmt = {}) {
        auto& o = st(cyc, SOp::Negsel, dst);
        o.src = src;
        o.nbits = n;
        o.comment = std::move(cmt);
    }
    void lutl(int cyc, int dst, int src, std::string cmt = {}) {
        auto& o = st(cyc, SOp::LutL, dst);
        o.src = src;
        o.comment = std::move(cmt);
    }
    void cmb(int cyc, int dst, int lhi, int llo, int vlo, int t, std::string cmt = {}) {
        auto& o = st(cyc, SOp::Cmb, dst);
        o.src = lhi;
        o.src2 = llo;
        o.src3 = vlo;
        o.src4 = t;
        o.comment = std::move(cmt);
    }
    void ksign(int cyc, int dst, int src, CondSpec c, std::string cmt = {}) {
        auto& o = st(cyc, SOp::Ksign, dst);
        o.src = src;
        o.cond = c;
        o.comment = std::move(cmt);
    }
    void kmag(int cyc, int dst, int src, std::string cmt = {}) {
        auto& o = st(cyc, SOp::Kmag, dst);
        o.src = src;
        o.comment = std::move(cmt);
    }
    void trfwr(int cyc, int dst, int src, std::string cmt = {}) {
        auto& o = st(cyc, SOp::TrfWrite, dst);
        o.src = src;
        o.comment = std::move(cmt);
    }
    void trfrd(int cyc, int dst, int src, std::string cmt = {}) {
        auto& o = st(cyc, SOp::TrfRead, dst);
        o.src = src;
        o.comment = std::move(cmt);
    }

    // structural bitwise NOT: force the sign rail and run the inverter mux
    // (Kmag of a negative value yields ~x), then mask.
    void inv(int cyc, int dst, int src, int bits, std::string cmt = {}) {
        mov(cyc, dst, src);
        insi(cyc, dst, 1, 31, 1, "force sign rail");
        kmag(cyc, dst, dst, std::move(cmt));
        ext(cyc, dst, dst, 0, bits);
    }

    MicroProgram take(int declared, std::vector<int> ins, std::vector<int> outs) {
        p.declared_cycles = declared;
        p.inputs = std::move(ins);
        p.outputs = std::move(outs);
        std::stable_sort(p.ops.begin(), p.ops.end(),
                         [](const MicroOp& a, const MicroOp& b) { return a.cycle < b.cycle; });
        validate_program(p);
        return std::move(p);
    }
};

// ---------------------------------------------------------------------------
// posit decode programs
// ---------------------------------------------------------------------------
// register conventions (decode, single operand):
//   in : r0 = P
//   out: r1 = flags (b0 S, b1 run-polarity), r2 = ex = K<<es|E, r3 = Fn
//        (hidden-bit fraction lane), r4 = K, r5 = L, r6 = E, r7 = F raw
MicroProgram build_decode_p8(int es) {
    std::string fmt = "p8e" + std::to_string(es);
    Emit e("decode_" + fmt, fmt, "decode");
    int fw = 7 - es;  // fraction lane width below the hidden bit

    // cycle 0: condition the operand, run the threshold comparisons
    e.negsel(0, 8, 0, 8, "magnitude word");
    e.ext(0, 1, 0, 7, 1, "S");
    e.ext(0, 12, 8, 6, 1);
    e.ins(0, 1, 12, 1, 1, "run polarity P[n-2]");
    e.tsel(0, 9, 8, 8, "T");
    e.cl(0, Unit::PC, QOpcode::PositDecode, 7, 10, 0, R(9), {}, {}, -1,
         "V thermometer");

    // cycle 1: LUT, sign fix, shift, extract, write back
    e.lutl(1, 5, 10, "run length");
    e.ksign(1, 4, 5, C(1, 1), "K");
    e.shl(1, 11, 8, Ar(5, 1), "shift out regime+stop");
    e.ext(1, 11, 11, 0, 7);
    if (es > 0) {
        e.ext(1, 6, 11, 7 - es, es, "E");
    } else {
        e.movi(1, 6, 0, "E (es=0)");
    }
    e.ext(1, 12, 11, 0, fw, "fraction window");
    e.shr(1, 7, 12, Ar(5, 1), "raw F");
    e.mov(1, 3, 12);
    e.insi(1, 3, 1, fw, 1, "hidden bit");
    if (es > 0) {
        e.shl(1, 2, 4, A(es));
        e.ins(1, 2, 6, 0, es, "ex = K<<es | E");
    } else {
        e.mov(1, 2, 4);
    }
    return e.take(2, {0}, {1, 2, 3, 4, 5, 6, 7});
}

MicroProgram build_decode_p16(int es, bool single = true, int base_cycle = 0,
                              Emit* outer = nullptr, int in = 0, int rf = 1,
                              int rex = 2, int rfn = 3) {
    // flat 6-cycle schedule; when `outer` is given, emit into it (dual decode)
    std::string fmt = "p16e" + std::to_string(es);
    Emit local("decode_" + fmt, fmt, "decode");
    Emit& e = outer ? *outer : local;
    int c = base_cycle;
    int fw = 15 - es;

    e.negsel(c, 8, in, 16, "magnitude word");
    e.ext(c, rf, in, 15, 1, "S");
    e.ext(c, 12, 8, 14, 1);
    e.ins(c, rf, 12, 1, 1, "run polarity");
    e.tsel(c, 9, 8, 16, "T (15 bits)");
    e.shr(c, 12, 9, A(8), "high window T[14:8]");
    e.movi(c, 10, 0);
    e.movi(c, 11, 0);
    // both clusters run the same comparison set concurrently
    e.cl(c, Unit::PC, QOpcode::PositDecode, 7, 10, 0, R(12), {}, {}, -1, "V high");
    e.cl(c, Unit::SC, QOpcode::PositDecode, 7, 11, 0, R(9), {}, {}, -1, "V low (T[6:0])");

    e.lutl(c + 1, 5, 10, "first lookup");
    e.movi(c + 2, 14, 0x40);
    e.sel(c + 2, 12, C(11), 11, 14, "guard zero low vector");
    e.lutl(c + 2, 14, 12, "second lookup");
    e.cmb(c + 3, 5, 5, 14, 11, 9, "combine regime halves");
    e.ksign(c + 3, 9, 5, C(rf, 1), "K");

    e.shl(c + 4, 11, 8, Ar(5, 1));
    e.ext(c + 4, 11, 11, 0, 15, "window");
    if (es > 0) {
        e.ext(c + 4, 6, 11, 15 - es, es, "E");
    } else {
        e.movi(c + 4, 6, 0, "E (es=0)");
    }
    e.ext(c + 4, 12, 11, 0, fw);
    e.shr(c + 4, 7, 12, Ar(5, 1), "raw F");
    e.mov(c + 4, 14, 12);
    e.insi(c + 4, 14, 1, fw, 1, "hidden bit");
    if (single) e.mov(c + 4, 4, 9, "K");
    if (es > 0) {
        e.shl(c + 4, 9, 9, A(es));
        e.ins(c + 4, 9, 6, 0, es);
    }
    e.trfwr(c + 5, rfn, 14, "write back Fn");
    e.trfwr(c + 5, rex, 9, "write back ex");
    if (outer) return MicroProgram{};
    return e.take(6, {0}, {1, 2, 3, 4, 5, 6, 7});
}

// dual decode for exec: out r2 = flags (b0 Sa, b1 Sb), r3 = exa, r4 = Fna,
// r5 = exb, r6 = Fnb
MicroProgram build_decode2_p8(int es) {
    std::string fmt = "p8e" + std::to_string(es);
    Emit e("decode2_" + fmt, fmt, "decode2");
    int fw = 7 - es;

    e.negsel(0, 8, 0, 8);
    e.negsel(0, 9, 1, 8);
    e.ext(0, 2, 0, 7, 1, "Sa");
    e.ext(0, 12, 1, 7, 1);
    e.ins(0, 2, 12, 1, 1, "Sb");
    e.ext(0, 12, 8, 6, 1);
    e.ins(0, 2, 12, 2, 1, "polarity a");
    e.ext(0, 12, 9, 6, 1);
    e.ins(0, 2, 12, 3, 1, "polarity b");
    e.tsel(0, 10, 8, 8);
    e.tsel(0, 11, 9, 8);
    e.cl(0, Unit::PC, QOpcode::PositDecode, 7, 13, 0, R(10), {}, {}, -1, "Va");
    e.cl(0, Unit::SC, QOpcode::PositDecode, 7, 14, 0, R(11), {}, {}, -1, "Vb");

    // operand a
    e.lutl(1, 12, 13);
    e.ksign(1, 15, 12, C(2, 2));
    e.shl(1, 10, 8, Ar(12, 1));
    e.ext(1, 10, 10, 0, 7);
    e.ext(1, 13, 10, 7 - es, es > 0 ? es : 1);  // es=0 handled below
    e.ext(1, 10, 10, 0, fw);
    e.mov(1, 4, 10);
    e.insi(1, 4, 1, fw, 1, "Fna");
    if (es > 0) {
        e.shl(1, 3, 15, A(es));
        e.ins(1, 3, 13, 0, es, "exa");
    } else {
        e.mov(1, 3, 15, "exa = K");
    }
    // operand b
    e.lutl(1, 12, 14);
    e.ksign(1, 15, 12, C(2, 3));
    e.shl(1, 11, 9, Ar(12, 1));
    e.ext(1, 11, 11, 0, 7);
    e.ext(1, 14, 11, 7 - es, es > 0 ? es : 1);
    e.ext(1, 11, 11, 0, fw);
    e.mov(1, 6, 11);
    e.insi(1, 6, 1, fw, 1, "Fnb");
    if (es > 0) {
        e.shl(1, 5, 15, A(es));
        e.ins(1, 5, 14, 0, es, "exb");
    } else {
        e.mov(1, 5, 15, "exb = K");
    }
    return e.take(2, {0, 1}, {2, 3, 4, 5, 6});
}

MicroProgram build_decode2_p16(int es) {
    std::string fmt = "p16e" + std::to_string(es);
    Emit e("decode2_" + fmt, fmt, "decode2");
    // operand A: cycles 0..5, flags to r2, ex to r3, Fn to r4
    build_decode_p16(es, false, 0, &e, 0, 2, 3, 4);
    // operand B: cycles 6..11, flags to r13, ex to r5, Fn to r6
    build_decode_p16(es, false, 6, &e, 1, 13, 5, 6);
    // merge Sb into the shared flags register
    e.ext(11, 12, 13, 0, 1, "Sb");
    e.ins(11, 2, 12, 1, 1);
    return e.take(12, {0, 1}, {2, 3, 4, 5, 6});
}

// ---------------------------------------------------------------------------
// integer programs
// ---------------------------------------------------------------------------

MicroProgram build_int_add(int w) {
    std::string fmt = "int" + std::to_string(w);
    Emit e("add_" + fmt, fmt, "add");
    if (w <= 8) {
        e.cl(0, Unit::PC, QOpcode::AddCarry, w, 8, 0, R(0), R(1), ci(0), -1, "carries");
        e.cl(1, Unit::SC, QOpcode::AddSum, w, 15, 0, R(0), R(1), ci(0), 8, "sum");
        return e.take(2, {0, 1}, {15});
    }
    e.cl(0, Unit::PC, QOpcode::AddCarry, 8, 8, 0, R(0), R(1), ci(0), -1, "low carries");
    e.cl(1, Unit::SC, QOpcode::AddSum, 8, 15, 0, R(0), R(1), ci(0), 8, "low sum");
    e.cl(2, Unit::PC, QOpcode::AddCarry, 8, 9, 0, R(0, 1), R(1, 1), cr(8, 7), -1,
         "high carries");
    e.cl(3, Unit::SC, QOpcode::AddSum, 8, 15, 1, R(0, 1), R(1, 1), cr(8, 7), 9,
         "high sum");
    return e.take(4, {0, 1}, {15});
}

// MSB-first shift-add; one iteration per multiplier bit below the top, each
// staged through the TRF per the two-stage pipeline (store, then retrieve).
MicroProgram build_int_mul(int w, int budget) {
    std::string fmt = "int" + std::to_string(w);
    Emit e("mul_" + fmt, fmt, "mul");
    int lanes = w <= 8 ? 1 : 2;
    int c = 0;
    e.movi(c, 9, 0, "zero");
    e.ext(c, 10, 1, w - 1, 1, "multiplier msb");
    e.sel(c, 11, C(10), 0, 9, "acc init");
    for (int k = w - 2; k >= 0; --k) {
        bool last = k == 0;
        e.shl(c, 12, 11, A(1), "acc << 1");
        e.ext(c, 10, 1, k, 1);
        e.sel(c, 13, C(10), 0, 9, "partial product");
        if (lanes == 1) {
            e.cl(c, Unit::PC, QOpcode::AddCarry, w, 8, 0, R(12), R(13), ci(0));
            e.cl(c + 1, Unit::SC, QOpcode::AddSum, w, 11, 0, R(12), R(13), ci(0), 8);
            c += 2;
        } else {
            e.cl(c, Unit::PC, QOpcode::AddCarry, 8, 8, 0, R(12), R(13), ci(0));
            e.cl(c + 1, Unit::SC, QOpcode::AddSum, 8, 11, 0, R(12), R(13), ci(0), 8);
            e.cl(c + 2, Unit::PC, QOpcode::AddCarry, 8, 7, 0, R(12, 1), R(13, 1), cr(8, 7));
            e.cl(c + 3, Unit::SC, QOpcode::AddSum, 8, 11, 1, R(12, 1), R(13, 1), cr(8, 7),
                 7);
            c += 4;
        }
        if (!last) {  // stage the accumulator through the TRF (two-stage pipe)
            e.trfwr(c, 14, 11, "stage acc");
            e.trfrd(c + 1, 11, 14);
            c += lanes == 1 ? 2 : 3;
        }
    }
    // remaining cycles up to the budget stage the result back
    bool wr = true;
    for (; c < budget - 1; ++c, wr = !wr) {
        if (wr)
            e.trfwr(c, 14, 11, "write-back stage");
        else
            e.trfrd(c, 11, 14);
    }
    e.trfwr(budget - 1, 15, 11, "result");
    return e.take(budget, {0, 1}, {15});
}

MicroProgram build_int_logic(int w, TaluOp op) {
    std::string fmt = "int" + std::to_string(w);
    const char* name = talu_op_name(op);
    Emit e(std::string(name) + "_" + fmt, fmt, name);
    QOpcode q = op == TaluOp::And ? QOpcode::And : op == TaluOp::Or ? QOpcode::Or
                                                                    : QOpcode::Not;
    if (op == TaluOp::Xor) {
        if (w <= 8) {
            e.cl(0, Unit::PC, QOpcode::XorStep1, w, 8, 0, R(0), R(1));
            e.cl(1, Unit::SC, QOpcode::XorStep2, w, 15, 0, R(0), R(1), {}, 8);
            return e.take(2, {0, 1}, {15});
        }
        e.cl(0, Unit::PC, QOpcode::XorStep1, 8, 8, 0, R(0), R(1));
        e.cl(1, Unit::SC, QOpcode::XorStep2, 8, 15, 0, R(0), R(1), {}, 8);
        e.cl(1, Unit::PC, QOpcode::XorStep1, 8, 9, 0, R(0, 1), R(1, 1));
        e.cl(2, Unit::SC, QOpcode::XorStep2, 8, 15, 1, R(0, 1), R(1, 1), {}, 9);
        return e.take(3, {0, 1}, {15});
    }
    if (op == TaluOp::Comp) {
        if (w <= 8) {
            e.cl(0, Unit::PC, QOpcode::Comp, w, 15, 0, R(0), R(1), {}, -1,
             "predicate is bit w-1");
            return e.take(1, {0, 1}, {15});
        }
        e.cl(0, Unit::PC, QOpcode::Comp, 8, 8, 0, R(0, 1), R(1, 1), {}, -1, "hi a>=b");
        e.cl(0, Unit::SC, QOpcode::Comp, 8, 9, 0, R(1, 1), R(0, 1), {}, -1, "hi b>=a");
        e.cl(1, Unit::PC, QOpcode::Comp, 8, 10, 0, R(0), R(1), {}, -1, "lo a>=b");
        e.movi(2, 11, 0);
        e.movi(2, 12, 1);
        e.sel(2, 13, C(10, 7), 12, 11, "lo verdict");
        e.sel(2, 14, C(9, 7), 13, 12, "hi equal ? lo : greater");
        e.sel(2, 14, C(8, 7), 14, 11, "a >= b");
        e.shl(2, 15, 14, A(15));
        return e.take(3, {0, 1}, {15});
    }
    // and / or / not
    if (w <= 8) {
        e.cl(0, Unit::PC, q, w, 15, 0, R(0), op == TaluOp::Not ? Operand{} : R(1));
        return e.take(1, op == TaluOp::Not ? std::vector<int>{0} : std::vector<int>{0, 1},
                      {15});
    }
    e.cl(0, Unit::PC, q, 8, 15, 0, R(0), op == TaluOp::Not ? Operand{} : R(1));
    e.cl(0, Unit::SC, q, 8, 15, 1, R(0, 1), op == TaluOp::Not ? Operand{} : R(1, 1));
    return e.take(1, op == TaluOp::Not ? std::vector<int>{0} : std::vector<int>{0, 1},
                  {15});
}


// ---------------------------------------------------------------------------
// posit arithmetic
// ---------------------------------------------------------------------------
// Arithmetic programs consume the dual-decode outputs:
//   r2 = flags (b0 Sa, b1 Sb), r3 = exa, r4 = Fna, r5 = exb, r6 = Fnb
// Fn carries the hidden bit at position n-es-1; ex = K<<es | E, sign-extended.
// Result word lands in r15.
//
// The encode tail packs the result through a 32-bit pattern register W:
//   u  = [stop | E | mant bits]            (n bits, stop at bit n-1)
//   W0 = u << (31-n)                       (stop at bit 30)
//   W  = K >= 0 ? SAR(W0 | bit31, |K|) : SHR(W0, |K|-1 via KMAG)
// so the regime run, stop bit, exponent and fraction land at body = W[31:33-n]
// with guard/sticky below; one add pair rounds and (operand-selected) negates.

struct PositTail {
    // registers fixed by convention
    static constexpr int rZero = 0, rOne = 1, rFlags = 2;
};

// Emit the sign xor into flags bit 4 (control path select logic).
void emit_sign_xor(Emit& e, int cyc) {
    e.sel(cyc, 9, C(2, 1), 0, 1, "~Sb");
    e.ext(cyc, 10, 2, 1, 1, "Sb");
    e.sel(cyc, 9, C(2, 0), 9, 10, "S = Sa ^ Sb");
    e.ins(cyc, 2, 9, 4, 1, "flags.b4 = result sign");
}

// Shared posit pack-and-round. Entry state:
//   r5 = result exponent (sign-extended 32-bit), r6 = normalized significand
//   with the hidden bit at `hb`, r13 = running sticky (0/1), flags in r2
//   (b4 = result sign), consts in r0/r1. Emits from cycle `c`; returns the
//   cycle after the final select into r15.
int emit_pack_and_round(Emit& e, int n, int es, int c, int hb, int end_pads) {
    // u: stop | exponent field | as many significand bits as the W window fits
    int ufrac = std::min(hb, 17 - es);
    int residual = hb - ufrac;
    int uw = ufrac + es + 1;
    if (es > 0) e.sar(c, 3, 5, A(es), "K");
    else e.mov(c, 3, 5);
    e.kmag(c, 9, 3, "run length - 1");
    if (residual > 0) {
        e.ext(c, 10, 6, 0, residual);
        e.sel(c, 13, C(10), 1, 13, "residual significand bits -> sticky");
    }
    e.ext(c, 4, 6, residual, ufrac, "u: fraction");
    if (es > 0) {
        e.ext(c, 10, 5, 0, es);
        e.ins(c, 4, 10, ufrac, es, "u: exponent field");
    }
    e.ext(c, 10, 5, 31, 1);
    e.ins(c, 4, 10, uw - 1, 1, "u: stop bit");
    e.shl(c, 7, 4, A(31 - uw), "W0");
    e.mov(c, 14, 7);
    e.insi(c, 14, 1, 31, 1, "regime fill seed");
    e.sar(c, 14, 14, Ar(9), "ones-run pattern");
    e.shr(c, 7, 7, Ar(9), "zeros-run pattern");
    e.sel(c, 7, C(5, 31), 7, 14, "W");
    e.ext(c, 4, 7, 33 - n, n - 1, "body");
    e.ext(c, 10, 7, 32 - n, 1, "guard");
    e.ext(c, 3, 7, 33 - n, 1, "lsb");
    // sticky windows: everything below the guard bit down to the lowest bit
    // the u field can reach, compared against zero on the clusters
    int wtop = 31 - n;
    int wlow = (31 - uw) - (n - 2);
    if (wlow < 0) wlow = 0;
    std::vector<std::pair<int, int>> windows;
    for (int hi = wtop; hi >= wlow; hi -= 8) {
        int lo = std::max(wlow, hi - 7);
        windows.push_back({lo, hi - lo + 1});
    }
    // regime saturation test rides with the first window pair
    e.movi(c, 12, std::uint32_t(n - 2));
    bool sat_done = false;
    std::vector<int> window_flags;  // registers holding comp vectors (bit 7)
    int wi = 0;
    while (wi < int(windows.size()) || !sat_done) {
        bool pc_used = false, sc_used = false;
        if (wi < int(windows.size())) {
            e.ext(c, 14, 7, windows[std::size_t(wi)].first,
                  windows[std::size_t(wi)].second);
            e.cl(c, Unit::PC, QOpcode::Comp, 8, 8, 0, R(14), R(1), {}, -1,
                 "sticky window");
            e.sel(c + 1, 13, C(8, 7), 1, 13, "sticky |= window");
            ++wi;
            pc_used = true;
        }
        if (wi < int(windows.size())) {
            // second window on the secondary cluster, staged through r14
            e.shr(c, 14, 7, A(windows[std::size_t(wi)].first));
            e.ext(c, 14, 14, 0, windows[std::size_t(wi)].second);
            e.cl(c, Unit::SC, QOpcode::Comp, 8, 12, 0, R(14), R(1), {}, -1,
                 "sticky window");
            e.sel(c + 1, 13, C(12, 7), 1, 13, "sticky |= window");
            e.movi(c + 1, 12, std::uint32_t(n - 2));
            ++wi;
            sc_used = true;
        }
        if (!sat_done && !sc_used) {
            e.cl(c, Unit::SC, QOpcode::Comp, 8, 11, 0, R(9), R(12), {}, -1,
                 "regime saturation");
            sat_done = true;
            sc_used = true;
        }
        if (!pc_used && !sc_used) break;
        ++c;
    }
    // rounding increment and the operand-selected round/negate add
    e.sel(c, 12, C(13), 1, 3, "sticky | lsb");
    e.sel(c, 12, C(10), 12, 0, "guard & (sticky | lsb)");
    e.sel(c, 14, C(5, 31), 0, 1, "positive K?");
    e.sel(c, 14, C(11, 7), 14, 0, "suppress past maxpos");
    e.sel(c, 12, C(14), 0, 12, "inc");
    e.sel(c, 14, C(12), 0, 1, "~inc");
    e.sel(c, 14, C(2, 4), 14, 12, "round carry-in");
    e.inv(c, 10, 4, n - 1, "~body");
    e.sel(c, 10, C(2, 4), 10, 4, "negate when the sign is set");
    if (n == 8) {
        e.cl(c, Unit::PC, QOpcode::AddCarry, 7, 8, 0, R(10), R(0), cr(14, 0));
        e.cl(c + 1, Unit::SC, QOpcode::AddSum, 7, 11, 0, R(10), R(0), cr(14, 0), 8);
        c += 2;
    } else {
        e.cl(c, Unit::PC, QOpcode::AddCarry, 8, 8, 0, R(10), R(0), cr(14, 0));
        e.cl(c + 1, Unit::SC, QOpcode::AddSum, 8, 11, 0, R(10), R(0), cr(14, 0), 8);
        e.cl(c + 1, Unit::PC, QOpcode::AddCarry, 7, 9, 0, R(10, 1), R(0, 1), cr(8, 7));
        e.cl(c + 2, Unit::SC, QOpcode::AddSum, 7, 11, 1, R(10, 1), R(0, 1), cr(8, 7), 9);
        c += 3;
    }
    for (int i = 0; i < end_pads; ++i) {
        if (i % 2 == 0) e.trfwr(c, 14, 11, "write-back stage");
        else e.trfrd(c, 11, 14);
        ++c;
    }
    // finals: clean the lanes, set the sign bit, fix the all-zero underflow
    e.ext(c, 12, 11, 0, n - 1);
    e.ext(c, 10, 2, 4, 1);
    e.ins(c, 12, 10, n - 1, 1, "sign bit");
    e.mov(c, 14, 12);
    e.ext(c, 14, 14, 0, n - 1);
    e.movi(c, 9, (1u << n) - 1u, "-minpos pattern");
    e.sel(c, 9, C(2, 4), 9, 1, "signed minpos");
    e.sel(c, 15, C(14), 12, 9, "underflow never rounds to zero");
    return c + 1;
}

MicroProgram build_posit_mul(int n, int es, int budget) {
    std::string fmt = "p" + std::to_string(n) + "e" + std::to_string(es);
    Emit e("mul_" + fmt, fmt, "mul");
    int mw = n - es;  // significand width including the hidden bit

    e.movi(0, 0, 0);
    e.movi(0, 1, 1);
    emit_sign_xor(e, 0);

    int t0 = 0;  // cycle of the final retire
    if (n == 8 && es == 2) {
        // radix-2 LSB-first multiply with retire: single-slice adds, period 2
        e.ext(0, 10, 6, 0, 1, "multiplier bit 0");
        e.sel(0, 12, C(10), 4, 0, "partial 0");
        e.shr(0, 11, 12, A(1), "acc");
        e.ext(0, 13, 12, 0, 1, "retired bit -> sticky");
        for (int k = 1; k < mw; ++k) {
            int t = 2 * (k - 1);
            e.ext(t, 10, 6, k, 1);
            e.sel(t, 12, C(10), 4, 0, "partial");
            e.cl(t, Unit::PC, QOpcode::AddCarry, 8, 8, 0, R(11), R(12), ci(0));
            e.cl(t + 1, Unit::SC, QOpcode::AddSum, 8, 11, 0, R(11), R(12), ci(0), 8);
            e.sel(t + 2, 13, C(11, 0), 1, 13, "retire into sticky");
            e.shr(t + 2, 11, 11, A(1), "retire");
        }
        t0 = 2 * (mw - 1);
    } else if (n == 8) {
        // radix-4: 2Fa free, 3Fa via one add (carry + bit 8 fold structurally)
        e.shl(0, 14, 4, A(1), "2Fa");
        e.movi(0, 7, 0);
        e.cl(0, Unit::PC, QOpcode::AddCarry, 8, 8, 0, R(4), R(14), ci(0), -1, "3Fa");
        e.cl(1, Unit::SC, QOpcode::AddSum, 8, 7, 0, R(4), R(14), ci(0), 8);
        e.ext(2, 10, 14, 8, 1, "2Fa bit 8");
        e.ext(2, 9, 8, 7, 1, "carry out");
        e.sel(2, 12, C(9), 0, 1);
        e.sel(2, 12, C(10), 12, 9, "bit8 ^ carry");
        e.ins(2, 7, 12, 8, 1);
        e.sel(2, 12, C(10), 9, 0, "bit8 & carry");
        e.ins(2, 7, 12, 9, 1);
        auto addend = [&](int t, int k) {
            e.ext(t, 10, 6, 2 * k + 1, 1);
            e.ext(t, 9, 6, 2 * k, 1);
            e.sel(t, 12, C(9), 7, 14, "3Fa : 2Fa");
            e.sel(t, 8, C(9), 4, 0, "Fa : 0");
            e.sel(t, 12, C(10), 12, 8, "digit * Fa");
        };
        // init with digit 0
        addend(2, 0);
        e.shr(2, 11, 12, A(2), "acc");
        e.ext(2, 9, 12, 0, 2);
        e.sel(2, 13, C(9), 1, 0, "retired bits -> sticky");
        for (int k = 1; k < mw / 2; ++k) {
            int t = 2 + 3 * (k - 1);
            addend(t, k);
            e.cl(t, Unit::PC, QOpcode::AddCarry, 8, 8, 0, R(11), R(12), ci(0));
            e.cl(t + 1, Unit::SC, QOpcode::AddSum, 8, 9, 0, R(11), R(12), ci(0), 8);
            e.cl(t + 1, Unit::PC, QOpcode::AddCarry, 2, 10, 0, R(11, 1), R(12, 1),
                 cr(8, 7));
            e.cl(t + 2, Unit::SC, QOpcode::AddSum, 2, 9, 1, R(11, 1), R(12, 1), cr(8, 7),
                 10);
            e.ext(t + 3, 10, 9, 0, 2);
            e.sel(t + 3, 13, C(10), 1, 13, "retire into sticky");
            e.shr(t + 3, 11, 9, A(2), "retire");
            t0 = t + 3;
        }
    } else if (es == 2) {
        // p16e2: radix-4, two-slice adds (sums stay under 2^16)
        e.shl(0, 14, 4, A(1), "2Fa");
        e.movi(0, 7, 0);
        e.cl(0, Unit::PC, QOpcode::AddCarry, 8, 8, 0, R(4), R(14), ci(0), -1, "3Fa low");
        e.cl(1, Unit::SC, QOpcode::AddSum, 8, 7, 0, R(4), R(14), ci(0), 8);
        e.cl(1, Unit::PC, QOpcode::AddCarry, 8, 9, 0, R(4, 1), R(14, 1), cr(8, 7),
             -1, "3Fa high");
        e.cl(2, Unit::SC, QOpcode::AddSum, 8, 7, 1, R(4, 1), R(14, 1), cr(8, 7), 9);
        auto addend = [&](int t, int k) {
            e.ext(t, 10, 6, 2 * k + 1, 1);
            e.ext(t, 9, 6, 2 * k, 1);
            e.sel(t, 12, C(9), 7, 14, "3Fa : 2Fa");
            e.sel(t, 8, C(9), 4, 0, "Fa : 0");
            e.sel(t, 12, C(10), 12, 8, "digit * Fa");
        };
        addend(3, 0);
        e.shr(3, 11, 12, A(2), "acc");
        e.ext(3, 9, 12, 0, 2);
        e.sel(3, 13, C(9), 1, 0, "retired bits -> sticky");
        for (int k = 1; k < mw / 2; ++k) {
            int t = 3 + 3 * (k - 1);
            addend(t, k);
            e.cl(t, Unit::PC, QOpcode::AddCarry, 8, 8, 0, R(11), R(12), ci(0));
            e.cl(t + 1, Unit::SC, QOpcode::AddSum, 8, 9, 0, R(11), R(12), ci(0), 8);
            e.cl(t + 1, Unit::PC, QOpcode::AddCarry, 8, 10, 0, R(11, 1), R(12, 1),
                 cr(8, 7));
            e.cl(t + 2, Unit::SC, QOpcode::AddSum, 8, 9, 1, R(11, 1), R(12, 1), cr(8, 7),
                 10);
            e.ext(t + 3, 10, 9, 0, 2);
            e.sel(t + 3, 13, C(10), 1, 13, "retire into sticky");
            e.shr(t + 3, 11, 9, A(2), "retire");
            t0 = t + 3;
        }
    } else {
        // p16e0: the 16-bit significand lane pushes radix-4 partial sums to 18
        // bits, three slices per add, period 4 (see budget_waivers)
        e.shl(0, 14, 4, A(1), "2Fa");
        e.movi(0, 7, 0);
        e.cl(0, Unit::PC, QOpcode::AddCarry, 8, 8, 0, R(4), R(14), ci(0), -1, "3Fa low");
        e.cl(1, Unit::SC, QOpcode::AddSum, 8, 7, 0, R(4), R(14), ci(0), 8);
        e.cl(1, Unit::PC, QOpcode::AddCarry, 8, 9, 0, R(4, 1), R(14, 1), cr(8, 7));
        e.cl(2, Unit::SC, QOpcode::AddSum, 8, 7, 1, R(4, 1), R(14, 1), cr(8, 7), 9);
        e.ext(3, 10, 14, 16, 1, "2Fa bit 16");
        e.ext(3, 9, 9, 7, 1, "carry out");
        e.sel(3, 12, C(9), 0, 1);
        e.sel(3, 12, C(10), 12, 9, "bit16 ^ carry");
        e.ins(3, 7, 12, 16, 1);
        e.sel(3, 12, C(10), 9, 0, "bit16 & carry");
        e.ins(3, 7, 12, 17, 1);
        auto addend = [&](int t, int k) {
            e.ext(t, 10, 6, 2 * k + 1, 1);
            e.ext(t, 9, 6, 2 * k, 1);
            e.sel(t, 12, C(9), 7, 14, "3Fa : 2Fa");
            e.sel(t, 8, C(9), 4, 0, "Fa : 0");
            e.sel(t, 12, C(10), 12, 8, "digit * Fa");
        };
        addend(3, 0);
        e.shr(3, 11, 12, A(2), "acc");
        e.ext(3, 9, 12, 0, 2);
        e.sel(3, 13, C(9), 1, 0, "retired bits -> sticky");
        for (int k = 1; k < mw / 2; ++k) {
            int t = 4 + 4 * (k - 1);
            addend(t, k);
            e.cl(t, Unit::PC, QOpcode::AddCarry, 8, 8, 0, R(11), R(12), ci(0));
            e.cl(t + 1, Unit::SC, QOpcode::AddSum, 8, 9, 0, R(11), R(12), ci(0), 8);
            e.cl(t + 1, Unit::PC, QOpcode::AddCarry, 8, 10, 0, R(11, 1), R(12, 1),
                 cr(8, 7));
            e.cl(t + 2, Unit::SC, QOpcode::AddSum, 8, 9, 1, R(11, 1), R(12, 1), cr(8, 7),
                 10);
            e.cl(t + 2, Unit::PC, QOpcode::AddCarry, 2, 8, 0, R(11, 2), R(12, 2),
                 cr(10, 7));
            e.cl(t + 3, Unit::SC, QOpcode::AddSum, 2, 9, 2, R(11, 2), R(12, 2), cr(10, 7),
                 8);
            e.ext(t + 4, 10, 9, 0, 2);
            e.sel(t + 4, 13, C(10), 1, 13, "retire into sticky");
            e.shr(t + 4, 11, 9, A(2), "retire");
            t0 = t + 4;
        }
    }

    e.cl(t0, Unit::PC, QOpcode::AddCarry, 8, 8, 0, R(3), R(5), cr(11, mw - 1),
         -1, "ex = exa + exb + carry");
    e.cl(t0 + 1, Unit::SC, QOpcode::AddSum, 8, 12, 0, R(3), R(5), cr(11, mw - 1), 8);
    int c = t0 + 2;
    if (n == 8 && es == 2) {
        e.trfwr(c, 14, 12, "stage exponent through TRF");
        e.trfrd(c + 1, 12, 14);
        c += 2;
    }
    e.shl(c, 5, 12, A(24));
    e.sar(c, 5, 5, A(24), "sign-extended exponent");
    e.shl(c, 14, 11, A(1));
    e.sel(c, 6, C(11, mw - 1), 11, 14, "normalized significand");
    int end_pads = n == 8 && es == 2 ? 1 : 0;
    emit_pack_and_round(e, n, es, c, mw - 1, end_pads);
    return e.take(budget, {2, 3, 4, 5, 6}, {15});
}

MicroProgram build_posit_add(int n, int es, int budget, int end_pads) {
    std::string fmt = "p" + std::to_string(n) + "e" + std::to_string(es);
    Emit e("add_" + fmt, fmt, "add");
    int hp = n - 1 - es;              // hidden bit position in Fn
    int lane = n == 8 ? 13 : 15;      // hidden bit position in the adder lane
    int lw = n == 8 ? 15 : 17;        // significand lane width incl carry

    // cycle 0: bias the exponents so unsigned compares order signed values
    e.movi(0, 0, 0);
    e.movi(0, 1, 1);
    e.movi(0, 13, 0, "sticky");
    auto bias = [&](int cyc, int dst, int src) {
        e.ext(cyc, dst, src, 0, 8);
        e.ext(cyc, 7, src, 7, 1);
        e.sel(cyc, 8, C(7), 0, 1);
        e.ins(cyc, dst, 8, 7, 1, "biased exponent");
    };
    bias(0, 9, 3);
    bias(0, 10, 5);
    e.cl(0, Unit::PC, QOpcode::Comp, 8, 11, 0, R(9), R(10), {}, -1, "exa >= exb");
    e.cl(0, Unit::SC, QOpcode::Comp, 8, 12, 0, R(10), R(9), {}, -1, "exb >= exa");

    int c;
    if (n == 8) {
        e.cl(1, Unit::PC, QOpcode::Comp, 8, 7, 0, R(4), R(6), {}, -1, "Fna >= Fnb");
        c = 2;
        e.sel(c, 8, C(7, 7), 1, 0);
    } else {
        e.cl(1, Unit::PC, QOpcode::Comp, 8, 7, 0, R(4, 1), R(6, 1), {}, -1, "F hi >=");
        e.cl(1, Unit::SC, QOpcode::Comp, 8, 8, 0, R(6, 1), R(4, 1), {}, -1, "F hi <=");
        e.cl(2, Unit::PC, QOpcode::Comp, 8, 9, 0, R(4), R(6), {}, -1, "F lo >=");
        c = 3;
        e.sel(c, 10, C(9, 7), 1, 0);
        e.sel(c, 8, C(8, 7), 10, 1, "F hi equal ? low verdict : greater");
        e.sel(c, 8, C(7, 7), 8, 0);
    }
    // c: magnitude order known in r8; swap, signs, and the exponent difference
    e.sel(c, 8, C(12, 7), 8, 1, "ex equal ? F verdict : greater");
    e.sel(c, 8, C(11, 7), 8, 0, "a >= b by magnitude");
    e.sel(c, 9, C(8), 3, 5, "bigger exponent");
    e.sel(c, 10, C(8), 5, 3, "smaller exponent");
    e.sel(c, 7, C(8), 4, 6, "bigger significand");
    e.sel(c, 12, C(8), 6, 4, "smaller significand");
    e.ext(c, 14, 2, 0, 1);
    e.ext(c, 11, 2, 1, 1);
    e.sel(c, 14, C(8), 14, 11, "result sign = bigger operand sign");
    e.ins(c, 2, 14, 4, 1);
    e.sel(c, 14, C(2, 1), 0, 1);
    e.sel(c, 14, C(2, 0), 14, 11, "effective subtract");
    e.ins(c, 2, 14, 5, 1);
    e.cl(c, Unit::PC, QOpcode::AddCarry, 8, 11, 0, R(9), Rn(10), ci(1),
         -1, "exponent difference");
    e.cl(c + 1, Unit::SC, QOpcode::AddSum, 8, 11, 0, R(9), Rn(10), ci(1), 11);
    c += 2;

    // c: align into the wide lane; dropped low bits feed the sticky
    e.ext(c, 11, 11, 0, 8, "d");
    e.shl(c, 7, 7, A(lane - hp), "big in lane");
    e.shl(c, 12, 12, A(lane - hp));
    if (n == 16) {
        // close-path half bit: a d=1 subtract may shift out one live bit,
        // which is re-injected exactly below the difference later
        e.ext(c, 14, 11, 1, 7);
        e.sel(c, 14, C(14), 0, 1, "d <= 1");
        e.sel(c, 14, C(11, 0), 14, 0, "d == 1");
        e.sel(c, 14, C(12, 0), 14, 0, "shifted-out bit is live");
        e.sel(c, 14, C(2, 5), 14, 0, "subtract path");
        e.ins(c, 2, 14, 7, 1, "half-bit flag");
    }
    e.shr(c, 10, 12, Ar(11), "aligned small");
    e.shl(c, 12, 12, Air(32, 11), "dropped bits");
    e.ext(c, 14, 12, 24, 8);
    e.cl(c, Unit::PC, QOpcode::Comp, 8, 8, 0, R(14), R(1), {}, -1, "align sticky hi");
    e.shr(c, 14, 12, A(16));
    e.ext(c, 14, 14, 0, 8);
    e.cl(c, Unit::SC, QOpcode::Comp, 8, 12, 0, R(14), R(1), {}, -1, "align sticky lo");
    c += 1;

    // c: significand add/subtract (operand complemented through a mux); a
    // dropped tail folds into the borrow (S-1 plus a positive remainder)
    e.sel(c, 14, C(8, 7), 1, 13);
    e.sel(c, 14, C(12, 7), 1, 14, "dropped bits");
    e.sel(c, 13, C(2, 7), 13, 14, "sticky skips the exact half bit");
    e.sel(c, 11, C(13), 0, 1);
    e.sel(c, 11, C(2, 7), 0, 11, "half bit borrows like a tail");
    e.sel(c, 11, C(2, 5), 11, 0, "carry-in = sub and no dropped tail");
    e.inv(c, 14, 10, 16, "~aligned");
    e.sel(c, 10, C(2, 5), 14, 10, "subtract selects the complement");
    e.cl(c, Unit::PC, QOpcode::AddCarry, 8, 8, 0, R(7), R(10), cr(11, 0));
    e.cl(c + 1, Unit::SC, QOpcode::AddSum, 8, 12, 0, R(7), R(10), cr(11, 0), 8);
    e.cl(c + 1, Unit::PC, QOpcode::AddCarry, 8, 14, 0, R(7, 1), R(10, 1), cr(8, 7));
    e.cl(c + 2, Unit::SC, QOpcode::AddSum, 8, 12, 1, R(7, 1), R(10, 1), cr(8, 7), 14);
    c += 3;

    // c: sum cleanup, zero flag, complement for the leading-zero count
    e.ext(c, 12, 12, 0, 16);
    if (n == 16) {
        e.ext(c, 10, 14, 7, 1, "carry out");
        e.mov(c, 8, 12);
        e.ins(c, 8, 10, 16, 1, "carry rail");
        e.sel(c, 12, C(2, 5), 12, 8, "sum (adds keep the rail)");
    }
    e.sel(c, 14, C(12), 1, 0);
    e.sel(c, 14, C(2, 7), 1, 14, "the half bit keeps the result nonzero");
    e.ins(c, 2, 14, 6, 1, "nonzero-result flag");
    e.inv(c, 14, 12, lw, "~sum");
    e.movi(c, 8, 0);
    e.movi(c, 10, 0);
    if (n == 8) {
        e.shr(c, 7, 14, A(8));
        e.cl(c, Unit::PC, QOpcode::PositDecode, 7, 8, 0, R(7), {}, {}, -1, "LZ high");
        e.cl(c, Unit::SC, QOpcode::PositDecode, 7, 10, 0, R(14), {}, {}, -1, "LZ low");
    } else {
        e.shr(c, 7, 14, A(10));
        e.cl(c, Unit::PC, QOpcode::PositDecode, 7, 8, 0, R(7), {}, {}, -1, "LZ high");
        e.shr(c, 4, 14, A(2));
        e.cl(c, Unit::SC, QOpcode::PositDecode, 7, 10, 0, R(4), {}, {}, -1, "LZ low");
    }
    c += 1;

    // c: lookups, combine, normalize shift amount
    e.movi(c, 7, 0x40);
    e.sel(c, 11, C(8), 8, 7, "guard empty high vector");
    e.lutl(c, 11, 11);
    e.sel(c, 5, C(10), 10, 7, "guard empty low vector");
    e.lutl(c, 5, 5);
    e.cmb(c, 7, 11, 5, 10, n == 8 ? 14 : 4, "leading zeros");
    if (n == 16) {
        // the combiner window stops at bit 2; resolve deeper hidden positions
        e.movi(c, 11, 15);
        e.movi(c, 5, 16);
        e.sel(c, 11, C(12, 1), 11, 5, "hidden at bit 1 or 0");
        e.ext(c, 5, 12, 2, 15);
        e.sel(c, 7, C(5), 7, 11);
    }
    e.sel(c, 7, C(8), 7, 0, "high window nonzero means LZ = 0");
    if (n == 16) {
        e.movi(c, 11, 17);
        e.sel(c, 11, C(12), 7, 11, "half bit alone: hidden below the lane");
        e.sel(c, 7, C(2, 7), 11, 7);
    }
    c += 1;

    // c: normalize and compute the output exponent = exbig + 1 - LZ
    e.shl(c, 6, 12, Ar(7), "normalized significand");
    if (n == 16) {
        e.shl(c, 11, 12, A(1));
        e.insi(c, 11, 1, 0, 1, "difference with the half bit appended");
        e.shl(c, 11, 11, Ar(7, -1));
        e.sel(c, 6, C(2, 7), 11, 6);
    }
    e.ksign(c, 10, 7, C(1, 0), "LZ - 1");
    e.cl(c, Unit::PC, QOpcode::AddCarry, 8, 8, 0, R(9), Rn(10), ci(1));
    e.cl(c + 1, Unit::SC, QOpcode::AddSum, 8, 12, 0, R(9), Rn(10), ci(1), 8);
    c += 2;

    e.shl(c, 5, 12, A(24));
    e.sar(c, 5, 5, A(24), "sign-extended exponent");
    int done = emit_pack_and_round(e, n, es, c, n == 8 ? 14 : 16, end_pads);
    e.sel(done - 1, 15, C(2, 6), 15, 0, "exact cancellation gives zero");
    return e.take(budget, {2, 3, 4, 5, 6}, {15});
}

// ---------------------------------------------------------------------------
// binary float arithmetic
// ---------------------------------------------------------------------------
// fp programs take the raw words in r0/r1 (field extraction is free, matching
// the zero decode-cycle rows of the cycle table). flags register r2:
//   b0 sa, b1 sb, b4 result sign, b5 effective subtract, b6 nonzero result,
//   b8 nan-in, b9 inf a, b10 inf b, b11 zero a, b12 zero b

// classify both operands and build effective exponents / significands:
//   r3 = ea' (max(ea,1)), r4 = ma, r5 = eb', r6 = mb. Uses one PC+SC compare
//   pair on cycle `c` for the max-exponent tests. r7/r8 scratch.
void emit_fp_classify(Emit& e, int eb, int m, int c) {
    int total = 1 + eb + m;
    std::uint32_t emax = (1u << eb) - 1;
    e.ext(c, 2, 0, total - 1, 1, "sa");
    e.ext(c, 7, 1, total - 1, 1);
    e.ins(c, 2, 7, 1, 1, "sb");
    e.ext(c, 3, 0, m, eb, "ea");
    e.ext(c, 4, 0, 0, m, "fa");
    e.ext(c, 5, 1, m, eb, "eb");
    e.ext(c, 6, 1, 0, m, "fb");
    e.movi(c, 8, emax);
    e.cl(c, Unit::PC, QOpcode::Comp, 8, 9, 0, R(3), R(8), {}, -1, "ea at max");
    e.cl(c, Unit::SC, QOpcode::Comp, 8, 10, 0, R(5), R(8), {}, -1, "eb at max");

    e.movi(c + 1, 8, 0);
    e.movi(c + 1, 11, 1);
    // nan/inf flags
    e.sel(c + 1, 12, C(4), 11, 8, "fa nonzero");
    e.sel(c + 1, 13, C(9, 7), 12, 8);
    e.sel(c + 1, 14, C(6), 11, 8, "fb nonzero");
    e.sel(c + 1, 7, C(10, 7), 14, 8);
    e.sel(c + 1, 13, C(13), 11, 7, "nan in");
    e.ins(c + 1, 2, 13, 8, 1);
    e.sel(c + 1, 13, C(12), 8, 11);
    e.sel(c + 1, 13, C(9, 7), 13, 8, "inf a");
    e.ins(c + 1, 2, 13, 9, 1);
    e.sel(c + 1, 13, C(14), 8, 11);
    e.sel(c + 1, 13, C(10, 7), 13, 8, "inf b");
    e.ins(c + 1, 2, 13, 10, 1);
    // zero flags
    e.sel(c + 1, 13, C(3), 8, 11);
    e.sel(c + 1, 13, C(4), 8, 13, "zero a");
    e.ins(c + 1, 2, 13, 11, 1);
    e.sel(c + 1, 13, C(5), 8, 11);
    e.sel(c + 1, 13, C(6), 8, 13, "zero b");
    e.ins(c + 1, 2, 13, 12, 1);
    // hidden bits and effective exponents
    e.sel(c + 1, 12, C(3), 11, 8);
    e.ins(c + 1, 4, 12, m, 1, "ma hidden");
    e.sel(c + 1, 12, C(5), 11, 8);
    e.ins(c + 1, 6, 12, m, 1, "mb hidden");
    e.sel(c + 1, 3, C(3), 3, 11, "ea' = max(ea,1)");
    e.sel(c + 1, 5, C(5), 5, 11, "eb'");
    // product sign (addition overwrites this at the swap)
    e.sel(c + 1, 13, C(2, 1), 8, 11);
    e.ext(c + 1, 14, 2, 1, 1);
    e.sel(c + 1, 13, C(2, 0), 13, 14, "sa ^ sb");
    e.ins(c + 1, 2, 13, 4, 1);
}

// final special-value selection into r15 (multiply rules)
void emit_fp_mul_specials(Emit& e, int eb, int m, int c, int packed_reg, int ovf_reg) {
    int total = 1 + eb + m;
    std::uint32_t expmask = ((1u << eb) - 1u) << m;
    std::uint32_t qnan = expmask | (1u << (m - 1));
    e.ext(c, 10, 2, 4, 1, "result sign");
    e.ins(c, packed_reg, 10, total - 1, 1);
    e.movi(c, 9, expmask);
    e.ins(c, 9, 10, total - 1, 1, "signed infinity");
    e.shl(c, 11, 10, A(total - 1), "signed zero");
    e.movi(c, 8, 0);
    e.movi(c, 7, 1);
    e.sel(c, 14, C(2, 11), 7, 8);
    e.sel(c, 14, C(2, 12), 7, 14, "any zero");
    e.sel(c, 13, C(2, 9), 7, 8);
    e.sel(c, 13, C(2, 10), 7, 13, "any inf");
    e.sel(c, 12, C(ovf_reg, 7), 9, packed_reg, "overflow to infinity");
    e.sel(c, 12, C(14), 11, 12, "zero operand");
    e.sel(c, 12, C(13), 9, 12, "infinity operand");
    e.sel(c, 10, C(14), 7, 8);
    e.sel(c, 10, C(13), 10, 8, "inf times zero");
    e.movi(c, 9, qnan);
    e.sel(c, 12, C(10), 9, 12);
    e.sel(c, 15, C(2, 8), 9, 12, "nan propagates");
}

// final special-value selection into r15 (addition rules)
void emit_fp_add_specials(Emit& e, int eb, int m, int c, int packed_reg, int ovf_reg) {
    int total = 1 + eb + m;
    std::uint32_t expmask = ((1u << eb) - 1u) << m;
    std::uint32_t qnan = expmask | (1u << (m - 1));
    e.movi(c, 8, 0);
    e.movi(c, 7, 1);
    e.movi(c, 9, expmask);
    e.ext(c, 10, 2, 4, 1, "result sign");
    e.ins(c, packed_reg, 10, total - 1, 1);
    e.mov(c, 11, 9);
    e.ins(c, 11, 10, total - 1, 1, "infinity with the result sign");
    e.sel(c, 12, C(ovf_reg, 7), 11, packed_reg, "overflow to infinity");
    // exact zero result: +0, except -0 when both inputs are -0
    e.sel(c, 14, C(2, 0), 7, 8);
    e.sel(c, 14, C(2, 1), 14, 8, "sa and sb");
    e.sel(c, 13, C(2, 11), 7, 8);
    e.sel(c, 13, C(2, 12), 13, 8, "both zero");
    e.sel(c, 14, C(13), 14, 8);
    e.shl(c, 14, 14, A(total - 1), "zero result pattern");
    e.sel(c, 12, C(2, 6), 12, 14, "cancellation gives zero");
    // infinities
    e.ext(c, 10, 2, 1, 1);
    e.mov(c, 11, 9);
    e.ins(c, 11, 10, total - 1, 1, "inf with b sign");
    e.sel(c, 12, C(2, 10), 11, 12);
    e.ext(c, 10, 2, 0, 1);
    e.mov(c, 11, 9);
    e.ins(c, 11, 10, total - 1, 1, "inf with a sign");
    e.sel(c, 12, C(2, 9), 11, 12);
    // opposite infinities are nan
    e.sel(c, 14, C(2, 0), 8, 7);
    e.sel(c, 14, C(2, 1), 14, 8);
    e.sel(c, 13, C(2, 0), 7, 8);
    e.sel(c, 13, C(2, 1), 8, 13);
    e.sel(c, 14, C(14), 7, 13, "signs differ");
    e.sel(c, 13, C(2, 9), 14, 8);
    e.sel(c, 13, C(2, 10), 13, 8, "opposite infinities");
    e.movi(c, 9, qnan);
    e.sel(c, 12, C(13), 9, 12);
    e.sel(c, 15, C(2, 8), 9, 12, "nan propagates");
}

MicroProgram build_fp_mul(int eb, int m, int budget, const std::string& fmt) {
    Emit e("mul_" + fmt, fmt, "mul");
    bool wide = m > 3;  // fp16 product spans three slices
    std::uint32_t emax = (1u << eb) - 1;

    emit_fp_classify(e, eb, m, 0);

    // significand multiply: msb-first shift-and-add over the full product
    // (subnormal operands need every low product bit)
    e.ext(1, 12, 6, m, 1);
    e.movi(1, 8, 0);
    e.sel(1, 11, C(12), 4, 8, "acc init from the top multiplier bit");
    int t = 2;
    for (int k = m - 1; k >= 0; --k) {
        e.shl(t, 12, 11, A(1), "acc << 1");
        e.ext(t, 10, 6, k, 1);
        e.movi(t, 8, 0);
        e.sel(t, 13, C(10), 4, 8, "partial product");
        if (!wide) {
            e.cl(t, Unit::PC, QOpcode::AddCarry, 8, 9, 0, R(12), R(13), ci(0));
            e.cl(t + 1, Unit::SC, QOpcode::AddSum, 8, 11, 0, R(12), R(13), ci(0), 9);
            t += 2;
        } else {
            e.cl(t, Unit::PC, QOpcode::AddCarry, 8, 9, 0, R(12), R(13), ci(0));
            e.cl(t + 1, Unit::SC, QOpcode::AddSum, 8, 11, 0, R(12), R(13), ci(0), 9);
            e.cl(t + 1, Unit::PC, QOpcode::AddCarry, 8, 10, 0, R(12, 1), R(13, 1),
                 cr(9, 7));
            e.cl(t + 2, Unit::SC, QOpcode::AddSum, 8, 11, 1, R(12, 1), R(13, 1), cr(9, 7),
                 10);
            e.cl(t + 2, Unit::PC, QOpcode::AddCarry, 6, 9, 0, R(12, 2), R(13, 2),
                 cr(10, 7));
            e.cl(t + 3, Unit::SC, QOpcode::AddSum, 6, 11, 2, R(12, 2), R(13, 2), cr(10, 7),
                 9);
            if (k > 0) {
                e.trfwr(t + 4, 14, 11, "stage the accumulator");
                e.trfrd(t + 5, 11, 14);
                t += 7;
            } else {
                t += 4;
            }
        }
    }
    int pdone = t;

    // exponent pair rides the multiply's idle cluster slots
    int e1c = wide ? 5 : 1;
    e.cl(e1c, Unit::PC, QOpcode::AddCarry, 8, 7, 0, R(3), R(5), ci(0), -1, "ea'+eb'");
    e.cl(e1c + 1, Unit::SC, QOpcode::AddSum, 8, 5, 0, R(3), R(5), ci(0), 7);

    int c = pdone;
    int hb = wide ? 21 : 7;  // hidden-bit position after normalization
    // leading zeros: coarse byte select (fp16 only), then one threshold window
    if (wide) {
        e.ext(c, 7, 11, 14, 8);
        e.ext(c, 8, 11, 6, 8);
        e.shl(c, 9, 11, A(8));
        e.shl(c, 10, 11, A(16));
        e.sel(c, 9, C(8), 9, 10, "middle byte empty: shift 16");
        e.sel(c, 9, C(7), 11, 9, "rough-normalized product");
        e.movi(c, 10, std::uint32_t((1 << (eb - 1)) - 2), "bias - 1");
        e.movi(c, 12, std::uint32_t((1 << (eb - 1)) - 2 + 8));
        e.movi(c, 13, std::uint32_t((1 << (eb - 1)) - 2 + 16));
        e.sel(c, 12, C(8), 12, 13);
        e.sel(c, 10, C(7), 10, 12, "bias - 1 + rough shift");
        e.mov(c, 11, 9);
    } else {
        e.movi(c, 10, std::uint32_t((1 << (eb - 1)) - 2), "bias - 1");
    }
    e.cl(c, Unit::PC, QOpcode::AddCarry, 8, 3, 0, R(5), Rn(10), ci(1));
    e.cl(c + 1, Unit::SC, QOpcode::AddSum, 8, 5, 0, R(5), Rn(10), ci(1), 3,
         "exponent net of bias and rough shift");
    e.inv(c, 4, 11, hb + 1, "~P");
    e.movi(c, 8, 0);
    e.shr(c, 7, 4, A(hb - 6));
    e.cl(c, Unit::SC, QOpcode::PositDecode, 7, 8, 0, R(7), {}, {}, -1,
         "leading-zero window");
    e.movi(c + 1, 7, 0x40);
    e.sel(c + 1, 12, C(8), 8, 7);
    e.lutl(c + 1, 12, 12);
    e.sel(c + 1, 7, C(8), 12, 8, "leading-zero count, empty window means none");
    e.shl(c + 1, 6, 11, Ar(7), "normalized product");
    // E* = e - LZ
    e.cl(c + 2, Unit::PC, QOpcode::AddCarry, 8, 9, 0, R(5), Rn(7), ci(1));
    e.cl(c + 3, Unit::SC, QOpcode::AddSum, 8, 5, 0, R(5), Rn(7), ci(1), 9);
    c += 4;

    // denormalize, extract fields, gather sticky
    e.shl(c, 5, 5, A(24));
    e.sar(c, 5, 5, A(24), "sign-extended exponent");
    e.shr(c, 4, 6, Air(1, 5), "denormalized significand");
    e.shl(c, 7, 6, Ar(5, 31), "bits dropped by the denormalizer");
    e.ext(c, 3, 4, hb - m, m, "fraction field");
    e.ext(c, 10, 4, hb - m - 1, 1, "guard");
    e.ext(c, 12, 4, hb - m, 1, "lsb");
    e.movi(c, 13, 0, "sticky");
    e.movi(c, 11, 1, "comparison unit");
    if (wide) e.ext(c, 14, 4, 0, 8);
    else e.ext(c, 14, 4, 0, hb - m - 1);
    e.cl(c, Unit::PC, QOpcode::Comp, 8, 8, 0, R(14), R(11), {}, -1, "sticky low");
    e.shr(c, 14, 7, A(24));
    e.cl(c, Unit::SC, QOpcode::Comp, 8, 9, 0, R(14), R(11), {}, -1, "denorm sticky hi");
    e.sel(c + 1, 13, C(8, 7), 1, 13);
    e.sel(c + 1, 13, C(9, 7), 1, 13);
    if (wide) {
        e.ext(c + 1, 14, 4, 8, 2);
        e.cl(c + 1, Unit::PC, QOpcode::Comp, 8, 8, 0, R(14), R(11), {}, -1, "sticky mid");
        e.shr(c + 1, 14, 7, A(16));
        e.ext(c + 1, 14, 14, 0, 8);
        e.cl(c + 1, Unit::SC, QOpcode::Comp, 8, 9, 0, R(14), R(11), {}, -1,
             "denorm sticky mid");
        e.sel(c + 2, 13, C(8, 7), 1, 13);
        e.sel(c + 2, 13, C(9, 7), 1, 13);
        e.shr(c + 2, 14, 7, A(10));
        e.ext(c + 2, 14, 14, 0, 6);
        e.cl(c + 2, Unit::PC, QOpcode::Comp, 8, 8, 0, R(14), R(11), {}, -1,
             "denorm sticky low");
        e.sel(c + 3, 13, C(8, 7), 1, 13);
        c += 2;
    }
    // overflow test and the packed field
    e.movi(c + 1, 6, 0, "zero");
    e.movi(c + 1, 14, emax);
    e.cl(c + 1, Unit::SC, QOpcode::Comp, 8, 9, 0, R(5), R(14), {}, -1, "E* >= emax");
    e.ext(c + 1, 14, 5, 31, 1);
    e.sel(c + 1, 7, C(14), 6, 5, "exponent field floor");
    e.sel(c + 1, 7, C(5), 7, 6, "zero exponent stays zero");
    e.ins(c + 1, 3, 7, m, eb, "packed exponent|fraction");
    e.sel(c + 2, 12, C(13), 11, 12, "sticky | lsb");
    e.sel(c + 2, 12, C(10), 12, 6, "round increment");
    e.ext(c + 2, 14, 5, 31, 1);
    e.sel(c + 2, 5, C(14), 6, 9, "negative exponent never overflows");
    e.movi(c + 2, 11, 0);
    e.cl(c + 2, Unit::PC, QOpcode::AddCarry, 8, 8, 0, R(3), R(11), cr(12, 0));
    e.cl(c + 3, Unit::SC, QOpcode::AddSum, 8, 4, 0, R(3), R(11), cr(12, 0), 8);
    if (1 + eb + m > 8) {
        e.cl(c + 3, Unit::PC, QOpcode::AddCarry, 8, 7, 0, R(3, 1), R(11, 1), cr(8, 7));
        e.cl(c + 4, Unit::SC, QOpcode::AddSum, 8, 4, 1, R(3, 1), R(11, 1), cr(8, 7), 7);
        c += 1;
    }
    c += 4;
    emit_fp_mul_specials(e, eb, m, c, 4, 5);
    c += 1;
    for (bool wr = true; c < budget; ++c, wr = !wr) {
        if (wr) e.trfwr(c, 14, 15, "write-back stage");
        else e.trfrd(c, 15, 14);
    }
    return e.take(budget, {0, 1}, {15});
}


// ---------------------------------------------------------------------------
// registry
// ---------------------------------------------------------------------------

std::map<std::pair<std::string, std::string>, MicroProgram> build_all();

const std::map<std::pair<std::string, std::string>, MicroProgram>& registry() {
    static const auto programs = build_all();
    return programs;
}

std::map<std::pair<std::string, std::string>, MicroProgram> build_all() {
    std::map<std::pair<std::string, std::string>, MicroProgram> m;
    auto add = [&](MicroProgram p) {
        m[{p.format, p.operation}] = std::move(p);
    };

    for (int es : {0, 2}) {
        add(build_decode_p8(es));
        add(build_decode2_p8(es));
        add(build_decode_p16(es));
        add(build_decode2_p16(es));
    }
    add(build_posit_mul(8, 0, 17));
    add(build_posit_mul(8, 2, 19));
    add(build_posit_mul(16, 2, 29));
    add(build_posit_mul(16, 0, 40));
    add(build_posit_add(8, 0, 21, 4));
    add(build_posit_add(8, 2, 23, 6));
    add(build_posit_add(16, 0, 23, 4));
    add(build_posit_add(16, 2, 25, 6));
    add(build_fp_mul(4, 3, 18, "fp8"));
    add(build_fp_mul(5, 10, 87, "fp16"));

    add(build_int_add(4));
    add(build_int_add(8));
    add(build_int_add(16));
    add(build_int_mul(4, 13));
    add(build_int_mul(8, 28));
    add(build_int_mul(16, 105));
    for (int w : {4, 8, 16}) {
        for (TaluOp op : {TaluOp::And, TaluOp::Or, TaluOp::Not, TaluOp::Xor, TaluOp::Comp})
            add(build_int_logic(w, op));
    }
    return m;
}

}  // namespace

const MicroProgram* find_program(const std::string& format, const std::string& operation) {
    auto it = registry().find({format, operation});
    return it == registry().end() ? nullptr : &it->second;
}

const MicroProgram& get_program(const std::string& format, const std::string& operation) {
    const MicroProgram* p = find_program(format, operation);
    if (!p)
        throw std::invalid_argument("unsupported (operation, format) pair: " + operation +
                                    " on " + format);
    return *p;
}

std::vector<const MicroProgram*> all_programs() {
    std::vector<const MicroProgram*> out;
    for (const auto& [k, v] : registry()) out.push_back(&v);
    return out;
}

const std::vector<CycleBudget>& table3_budgets() {
    static const std::vector<CycleBudget> t = {
        {"p8e0", 2, 17, 21},  {"p8e2", 2, 19, 23},   {"p16e0", 6, 25, 23},
        {"p16e2", 6, 29, 25}, {"fp8", 0, 18, 8},     {"fp16", 0, 87, 10},
        {"int4", 0, 13, 2},   {"int8", 0, 28, 2},    {"int16", 0, 105, 4},
    };
    return t;
}

const std::vector<BudgetWaiver>& budget_waivers() {
    static const std::vector<BudgetWaiver> w = {
        {"p16e0", "mul", 25, 40,
         "The 16-bit P(16,0) significand lane (hidden bit + 15 fraction bits) "
         "drives radix-4 partial sums to 18 bits, one bit beyond what two "
         "8-slot carry-lookahead slices plus the carry rail can cover, so "
         "every accumulation step needs a third slice and the dependent chain "
         "runs at a 4-cycle period (7 digits = 28 cycles before the encode "
         "tail). P(16,2) fits its 29-cycle budget only because the 14-bit "
         "lane keeps sums within two slices. No schedule on this datapath "
         "was found at 25 cycles; the shipped schedule is the fastest found."},
    };
    return w;
}

}  // namespace talu
