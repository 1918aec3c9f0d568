#include <doctest.h>

#include <random>
#include <variant>

#include "talu/programs.hpp"
#include "talu/talu.hpp"

using namespace talu;

namespace {

DecodeResult ref_decode(std::uint32_t bits, PositConfig c) {
    return decode_reference(PositWord(bits, c));
}

}  // namespace

TEST_CASE("TALU decode equals the reference decoder exhaustively, 8 bit") {
    for (int es : {0, 2}) {
        PositConfig cfg(8, es);
        TaluState s;
        for (std::uint32_t b = 0; b < 256; ++b) {
            DecodeOut got = decode_posit_on_talu(s, PositWord(b, cfg));
            CHECK(got.cycles == 2);
            DecodeResult want = ref_decode(b, cfg);
            REQUIRE(got.fields.index() == want.index());
            if (std::holds_alternative<PositFields>(want))
                CHECK(std::get<PositFields>(got.fields) == std::get<PositFields>(want));
        }
    }
}

TEST_CASE("TALU decode equals the reference decoder exhaustively, 16 bit") {
    for (int es : {0, 2}) {
        PositConfig cfg(16, es);
        TaluState s;
        for (std::uint32_t b = 0; b < 65536; ++b) {
            DecodeOut got = decode_posit_on_talu(s, PositWord(b, cfg));
            CHECK(got.cycles == 6);
            DecodeResult want = ref_decode(b, cfg);
            REQUIRE(got.fields.index() == want.index());
            if (std::holds_alternative<PositFields>(want)) {
                if (!(std::get<PositFields>(got.fields) == std::get<PositFields>(want))) {
                    CAPTURE(b);
                    CHECK(std::get<PositFields>(got.fields) == std::get<PositFields>(want));
                    return;
                }
            }
        }
    }
}

TEST_CASE("paper decode example runs in two cycles with the right fields") {
    TaluState s;
    DecodeOut out = decode_posit_on_talu(s, PositWord(0x74, PositConfig(8, 2)));
    CHECK(out.cycles == 2);
    auto f = std::get<PositFields>(out.fields);
    CHECK(f.regime_value == 2);
    CHECK(f.exponent == 2);
    CHECK(f.fraction == 0);
    CHECK(s.cycle_counter == 2);
}

TEST_CASE("datapath helpers") {
    TaluState s;
    SUBCASE("lut_lookup maps popcount to K and rejects empty vectors") {
        CHECK(lut_lookup(s, 0b1110000) == 2);
        CHECK(lut_lookup(s, 0b1111111) == 6);
        CHECK(lut_lookup(s, 0b0000001) == 0);
        CHECK_THROWS_AS(lut_lookup(s, 0), ProgramError);
    }
    SUBCASE("shifter_extract splits E and F") {
        ShiftOut so = shifter_extract(s, 0x74, 8, 3, 2);
        CHECK(so.exponent == 2);
        CHECK(so.fraction == 0);
        so = shifter_extract(s, 0x08, 8, 3, 2);
        CHECK(so.exponent == 0);
        CHECK(so.fraction == 0);
        so = shifter_extract(s, 0x7F, 8, 7, 2);  // maximal regime
        CHECK(so.exponent == 0);
        CHECK(so.fraction == 0);
    }
    SUBCASE("combiner_merge resolves the regime across halves") {
        CHECK(combiner_merge(s, 0b0000001, 0, 0) == 1);
        CHECK(combiner_merge(s, 0b1110000, 0x7F, 1) == 3);
        CHECK(combiner_merge(s, 0x7F, 0, 0) == 7);   // run stops at the boundary bit
        CHECK(combiner_merge(s, 0x7F, 0, 1) == 8);   // run stops right after it
        CHECK(combiner_merge(s, 0x7F, 0x7F, 1) == 15);
        // exhaustive against a direct run scan
        for (std::uint32_t t = 0; t < 32768; ++t) {
            int run = 0;
            for (int i = 14; i >= 0 && ((t >> i) & 1); --i) ++run;
            if (run == 0) continue;  // T guarantee: leading bit set
            std::uint32_t vh = 0, vl = 0;
            for (int i = 0; i < 7; ++i) {
                if (eval_q(map_operation(QOpcode::PositDecode, 8, i, {(t >> 8) & 0x7F})))
                    vh |= 1u << i;
                if (eval_q(map_operation(QOpcode::PositDecode, 8, i, {t & 0x7F})))
                    vl |= 1u << i;
            }
            CHECK(combiner_merge(s, vh, vl, int(t >> 7) & 1) == run);
        }
    }
    SUBCASE("trf read/write and RW flag") {
        trf_write(s, 1, 0x74);
        CHECK(s.rw == 0);
        CHECK(trf_read(s, 1) == 0x74);
        CHECK(s.rw == 1);
        CHECK(trf_read(s, 2) == 0);  // registers initialize to zero
        CHECK_THROWS_AS(trf_read(s, 16), ProgramError);
        CHECK_THROWS_AS(trf_write(s, -1, 0), ProgramError);
    }
}

TEST_CASE("INT ops execute with Table III cycle counts and wrap semantics") {
    TaluState s;
    Format i8 = parse_format("int8");
    SUBCASE("add") {
        ExecOut r = exec_op(s, TaluOp::Add, i8, 100, 100);
        CHECK(r.bits == ((100 + 100) & 0xFF));
        CHECK(r.op_cycles == 2);
        CHECK(r.decode_cycles == 0);
    }
    SUBCASE("exhaustive int4/int8 add and mul against the reference") {
        for (auto [w, mulcyc, addcyc] : {std::tuple{4, 13, 2}, std::tuple{8, 28, 2}}) {
            Format f = parse_format("int" + std::to_string(w));
            IntDescriptor d(w);
            std::uint32_t lim = 1u << w;
            for (std::uint32_t a = 0; a < lim; ++a)
                for (std::uint32_t b = 0; b < lim; ++b) {
                    ExecOut sum = exec_op(s, TaluOp::Add, f, a, b);
                    ExecOut prod = exec_op(s, TaluOp::Mul, f, a, b);
                    CHECK(sum.bits == int_add(a, b, d));
                    CHECK(prod.bits == int_mul(a, b, d));
                    CHECK(sum.op_cycles == addcyc);
                    CHECK(prod.op_cycles == mulcyc);
                }
        }
    }
    SUBCASE("sampled int16") {
        Format f = parse_format("int16");
        IntDescriptor d(16);
        std::mt19937 rng(99);
        for (int t = 0; t < 20000; ++t) {
            std::uint32_t a = rng() & 0xFFFF, b = rng() & 0xFFFF;
            ExecOut sum = exec_op(s, TaluOp::Add, f, a, b);
            ExecOut prod = exec_op(s, TaluOp::Mul, f, a, b);
            CHECK(sum.bits == int_add(a, b, d));
            CHECK(prod.bits == int_mul(a, b, d));
            CHECK(sum.op_cycles == 4);
            CHECK(prod.op_cycles == 105);
        }
    }
    SUBCASE("logic ops, single cycle, exhaustive int8") {
        for (std::uint32_t a = 0; a < 256; ++a)
            for (std::uint32_t b = 0; b < 256; ++b) {
                CHECK(exec_op(s, TaluOp::And, i8, a, b).bits == (a & b));
                CHECK(exec_op(s, TaluOp::Or, i8, a, b).bits == (a | b));
                CHECK(exec_op(s, TaluOp::Xor, i8, a, b).bits == (a ^ b));
                CHECK(exec_op(s, TaluOp::Not, i8, a, b).bits == (~a & 0xFF));
                CHECK(exec_op(s, TaluOp::Comp, i8, a, b).bits == (a >= b ? 1 : 0));
            }
        CHECK(exec_op(s, TaluOp::And, i8, 0xF0, 0xCC).op_cycles == 1);
        CHECK(exec_op(s, TaluOp::Xor, i8, 1, 2).op_cycles == 2);
    }
    SUBCASE("int16 logic") {
        Format f = parse_format("int16");
        std::mt19937 rng(7);
        for (int t = 0; t < 5000; ++t) {
            std::uint32_t a = rng() & 0xFFFF, b = rng() & 0xFFFF;
            CHECK(exec_op(s, TaluOp::And, f, a, b).bits == (a & b));
            CHECK(exec_op(s, TaluOp::Or, f, a, b).bits == (a | b));
            CHECK(exec_op(s, TaluOp::Xor, f, a, b).bits == (a ^ b));
            CHECK(exec_op(s, TaluOp::Not, f, a, b).bits == (~a & 0xFFFF));
            CHECK(exec_op(s, TaluOp::Comp, f, a, b).bits == (a >= b ? 1 : 0));
        }
    }
}

TEST_CASE("unsupported pairs and widths error out") {
    TaluState s;
    CHECK_THROWS_AS((void)exec_op(s, TaluOp::Mul, parse_format("p32e2"), 1, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)decode_posit_on_talu(s, PositWord(0, PositConfig(32, 2))),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)exec_op(s, TaluOp::And, parse_format("fp16"), 1, 2),
                    std::invalid_argument);
}

TEST_CASE("micro-program text format round-trips and validates") {
    const MicroProgram& p = get_program("int8", "mul");
    std::string text = serialize_program(p);
    MicroProgram q = parse_program(text);
    validate_program(q);
    CHECK(q.name == p.name);
    CHECK(q.declared_cycles == p.declared_cycles);
    CHECK(q.ops.size() == p.ops.size());
    CHECK(serialize_program(q) == text);

    // execution through the parsed copy gives identical results
    TaluState s1, s2;
    trf_write(s1, 0, 0x39);
    trf_write(s1, 1, 0xA7);
    trf_write(s2, 0, 0x39);
    trf_write(s2, 1, 0xA7);
    run_microprogram(s1, p);
    run_microprogram(s2, q);
    CHECK(s1.trf == s2.trf);
}

TEST_CASE("validator rejects structural violations") {
    MicroProgram p;
    p.name = "bad";
    p.declared_cycles = 1;
    p.inputs = {0, 1};
    p.outputs = {2};
    MicroOp a;
    a.unit = Unit::PC;
    a.qop = QOpcode::And;
    a.dst = 2;
    a.a = {0, 0, false};
    a.b = {1, 0, false};

    SUBCASE("two PC issues in one cycle") {
        p.ops = {a, a};
        CHECK_THROWS_AS(validate_program(p), ProgramError);
    }
    SUBCASE("same-cycle consumption of a cluster result") {
        MicroOp b = a;
        b.unit = Unit::SC;
        b.a = {2, 0, false};
        b.dst = 3;
        p.ops = {a, b};
        p.outputs = {3};
        CHECK_THROWS_AS(validate_program(p), ProgramError);
    }
    SUBCASE("step 2 must follow its step 1") {
        MicroOp sum;
        sum.unit = Unit::SC;
        sum.qop = QOpcode::AddSum;
        sum.dst = 3;
        sum.a = {0, 0, false};
        sum.b = {1, 0, false};
        sum.aux = 2;
        sum.cycle = 0;  // same cycle as the carry op: illegal
        p.ops = {a, sum};
        p.outputs = {3};
        CHECK_THROWS_AS(validate_program(p), ProgramError);
    }
    SUBCASE("read of unwritten register") {
        MicroOp b = a;
        b.a = {5, 0, false};
        p.ops = {b};
        CHECK_THROWS_AS(validate_program(p), ProgramError);
    }
}

TEST_CASE("trace emits one CSV row per op") {
    TaluState s;
    std::vector<TraceRow> rows;
    s.trace = &rows;
    exec_op(s, TaluOp::Add, parse_format("int8"), 3, 4);
    CHECK(rows.size() == get_program("int8", "add").ops.size());
    std::string csv = trace_to_csv(rows);
    CHECK(csv.find("cycle,cluster,opcode") == 0);
    CHECK(csv.find("ADD_CARRY") != std::string::npos);
}
