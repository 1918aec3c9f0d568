#include <doctest.h>

#include <bit>
#include <cstdint>

#include "talu/qfunc.hpp"

using namespace talu;

namespace {

// assemble a full-width result from per-slot evaluations
std::uint32_t run_slots(QOpcode op, int p, const MapContext& ctx, int slots) {
    std::uint32_t out = 0;
    for (int i = 0; i < slots; ++i)
        out |= std::uint32_t(eval_q(map_operation(op, p, i, ctx))) << i;
    return out;
}

// brute-force leading-run scan: length of the run of ones at the top of the
// 7-bit window t[6:0]
int leading_ones_run7(std::uint32_t t) {
    int run = 0;
    for (int i = 6; i >= 0 && ((t >> i) & 1); --i) ++run;
    return run;
}

}  // namespace

TEST_CASE("eval_q spec examples") {
    CHECK(eval_q({8, 0, 0, 0, 0}) == 1);            // 0 >= 0
    CHECK(eval_q({8, 0, 1, 1, 1}) == 0);            // AND row with A_i=1, B_i=0
    CHECK(eval_q({8, 0, 116, 0, 112}) == 1);        // posit decode, i=4, T=116
    CHECK(posit_decode_threshold(8, 4) == 112);
    CHECK_THROWS_AS(eval_q({8, 0, 256, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS((void)map_operation(QOpcode::And, 8, 9, {}), std::out_of_range);
}

TEST_CASE("logic mappings reproduce AND/OR/NOT/unsigned-compare exhaustively") {
    for (std::uint32_t a = 0; a < 256; ++a) {
        for (std::uint32_t b = 0; b < 256; ++b) {
            MapContext ctx{a, b, 0, 0, 0};
            CHECK(run_slots(QOpcode::And, 8, ctx, 8) == (a & b));
            CHECK(run_slots(QOpcode::Or, 8, ctx, 8) == (a | b));
            CHECK(run_slots(QOpcode::Not, 8, ctx, 8) == (~b & 0xFF));
            // COMP slot i compares the low i+1 bits
            for (int i = 0; i < 8; ++i) {
                std::uint32_t ai = a & ((1u << (i + 1)) - 1), bi = b & ((1u << (i + 1)) - 1);
                CHECK(eval_q(map_operation(QOpcode::Comp, 8, i, ctx)) == (ai >= bi ? 1 : 0));
            }
        }
    }
}

TEST_CASE("two-step ADD reproduces full-width addition with carry, exhaustively") {
    for (std::uint32_t a = 0; a < 256; ++a) {
        for (std::uint32_t b = 0; b < 256; ++b) {
            for (int c0 = 0; c0 <= 1; ++c0) {
                MapContext step1{a, b, c0, 0, 0};
                std::uint32_t carries = run_slots(QOpcode::AddCarry, 8, step1, 8);
                MapContext step2{a, b, c0, carries, 0};
                std::uint32_t sum = run_slots(QOpcode::AddSum, 8, step2, 8);
                std::uint32_t ref = a + b + std::uint32_t(c0);
                CHECK(sum == (ref & 0xFF));
                CHECK(((carries >> 7) & 1) == (ref >> 8));  // carry-out
            }
        }
    }
}

TEST_CASE("two-step XOR reproduces bitwise xor, exhaustively") {
    for (std::uint32_t a = 0; a < 256; ++a) {
        for (std::uint32_t b = 0; b < 256; ++b) {
            MapContext step1{a, b, 0, 0, 0};
            std::uint32_t and_bits = run_slots(QOpcode::XorStep1, 8, step1, 8);
            CHECK(and_bits == (a & b));
            MapContext step2{a, b, 0, 0, and_bits};
            CHECK(run_slots(QOpcode::XorStep2, 8, step2, 8) == (a ^ b));
        }
    }
}

TEST_CASE("posit-decode slots form a thermometer code counting the leading run") {
    for (std::uint32_t t = 0; t < 256; ++t) {
        MapContext ctx{t, 0, 0, 0, 0};
        std::uint32_t v = run_slots(QOpcode::PositDecode, 8, ctx, 7);
        int run = leading_ones_run7(t);
        CHECK(int(std::popcount(v)) == run);
        // thermometer: V_i = 1 exactly for the `run` highest-threshold slots
        std::uint32_t expect = run == 0 ? 0 : (((1u << run) - 1) << (7 - run));
        CHECK(v == expect);
    }
}

TEST_CASE("cluster evaluation") {
    SUBCASE("bitwise AND across all slots") {
        ClusterRequest req;
        req.op = QOpcode::And;
        req.ctx = {0xF0, 0xCC, 0, 0, 0};
        CHECK(eval_cluster(req).bits == 0xC0);
    }
    SUBCASE("disabled mask produces no output bits") {
        ClusterRequest req;
        req.op = QOpcode::Or;
        req.ctx = {0xFF, 0xFF, 0, 0, 0};
        req.enabled = 0;
        ClusterResult r = eval_cluster(req);
        CHECK(r.bits == 0);
        CHECK(r.valid == 0);
    }
    SUBCASE("seven posit-decode slots on T from P=01110100") {
        ClusterRequest req;
        req.op = QOpcode::PositDecode;
        req.ctx = {0x74, 0, 0, 0, 0};
        req.enabled = 0x7F;
        ClusterResult r = eval_cluster(req);
        CHECK(r.bits == 0b1110000);
        CHECK(std::popcount(std::uint32_t(r.bits)) == 3);
    }
}

TEST_CASE("home cluster registry matches the two tables") {
    CHECK(opcode_home_cluster(QOpcode::And) == Cluster::PC);
    CHECK(opcode_home_cluster(QOpcode::PositDecode) == Cluster::PC);
    CHECK(opcode_home_cluster(QOpcode::AddCarry) == Cluster::PC);
    CHECK(opcode_home_cluster(QOpcode::AddSum) == Cluster::SC);
    CHECK(opcode_home_cluster(QOpcode::XorStep2) == Cluster::SC);
    CHECK(qopcode_from_name("POSIT_DECODE") == QOpcode::PositDecode);
    CHECK_THROWS(qopcode_from_name("FMA"));
}
