#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace talu {

// Generalized threshold predicate (the single primitive every TALU operation
// is built from):
//
//   Q(p, Z0, X, Z1, Y) = [ Z0 + sum 2^j X_j  >=  Z1 + sum 2^j Y_j ]
struct QArgs {
    int p = 8;
    std::uint32_t z0 = 0;
    std::uint32_t x = 0;
    std::uint32_t z1 = 0;
    std::uint32_t y = 0;
};

int eval_q(const QArgs& args);

enum class QOpcode {
    And,
    Or,
    Not,
    Comp,
    AddCarry,   // ADD step 1, carry-lookahead
    XorStep1,   // produces AND_i
    PositDecode,
    AddSum,     // ADD step 2
    XorStep2,
};

enum class Cluster { PC, SC };

// Which table a row is defined in: Table I rows live in the primary cluster,
// Table II rows in the secondary.
Cluster opcode_home_cluster(QOpcode op);

const char* qopcode_name(QOpcode op);
QOpcode qopcode_from_name(const std::string& name);

// Inputs feeding the argument construction of one slot.
struct MapContext {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    int carry_in = 0;         // C0 (ADD_CARRY / ADD_SUM slot 0)
    std::uint32_t carries = 0; // C1..Cp vector (bit i = C_{i+1}); ADD_SUM only
    std::uint32_t and_bits = 0; // AND_i vector; XOR_STEP2 only
};

// Argument construction exactly per the Table I / Table II rows, including the
// zero-extension rules. Throws on a bad slot index.
QArgs map_operation(QOpcode op, int p, int slot, const MapContext& ctx);

// Posit-decode threshold constant for slot i: 2^(p-1) - 1 - (2^i - 1).
std::uint32_t posit_decode_threshold(int p, int slot);

// One cluster issue: up to 8 slots evaluated in a single simulated cycle.
struct ClusterRequest {
    int p = 8;
    QOpcode op = QOpcode::And;
    MapContext ctx;
    std::uint8_t enabled = 0xFF;
};

struct ClusterResult {
    std::uint8_t bits = 0;   // slot i result at bit i; disabled slots are 0
    std::uint8_t valid = 0;  // copy of the enabled mask
};

ClusterResult eval_cluster(const ClusterRequest& req);

}  // namespace talu
