#include "talu/qfunc.hpp"

namespace talu {

namespace {
std::uint32_t low_bits(std::uint32_t v, int k) {
    return k >= 32 ? v : v & ((1u << k) - 1u);
}
std::uint32_t bit(std::uint32_t v, int i) { return (v >> i) & 1u; }
}  // namespace

int eval_q(const QArgs& args) {
    if (args.p < 1 || args.p > 8) throw std::invalid_argument("q-function slice width");
    std::uint32_t lim = 1u << args.p;
    if (args.x >= lim || args.y >= lim) throw std::invalid_argument("q-function vector width");
    if (args.z0 > lim || args.z1 > lim) throw std::invalid_argument("q-function scalar range");
    return (args.z0 + args.x >= args.z1 + args.y) ? 1 : 0;
}

Cluster opcode_home_cluster(QOpcode op) {
    switch (op) {
        case QOpcode::AddSum:
        case QOpcode::XorStep2:
            return Cluster::SC;
        default:
            return Cluster::PC;
    }
}

const char* qopcode_name(QOpcode op) {
    switch (op) {
        case QOpcode::And: return "AND";
        case QOpcode::Or: return "OR";
        case QOpcode::Not: return "NOT";
        case QOpcode::Comp: return "COMP";
        case QOpcode::AddCarry: return "ADD_CARRY";
        case QOpcode::XorStep1: return "XOR_STEP1";
        case QOpcode::PositDecode: return "POSIT_DECODE";
        case QOpcode::AddSum: return "ADD_SUM";
        case QOpcode::XorStep2: return "XOR_STEP2";
    }
    return "?";
}

QOpcode qopcode_from_name(const std::string& name) {
    for (QOpcode op : {QOpcode::And, QOpcode::Or, QOpcode::Not, QOpcode::Comp,
                       QOpcode::AddCarry, QOpcode::XorStep1, QOpcode::PositDecode,
                       QOpcode::AddSum, QOpcode::XorStep2}) {
        if (name == qopcode_name(op)) return op;
    }
    throw std::invalid_argument("unknown q-function opcode: " + name);
}

std::uint32_t posit_decode_threshold(int p, int slot) {
    return (1u << (p - 1)) - 1u - ((1u << slot) - 1u);
}

QArgs map_operation(QOpcode op, int p, int slot, const MapContext& ctx) {
    if (p < 1 || p > 8) throw std::invalid_argument("slice width out of range");
    if (slot < 0 || slot >= p) throw std::out_of_range("slot index out of range");
    QArgs q;
    q.p = p;
    switch (op) {
        case QOpcode::And:
        case QOpcode::XorStep1:
            q = {p, 0, bit(ctx.a, slot), 1, std::uint32_t(1u - bit(ctx.b, slot))};
            break;
        case QOpcode::Or:
            q = {p, 0, bit(ctx.a, slot), 0, std::uint32_t(1u - bit(ctx.b, slot))};
            break;
        case QOpcode::Not:
            q = {p, 0, std::uint32_t(1u - bit(ctx.b, slot)), 1, 0};
            break;
        case QOpcode::Comp:
            q = {p, 0, low_bits(ctx.a, slot + 1), 0, low_bits(ctx.b, slot + 1)};
            break;
        case QOpcode::AddCarry:
            q = {p, std::uint32_t(ctx.carry_in & 1), low_bits(ctx.a, slot + 1), 1,
                 low_bits(~ctx.b, slot + 1)};
            break;
        case QOpcode::PositDecode:
            q = {p, 0, low_bits(ctx.a, p - 1), 0, posit_decode_threshold(p, slot)};
            break;
        case QOpcode::AddSum: {
            std::uint32_t c_ext = (ctx.carries << 1) | std::uint32_t(ctx.carry_in & 1);
            std::uint32_t ci = bit(c_ext, slot), cn = bit(c_ext, slot + 1);
            q = {p, bit(ctx.a, slot), bit(ctx.b, slot), 0, (cn << 1) | (1u - ci)};
            break;
        }
        case QOpcode::XorStep2:
            q = {p, bit(ctx.a, slot), bit(ctx.b, slot), 1, bit(ctx.and_bits, slot) << 1};
            break;
    }
    return q;
}

ClusterResult eval_cluster(const ClusterRequest& req) {
    ClusterResult r;
    r.valid = req.enabled;
    for (int i = 0; i < req.p; ++i) {
        if (!((req.enabled >> i) & 1)) continue;
        if (eval_q(map_operation(req.op, req.p, i, req.ctx)))
            r.bits |= std::uint8_t(1u << i);
    }
    return r;
}

}  // namespace talu
