#include "talu/microprogram.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <sstream>

namespace talu {

namespace {

const std::map<std::string, SOp>& sop_names() {
    static const std::map<std::string, SOp> m = {
        {"MOVI", SOp::Movi},       {"MOV", SOp::Mov},
        {"SHL", SOp::Shl},         {"SHR", SOp::Shr},
        {"SAR", SOp::Sar},         {"EXTRACT", SOp::Extract},
        {"INSERT", SOp::Insert},   {"INSERTI", SOp::Inserti},
        {"SEL", SOp::Sel},         {"TSEL", SOp::Tsel},
        {"NEGSEL", SOp::Negsel},   {"LUTK", SOp::LutK},
        {"LUTL", SOp::LutL},       {"CMB", SOp::Cmb},
        {"KSIGN", SOp::Ksign},     {"KMAG", SOp::Kmag},
        {"TRFREAD", SOp::TrfRead}, {"TRFWRITE", SOp::TrfWrite},
    };
    return m;
}

std::string sop_name(SOp s) {
    for (const auto& [k, v] : sop_names())
        if (v == s) return k;
    return "?";
}

std::string unit_name(Unit u) {
    switch (u) {
        case Unit::PC: return "PC";
        case Unit::SC: return "SC";
        case Unit::BOTH: return "BOTH";
        case Unit::STRUCT: return "STRUCT";
    }
    return "?";
}

int parse_reg(const std::string& s) {
    if (s.size() < 2 || s[0] != 'r') throw ProgramError("bad register: " + s);
    int r = std::stoi(s.substr(1));
    if (r < 0 || r > 15) throw ProgramError("register out of range: " + s);
    return r;
}

Operand parse_operand(std::string s) {
    Operand o;
    if (!s.empty() && s[0] == '~') {
        o.invert = true;
        s = s.substr(1);
    }
    auto at = s.find('@');
    if (at != std::string::npos) {
        o.lane = std::stoi(s.substr(at + 1));
        if (o.lane < 0 || o.lane > 3) throw ProgramError("bad lane: " + s);
        s = s.substr(0, at);
    }
    o.reg = parse_reg(s);
    return o;
}

std::string operand_str(const Operand& o) {
    std::string s = o.invert ? "~" : "";
    s += "r" + std::to_string(o.reg);
    if (o.lane) s += "@" + std::to_string(o.lane);
    return s;
}

CondSpec parse_cond(const std::string& s) {
    CondSpec c;
    auto dot = s.find(".b");
    if (dot != std::string::npos) {
        c.reg = parse_reg(s.substr(0, dot));
        c.bit = std::stoi(s.substr(dot + 2));
    } else {
        c.reg = parse_reg(s);
        c.bit = -1;
    }
    return c;
}

std::string cond_str(const CondSpec& c) {
    std::string s = "r" + std::to_string(c.reg);
    if (c.bit >= 0) s += ".b" + std::to_string(c.bit);
    return s;
}

std::uint32_t parse_imm(const std::string& s) {
    return std::uint32_t(std::stoul(s, nullptr, 0));
}

}  // namespace

int MicroProgram::measured_cycles() const {
    int mx = -1;
    for (const auto& op : ops) mx = std::max(mx, op.cycle);
    return mx + 1;
}

std::vector<int> op_reads(const MicroOp& op) {
    std::vector<int> r;
    if (op.unit != Unit::STRUCT) {
        r.push_back(op.a.reg);
        switch (op.qop) {
            case QOpcode::Not:
            case QOpcode::PositDecode:
                break;  // single-operand rows
            default:
                r.push_back(op.b.reg);
        }
        if (op.aux >= 0) r.push_back(op.aux);
        if (op.cin.kind == CinSpec::RegBit) r.push_back(op.cin.reg);
        return r;
    }
    switch (op.sop) {
        case SOp::Movi:
            break;
        case SOp::Inserti:
            r.push_back(op.dst);  // read-modify-write
            break;
        case SOp::Insert:
            r.push_back(op.dst);
            r.push_back(op.src);
            break;
        case SOp::Sel:
            r.push_back(op.cond.reg);
            r.push_back(op.src);
            r.push_back(op.src2);
            break;
        case SOp::Ksign:
            r.push_back(op.cond.reg);
            r.push_back(op.src);
            break;
        case SOp::Cmb:
            r.push_back(op.src);
            r.push_back(op.src2);
            r.push_back(op.src3);
            r.push_back(op.src4);
            break;
        case SOp::Shl:
        case SOp::Shr:
        case SOp::Sar:
            r.push_back(op.src);
            if (op.amt.kind == AmtSpec::Reg || op.amt.kind == AmtSpec::RegPlusImm ||
                op.amt.kind == AmtSpec::ImmMinusReg)
                r.push_back(op.amt.reg);
            break;
        default:
            r.push_back(op.src);
    }
    return r;
}

std::vector<int> op_writes(const MicroOp& op) { return {op.dst}; }

void validate_program(const MicroProgram& prog) {
    auto fail = [&](const std::string& msg, const MicroOp* op = nullptr) {
        std::string where = prog.name;
        if (op) where += " cycle " + std::to_string(op->cycle);
        throw ProgramError(where + ": " + msg);
    };

    // registers already written, with the cycle and unit of the last write
    struct LastWrite {
        int cycle = -1;
        Unit unit = Unit::STRUCT;
        QOpcode qop = QOpcode::And;
        bool ever = false;
    };
    std::array<LastWrite, 16> last{};
    for (int r : prog.inputs) {
        if (r < 0 || r > 15) fail("input register out of range");
        last[std::size_t(r)] = {-1, Unit::STRUCT, QOpcode::And, true};
    }

    int prev_cycle = -1;
    int pc_cycle = -1, sc_cycle = -1;
    for (const auto& op : prog.ops) {
        if (op.cycle < 0) fail("negative cycle", &op);
        if (op.cycle < prev_cycle) fail("ops not sorted by cycle", &op);
        prev_cycle = op.cycle;

        if (op.unit == Unit::PC || op.unit == Unit::BOTH) {
            if (pc_cycle == op.cycle) fail("two PC issues in one cycle", &op);
            pc_cycle = op.cycle;
        }
        if (op.unit == Unit::SC || op.unit == Unit::BOTH) {
            if (sc_cycle == op.cycle) fail("two SC issues in one cycle", &op);
            sc_cycle = op.cycle;
        }

        if (op.unit != Unit::STRUCT) {
            if (op.width < 1 || op.width > 8) fail("cluster width out of range", &op);
            bool step2 = op.qop == QOpcode::AddSum || op.qop == QOpcode::XorStep2;
            if (step2) {
                if (op.unit != Unit::SC) fail("step-2 op must issue on SC", &op);
                if (op.aux < 0) fail("step-2 op needs its step-1 vector", &op);
                const auto& lw = last[std::size_t(op.aux)];
                if (!lw.ever || lw.cycle != op.cycle - 1 ||
                    (lw.unit != Unit::PC && lw.unit != Unit::BOTH))
                    fail("step-2 vector must come from PC on the previous cycle", &op);
                bool carry_src = lw.qop == QOpcode::AddCarry || lw.qop == QOpcode::Comp;
                bool and_src = lw.qop == QOpcode::XorStep1 || lw.qop == QOpcode::And;
                if (op.qop == QOpcode::AddSum && !carry_src)
                    fail("ADD_SUM vector must come from ADD_CARRY or COMP", &op);
                if (op.qop == QOpcode::XorStep2 && !and_src)
                    fail("XOR_STEP2 vector must come from XOR_STEP1 or AND", &op);
            }
        }

        for (int r : op_reads(op)) {
            if (r < 0 || r > 15) fail("register out of range", &op);
            const auto& lw = last[std::size_t(r)];
            if (!lw.ever) fail("read of unwritten register r" + std::to_string(r), &op);
            if (lw.cycle == op.cycle && lw.unit != Unit::STRUCT)
                fail("cluster result consumed in its own cycle (r" + std::to_string(r) + ")",
                     &op);
        }
        for (int r : op_writes(op)) {
            if (r < 0 || r > 15) fail("register out of range", &op);
            last[std::size_t(r)] = {op.cycle, op.unit, op.qop, true};
        }
    }

    for (int r : prog.outputs) {
        if (r < 0 || r > 15 || !last[std::size_t(r)].ever)
            fail("output register r" + std::to_string(r) + " never written");
    }
    if (prog.declared_cycles != prog.measured_cycles())
        fail("declared_cycles " + std::to_string(prog.declared_cycles) +
             " != measured " + std::to_string(prog.measured_cycles()));
}

std::string serialize_program(const MicroProgram& prog) {
    std::ostringstream os;
    os << "# @name: " << prog.name << "\n";
    os << "# @format: " << prog.format << "\n";
    os << "# @operation: " << prog.operation << "\n";
    os << "# @declared_cycles: " << prog.declared_cycles << "\n";
    auto reglist = [&](const std::vector<int>& v) {
        std::string s;
        for (int r : v) s += " r" + std::to_string(r);
        return s;
    };
    os << "# @inputs:" << reglist(prog.inputs) << "\n";
    os << "# @outputs:" << reglist(prog.outputs) << "\n";
    for (const auto& op : prog.ops) {
        os << op.cycle << " " << unit_name(op.unit) << " ";
        if (op.unit != Unit::STRUCT) {
            os << qopcode_name(op.qop) << " w=" << op.width << " dst=r" << op.dst;
            if (op.dlane) os << "@" << op.dlane;
            os << " a=" << operand_str(op.a);
            bool has_b = op.qop != QOpcode::Not && op.qop != QOpcode::PositDecode;
            if (has_b) os << " b=" << operand_str(op.b);
            if (op.qop == QOpcode::AddSum) os << " cv=r" << op.aux;
            if (op.qop == QOpcode::XorStep2) os << " av=r" << op.aux;
            if (op.qop == QOpcode::AddCarry || op.qop == QOpcode::AddSum) {
                os << " cin=";
                if (op.cin.kind == CinSpec::Imm)
                    os << op.cin.imm;
                else
                    os << "r" << op.cin.reg << ".b" << op.cin.bit;
            }
        } else {
            os << sop_name(op.sop);
            char buf[32];
            auto hex = [&](std::uint32_t v) {
                std::snprintf(buf, sizeof buf, "0x%X", v);
                return std::string(buf);
            };
            switch (op.sop) {
                case SOp::Movi:
                    os << " dst=r" << op.dst << " imm=" << hex(op.imm);
                    break;
                case SOp::Mov:
                case SOp::TrfRead:
                case SOp::TrfWrite:
                case SOp::Kmag:
                case SOp::LutK:
                case SOp::LutL:
                    os << " dst=r" << op.dst << " src=r" << op.src;
                    break;
                case SOp::Shl:
                case SOp::Shr:
                case SOp::Sar: {
                    os << " dst=r" << op.dst << " src=r" << op.src << " amt=";
                    switch (op.amt.kind) {
                        case AmtSpec::Imm: os << op.amt.imm; break;
                        case AmtSpec::Reg: os << "r" << op.amt.reg; break;
                        case AmtSpec::RegPlusImm:
                            os << "r" << op.amt.reg;
                            if (op.amt.imm >= 0) os << "+";
                            os << op.amt.imm;
                            break;
                        case AmtSpec::ImmMinusReg:
                            os << op.amt.imm << "-r" << op.amt.reg;
                            break;
                    }
                    break;
                }
                case SOp::Extract:
                case SOp::Insert:
                    os << " dst=r" << op.dst << " src=r" << op.src << " lo=" << op.lo
                       << " w=" << op.w;
                    break;
                case SOp::Inserti:
                    os << " dst=r" << op.dst << " imm=" << hex(op.imm) << " lo=" << op.lo
                       << " w=" << op.w;
                    break;
                case SOp::Sel:
                    os << " dst=r" << op.dst << " cond=" << cond_str(op.cond) << " t=r"
                       << op.src << " f=r" << op.src2;
                    break;
                case SOp::Tsel:
                case SOp::Negsel:
                    os << " dst=r" << op.dst << " src=r" << op.src << " n=" << op.nbits;
                    break;
                case SOp::Cmb:
                    os << " dst=r" << op.dst << " lhi=r" << op.src << " llo=r" << op.src2
                       << " vlo=r" << op.src3 << " t=r" << op.src4;
                    break;
                case SOp::Ksign:
                    os << " dst=r" << op.dst << " src=r" << op.src
                       << " cond=" << cond_str(op.cond);
                    break;
            }
        }
        if (!op.comment.empty()) os << "  # " << op.comment;
        os << "\n";
    }
    return os.str();
}

MicroProgram parse_program(const std::string& text) {
    MicroProgram prog;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        // header directives
        if (line.rfind("# @", 0) == 0) {
            auto colon = line.find(':');
            if (colon == std::string::npos) continue;
            std::string key = line.substr(3, colon - 3);
            std::string val = line.substr(colon + 1);
            std::istringstream vs(val);
            if (key == "name") vs >> prog.name;
            else if (key == "format") vs >> prog.format;
            else if (key == "operation") vs >> prog.operation;
            else if (key == "declared_cycles") vs >> prog.declared_cycles;
            else if (key == "inputs" || key == "outputs") {
                std::string tok;
                while (vs >> tok)
                    (key == "inputs" ? prog.inputs : prog.outputs).push_back(parse_reg(tok));
            }
            continue;
        }
        auto hash = line.find('#');
        std::string body = hash == std::string::npos ? line : line.substr(0, hash);
        std::istringstream ls(body);
        std::string cyc, unit, opname;
        if (!(ls >> cyc >> unit >> opname)) continue;  // blank or comment-only

        MicroOp op;
        op.cycle = std::stoi(cyc);
        if (unit == "PC") op.unit = Unit::PC;
        else if (unit == "SC") op.unit = Unit::SC;
        else if (unit == "BOTH") op.unit = Unit::BOTH;
        else if (unit == "STRUCT") op.unit = Unit::STRUCT;
        else throw ProgramError("bad unit: " + unit);
        if (hash != std::string::npos) {
            op.comment = line.substr(hash + 1);
            while (!op.comment.empty() && op.comment.front() == ' ')
                op.comment.erase(op.comment.begin());
        }

        std::map<std::string, std::string> kv;
        std::string tok;
        while (ls >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) throw ProgramError("bad token: " + tok);
            kv[tok.substr(0, eq)] = tok.substr(eq + 1);
        }
        auto need = [&](const std::string& k) -> std::string {
            auto it = kv.find(k);
            if (it == kv.end()) throw ProgramError(opname + " missing arg " + k);
            return it->second;
        };

        if (op.unit != Unit::STRUCT) {
            op.qop = qopcode_from_name(opname);
            op.width = int(parse_imm(need("w")));
            Operand d = parse_operand(need("dst"));
            op.dst = d.reg;
            op.dlane = d.lane;
            op.a = parse_operand(need("a"));
            if (op.qop != QOpcode::Not && op.qop != QOpcode::PositDecode)
                op.b = parse_operand(need("b"));
            if (op.qop == QOpcode::AddSum) op.aux = parse_reg(need("cv"));
            if (op.qop == QOpcode::XorStep2) op.aux = parse_reg(need("av"));
            if (kv.count("cin")) {
                std::string c = kv["cin"];
                if (c == "0" || c == "1") {
                    op.cin = {CinSpec::Imm, c == "1" ? 1 : 0, 0, 0};
                } else {
                    CondSpec cs = parse_cond(c);
                    op.cin = {CinSpec::RegBit, 0, cs.reg, cs.bit < 0 ? 0 : cs.bit};
                }
            }
        } else {
            auto it = sop_names().find(opname);
            if (it == sop_names().end()) throw ProgramError("unknown struct op: " + opname);
            op.sop = it->second;
            switch (op.sop) {
                case SOp::Movi:
                    op.dst = parse_reg(need("dst"));
                    op.imm = parse_imm(need("imm"));
                    break;
                case SOp::Mov:
                case SOp::TrfRead:
                case SOp::TrfWrite:
                case SOp::Kmag:
                case SOp::LutK:
                case SOp::LutL:
                    op.dst = parse_reg(need("dst"));
                    op.src = parse_reg(need("src"));
                    break;
                case SOp::Shl:
                case SOp::Shr:
                case SOp::Sar: {
                    op.dst = parse_reg(need("dst"));
                    op.src = parse_reg(need("src"));
                    std::string a = need("amt");
                    auto minus = a.find("-r");
                    if (a[0] == 'r') {
                        auto plus = a.find('+');
                        auto neg = a.find('-');
                        if (plus != std::string::npos) {
                            op.amt = {AmtSpec::RegPlusImm, parse_reg(a.substr(0, plus)),
                                      std::stoi(a.substr(plus + 1))};
                        } else if (neg != std::string::npos) {
                            op.amt = {AmtSpec::RegPlusImm, parse_reg(a.substr(0, neg)),
                                      std::stoi(a.substr(neg))};
                        } else {
                            op.amt = {AmtSpec::Reg, parse_reg(a), 0};
                        }
                    } else if (minus != std::string::npos) {
                        op.amt = {AmtSpec::ImmMinusReg, parse_reg(a.substr(minus + 1)),
                                  std::stoi(a.substr(0, minus))};
                    } else {
                        op.amt = {AmtSpec::Imm, 0, std::stoi(a)};
                    }
                    break;
                }
                case SOp::Extract:
                case SOp::Insert:
                    op.dst = parse_reg(need("dst"));
                    op.src = parse_reg(need("src"));
                    op.lo = int(parse_imm(need("lo")));
                    op.w = int(parse_imm(need("w")));
                    break;
                case SOp::Inserti:
                    op.dst = parse_reg(need("dst"));
                    op.imm = parse_imm(need("imm"));
                    op.lo = int(parse_imm(need("lo")));
                    op.w = int(parse_imm(need("w")));
                    break;
                case SOp::Sel:
                    op.dst = parse_reg(need("dst"));
                    op.cond = parse_cond(need("cond"));
                    op.src = parse_reg(need("t"));
                    op.src2 = parse_reg(need("f"));
                    break;
                case SOp::Tsel:
                case SOp::Negsel:
                    op.dst = parse_reg(need("dst"));
                    op.src = parse_reg(need("src"));
                    op.nbits = int(parse_imm(need("n")));
                    break;
                case SOp::Cmb:
                    op.dst = parse_reg(need("dst"));
                    op.src = parse_reg(need("lhi"));
                    op.src2 = parse_reg(need("llo"));
                    op.src3 = parse_reg(need("vlo"));
                    op.src4 = parse_reg(need("t"));
                    break;
                case SOp::Ksign:
                    op.dst = parse_reg(need("dst"));
                    op.src = parse_reg(need("src"));
                    op.cond = parse_cond(need("cond"));
                    break;
            }
        }
        prog.ops.push_back(op);
    }
    return prog;
}

}  // namespace talu
