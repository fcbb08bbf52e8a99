#include "cryocim/sense_chain.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace cryocim {

const char* to_string(Opcode op) {
    switch (op) {
        case Opcode::Read: return "READ";
        case Opcode::Nand: return "NAND";
        case Opcode::Nor: return "NOR";
        case Opcode::Xor: return "XOR";
    }
    return "unknown";
}

Opcode opcode_from_string(const std::string& name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "READ") return Opcode::Read;
    if (upper == "NAND") return Opcode::Nand;
    if (upper == "NOR") return Opcode::Nor;
    if (upper == "XOR") return Opcode::Xor;
    throw std::invalid_argument("unknown opcode \"" + name +
                                "\" (expected READ, NAND, NOR, or XOR)");
}

void SenseConfig::validate() const {
    if (!(gain > 0.0)) throw std::invalid_argument("sense gain must be > 0");
    if (!(v_dd_v > 0.0)) throw std::invalid_argument("sense v_dd must be > 0");
    for (const auto& [op, refs] : references) {
        if (!(refs.v_ref1_v < refs.v_ref2_v)) {
            throw std::invalid_argument(std::string("sense references for ") + to_string(op) +
                                        " must satisfy v_ref1 < v_ref2");
        }
    }
}

double amplify(double v_row_v, const SenseConfig& cfg) { return cfg.gain * v_row_v; }

double compare(double v_in_v, double v_ref_v, double v_dd_v) {
    return v_in_v >= v_ref_v ? v_dd_v : 0.0;
}

RefPair select_references(Opcode op, const SenseConfig& cfg) {
    auto it = cfg.references.find(op);
    if (it == cfg.references.end()) {
        throw std::invalid_argument(std::string("no references configured for opcode ") +
                                    to_string(op));
    }
    return it->second;
}

uint8_t sense(double v_amp_v, Opcode op, bool sen, const SenseConfig& cfg) {
    if (!sen) return 0;
    const RefPair refs = select_references(op, cfg);
    const bool above_lower = compare(v_amp_v, refs.v_ref1_v, cfg.v_dd_v) > 0.0;
    const bool above_upper = compare(v_amp_v, refs.v_ref2_v, cfg.v_dd_v) > 0.0;
    return (above_lower && !above_upper) ? 1 : 0;
}

uint8_t read_decode(double v_amp_v, const SenseConfig& cfg) {
    return sense(v_amp_v, Opcode::Read, true, cfg);
}

}  // namespace cryocim
