#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace cryocim {

/// The four sense operations, matching the 4-to-1 reference multiplexers.
enum class Opcode { Read, Nand, Nor, Xor };

const char* to_string(Opcode op);

/// Parses "READ"/"NAND"/"NOR"/"XOR" (case-insensitive). Throws
/// std::invalid_argument on anything else.
Opcode opcode_from_string(const std::string& name);

/// Window bounds for one opcode; the sense output is 1 exactly when the
/// amplified row voltage lies in [v_ref1, v_ref2).
struct RefPair {
    double v_ref1_v = 0.0;
    double v_ref2_v = 0.0;
};

/// Per-row peripheral chain configuration: ideal linear amplifier followed
/// by a two-comparator window detector.
///
/// Default references assume amplified logic levels near +/-104 mV (two
/// cells at ~2 nA read current, gain 1000): the window midpoints sit at
/// +/-50 mV and the upper guard at +150 mV.
struct SenseConfig {
    double gain = 1000.0;
    double v_dd_v = 1.0;
    std::map<Opcode, RefPair> references{
        {Opcode::Read, {-0.15, 0.0}},
        {Opcode::Nand, {-0.05, 0.15}},
        {Opcode::Nor, {0.05, 0.15}},
        {Opcode::Xor, {-0.05, 0.05}},
    };

    /// Requires gain > 0, v_dd > 0, and v_ref1 < v_ref2 for every opcode.
    void validate() const;
};

/// Ideal linear amplifier: gain x v_row.
double amplify(double v_row_v, const SenseConfig& cfg);

/// Ideal comparator: v_dd when v_in >= v_ref (inclusive), else 0.
double compare(double v_in_v, double v_ref_v, double v_dd_v);

/// Reference pair for the opcode. Throws std::invalid_argument when the
/// opcode has no configured pair.
RefPair select_references(Opcode op, const SenseConfig& cfg);

/// Window detector output. With sen low the output is forced to 0;
/// otherwise 1 exactly when v_ref1 <= v_amp < v_ref2.
uint8_t sense(double v_amp_v, Opcode op, bool sen, const SenseConfig& cfg);

/// Single-cell read decision: the read window yields 1 exactly when the
/// amplified row voltage is negative (stored 1 under a negative read
/// current). An input of exactly 0 decodes as 0; callers should flag it,
/// since it means no cell was selected.
uint8_t read_decode(double v_amp_v, const SenseConfig& cfg);

}  // namespace cryocim
