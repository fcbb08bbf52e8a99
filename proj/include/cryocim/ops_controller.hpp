#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cryocim/array_engine.hpp"
#include "cryocim/sense_chain.hpp"

namespace cryocim {

/// Bias voltages driving the array cycles.
struct BiasConfig {
    /// Signed full read bias. Negative by default so the read current is
    /// negative and a stored 1 produces a negative Hall voltage.
    double v_read_v = -0.5;
    /// Write bias magnitude. The default lands the solved write current at
    /// 1.5x the positive threshold on the built-in selector table.
    double v_write_v = 0.5209356844210831;
    /// Cycle duration used only for energy reporting.
    double cycle_time_s = 1e-8;

    void validate() const;
};

/// Everything one cycle produced, mirroring the quantities a probe station
/// would see: line biases, solved currents, per-row analog chain, outputs,
/// and the power split.
struct OperationTrace {
    std::size_t cycle_index = 0;
    std::string op_name;
    BiasScheme scheme;
    CellCurrentMap currents;
    std::vector<double> row_sums_v;    ///< per-row Hall-voltage sum
    std::vector<double> amplified_v;   ///< gain x row_sums
    std::vector<double> vc1_v;         ///< lower comparator analog output per row
    std::vector<double> vc2_v;         ///< upper comparator analog output per row
    std::vector<uint8_t> outputs;      ///< per-row sense bit (0 where SEN is low)
    std::vector<uint8_t> active_rows;  ///< 1 where SEN is asserted
    bool sen = false;
    std::optional<Opcode> opcode;      ///< absent for write cycles
    PowerReport power;
    std::vector<std::string> diagnostics;
};

/// One trace as a single-line JSON object (no trailing newline). Field
/// names are part of the tool's output contract.
std::string trace_to_json(const OperationTrace& trace);

/// Sequences full array cycles: each operation builds a bias scheme, solves
/// cell currents, runs every row's sense chain, and accounts power. Reads
/// and logic never mutate stored bits; writes go through write-verify.
class OpsController {
public:
    explicit OpsController(ArrayState array, BiasConfig bias = {}, SenseConfig sense = {});

    const ArrayState& array() const { return array_; }
    const BiasConfig& bias_config() const { return bias_; }
    const SenseConfig& sense_config() const { return sense_; }
    std::size_t cycles_run() const { return cycle_; }

    /// Program one cell. SEN stays low; outputs are all 0.
    OperationTrace write_bit(std::size_t row, std::size_t col, uint8_t bit);

    /// Read one cell through the full chain. Leaves the array unchanged.
    std::pair<uint8_t, OperationTrace> read_bit(std::size_t row, std::size_t col);

    /// Single-row, single-cycle logic between two stored bits. op must not
    /// be Read; the operand columns must differ.
    std::pair<uint8_t, OperationTrace> logic_op(std::size_t row, std::size_t col_a,
                                                std::size_t col_b, Opcode op);

    /// Multi-row logic: one cycle evaluates every activated row's sense
    /// chain. Returned bits are in the order of the given rows.
    std::pair<std::vector<uint8_t>, OperationTrace> parallel_logic(
        const std::vector<std::size_t>& rows, std::size_t col_a, std::size_t col_b, Opcode op);

private:
    OperationTrace run_cycle(std::string op_name, const BiasScheme& scheme,
                             const std::vector<std::size_t>& active_rows,
                             std::optional<Opcode> opcode, bool sen);

    ArrayState array_;
    BiasConfig bias_;
    SenseConfig sense_;
    std::size_t cycle_ = 0;
};

}  // namespace cryocim
