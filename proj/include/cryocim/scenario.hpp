#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cryocim/array_engine.hpp"
#include "cryocim/ops_controller.hpp"
#include "cryocim/variation_lab.hpp"

namespace cryocim {

/// One scripted directive. Fields are meaningful per kind; unused ones keep
/// their defaults.
struct ScenarioOp {
    enum class Kind {
        Write,           ///< program one cell
        Read,            ///< read one cell
        Logic,           ///< single-row two-operand logic
        ParallelLogic,   ///< multi-row logic, one cycle
        McReadCurrent,   ///< read-current distribution -> label artifacts
        McCellHall,      ///< single-cell Hall-voltage distribution
        McRow,           ///< amplified two-cell row-voltage distribution
        McMargin,        ///< reference-margin report over the three row levels
        HysteresisSweep, ///< device-level up-down bias-current sweep
        Snapshot         ///< dump the current array state
    };

    Kind kind = Kind::Read;
    std::size_t row = 0;
    std::size_t col = 0;
    uint8_t bit = 0;                   ///< Write / McCellHall
    std::size_t col_a = 0;
    std::size_t col_b = 1;
    std::vector<std::size_t> rows;     ///< ParallelLogic; empty = all rows
    Opcode opcode = Opcode::Nand;
    uint8_t bit_a = 0;                 ///< McRow operands
    uint8_t bit_b = 0;
    std::string label;                 ///< artifact basename for emitting kinds
    double i_start_a = -5e-9;          ///< HysteresisSweep
    double i_end_a = 5e-9;
    std::size_t n_points = 101;        ///< sweep points per direction
};

/// Complete simulation description. Every field carries the built-in
/// default, so `{}` is a valid scenario that models the reference setup.
struct Scenario {
    std::string name = "scenario";
    std::size_t rows = 4;
    std::size_t cols = 4;
    QaheParams device;
    /// "default-synthetic" or a CSV path (resolved against the scenario
    /// file's directory at load time).
    std::string selector_table = "default-synthetic";
    BiasConfig bias;
    SenseConfig sense;
    VariationConfig variation;
    std::vector<ScenarioOp> script;
};

/// Parse and fully validate a scenario file. Throws ParseError whose
/// message lists every violation.
Scenario load_scenario(const std::string& path);

/// Schema validation without execution. Empty result = valid. Unreadable
/// files and broken JSON surface as violations, not exceptions.
std::vector<std::string> check_scenario(const std::string& path);

/// Execute the script, writing trace.jsonl, summary.txt, and per-directive
/// artifacts into out_dir (created if missing). Model errors are rethrown
/// as cryocim::Error prefixed with the failing operation's index.
void run_scenario(const Scenario& scenario, const std::string& out_dir);

}  // namespace cryocim
