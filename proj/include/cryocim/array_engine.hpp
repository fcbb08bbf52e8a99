#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "cryocim/device_models.hpp"

namespace cryocim {

/// Crosspoint memory array: a rows x cols matrix of Hall cells sharing one
/// set of device parameters and one selector characteristic.
///
/// Value type. Copies share the (immutable) selector model.
class ArrayState {
public:
    /// Rows and cols must be >= 1. A null selector means the built-in
    /// synthetic table.
    ArrayState(std::size_t rows, std::size_t cols, QaheParams params = {},
               std::shared_ptr<const SelectorModel> selector = nullptr);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    QaheCellState cell(std::size_t row, std::size_t col) const;
    void set_cell(std::size_t row, std::size_t col, QaheCellState state);

    const QaheParams& params() const { return params_; }
    const SelectorModel& selector() const { return *selector_; }

    bool same_bits(const ArrayState& other) const;

    /// Canonical snapshot: {"rows":R,"cols":C,"bits":[...]} with bits in
    /// row-major order and no whitespace.
    std::string snapshot_json() const;

private:
    std::size_t index(std::size_t row, std::size_t col) const;

    std::size_t rows_;
    std::size_t cols_;
    std::vector<QaheCellState> cells_;
    QaheParams params_;
    std::shared_ptr<const SelectorModel> selector_;
};

/// What a bias cycle is trying to accomplish. Write0 drives the negative
/// full bias, Write1 the positive one; Read and Logic use the read bias.
enum class CycleMode { Write0, Write1, Read, Logic };

const char* to_string(CycleMode mode);

/// Per-line voltages for one cycle. A cell's applied bias is
/// bl_voltages[col] - wl_voltages[row].
struct BiasScheme {
    std::vector<double> bl_voltages_v;  ///< one per column
    std::vector<double> wl_voltages_v;  ///< one per row
    double v_full_v = 0.0;              ///< signed full access bias
    CycleMode mode = CycleMode::Read;

    double cell_bias_v(std::size_t row, std::size_t col) const {
        return bl_voltages_v[col] - wl_voltages_v[row];
    }
};

/// Selection role a cell plays under a scheme, derived from its bias.
enum class CellTag { Unselected, HalfSelected, Selected };

const char* to_string(CellTag tag);

/// Solved per-cell currents and selection tags, row-major.
struct CellCurrentMap {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> currents_a;
    std::vector<CellTag> tags;

    double current_at(std::size_t row, std::size_t col) const {
        return currents_a[row * cols + col];
    }
    CellTag tag_at(std::size_t row, std::size_t col) const {
        return tags[row * cols + col];
    }
};

/// Dissipation split by selection role. Leakage is the half-selected total.
/// Peripheral (amplifier/comparator) power is out of scope throughout.
struct PowerReport {
    double selected_power_w = 0.0;
    double leakage_power_w = 0.0;
    double per_cell_selected_w = 0.0;  ///< mean over selected cells
    double per_cell_leakage_w = 0.0;   ///< mean over half-selected cells
    double cycle_energy_j = 0.0;       ///< (selected + leakage) * cycle time
    std::size_t n_selected = 0;
    std::size_t n_half_selected = 0;
};

/// Half-select (V/2) scheme: accessed columns at the full signed bias,
/// accessed rows grounded, every other line at half bias. Accessed cells
/// then see v_full, cells sharing one accessed line see v_full/2, the rest 0.
///
/// Write/Read modes take exactly one target row and column; Logic takes two
/// distinct operand columns and at least one activated row.
BiasScheme build_bias_scheme(CycleMode mode, const std::vector<std::size_t>& target_rows,
                             const std::vector<std::size_t>& target_cols, double v_full_v,
                             std::size_t n_rows, std::size_t n_cols);

/// Solve every cell's series current under the scheme. Zero-bias cells carry
/// exactly zero current and are tagged Unselected; cells whose bias exceeds
/// 3/4 of the full bias are Selected, the rest HalfSelected.
CellCurrentMap compute_cell_currents(const ArrayState& array, const BiasScheme& scheme);

/// Sum of Hall voltages across one row. Every cell contributes, whatever its
/// selection tag; complementary bits at equal currents cancel exactly.
double row_hall_sum(const ArrayState& array, const CellCurrentMap& currents, std::size_t row);

/// Power split for one cycle: selected power = sum of |V x I| over selected
/// cells, leakage likewise over half-selected cells.
PowerReport power_report(const BiasScheme& scheme, const CellCurrentMap& currents,
                         double cycle_time_s);

/// Apply one write cycle: every cell is stepped with its solved current
/// (half- and unselected cells must come out unchanged if the configuration
/// is disturb-safe). Raises WriteVerifyError if a selected cell misses the
/// target state.
ArrayState apply_write(const ArrayState& array, const BiasScheme& scheme);

}  // namespace cryocim
