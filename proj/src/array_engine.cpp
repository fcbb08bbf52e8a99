#include "cryocim/array_engine.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "cryocim/errors.hpp"

namespace cryocim {

ArrayState::ArrayState(std::size_t rows, std::size_t cols, QaheParams params,
                       std::shared_ptr<const SelectorModel> selector)
    : rows_(rows),
      cols_(cols),
      cells_(rows * cols),
      params_(params),
      selector_(std::move(selector)) {
    if (rows_ < 1 || cols_ < 1) {
        throw std::invalid_argument("ArrayState: dimensions must be at least 1x1");
    }
    params_.validate();
    if (!selector_) {
        selector_ = std::make_shared<SelectorModel>(synthetic_miec_table());
    }
}

std::size_t ArrayState::index(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= cols_) {
        std::ostringstream msg;
        msg << "cell (" << row << ", " << col << ") outside " << rows_ << "x" << cols_
            << " array";
        throw std::out_of_range(msg.str());
    }
    return row * cols_ + col;
}

QaheCellState ArrayState::cell(std::size_t row, std::size_t col) const {
    return cells_[index(row, col)];
}

void ArrayState::set_cell(std::size_t row, std::size_t col, QaheCellState state) {
    cells_[index(row, col)] = state;
}

bool ArrayState::same_bits(const ArrayState& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) return false;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i].bit != other.cells_[i].bit) return false;
    }
    return true;
}

std::string ArrayState::snapshot_json() const {
    nlohmann::ordered_json j;
    j["rows"] = rows_;
    j["cols"] = cols_;
    auto bits = nlohmann::ordered_json::array();
    for (const auto& cell : cells_) bits.push_back(static_cast<int>(cell.bit));
    j["bits"] = std::move(bits);
    return j.dump();
}

const char* to_string(CycleMode mode) {
    switch (mode) {
        case CycleMode::Write0: return "write0";
        case CycleMode::Write1: return "write1";
        case CycleMode::Read: return "read";
        case CycleMode::Logic: return "logic";
    }
    return "unknown";
}

const char* to_string(CellTag tag) {
    switch (tag) {
        case CellTag::Unselected: return "unselected";
        case CellTag::HalfSelected: return "half_selected";
        case CellTag::Selected: return "selected";
    }
    return "unknown";
}

BiasScheme build_bias_scheme(CycleMode mode, const std::vector<std::size_t>& target_rows,
                             const std::vector<std::size_t>& target_cols, double v_full_v,
                             std::size_t n_rows, std::size_t n_cols) {
    if (target_rows.empty()) throw std::invalid_argument("bias scheme needs at least one row");
    if (target_cols.empty()) throw std::invalid_argument("bias scheme needs at least one column");
    for (std::size_t r : target_rows) {
        if (r >= n_rows) {
            throw std::out_of_range("target row " + std::to_string(r) + " outside array with " +
                                    std::to_string(n_rows) + " rows");
        }
    }
    for (std::size_t c : target_cols) {
        if (c >= n_cols) {
            throw std::out_of_range("target column " + std::to_string(c) +
                                    " outside array with " + std::to_string(n_cols) + " columns");
        }
    }
    if (mode == CycleMode::Logic) {
        if (target_cols.size() != 2 || target_cols[0] == target_cols[1]) {
            throw std::invalid_argument("logic cycle needs exactly two distinct operand columns");
        }
    } else {
        if (target_rows.size() != 1 || target_cols.size() != 1) {
            throw std::invalid_argument(std::string(to_string(mode)) +
                                        " cycle targets exactly one cell");
        }
    }

    const double v_half = v_full_v / 2.0;
    BiasScheme scheme;
    scheme.mode = mode;
    scheme.v_full_v = v_full_v;
    scheme.bl_voltages_v.assign(n_cols, v_half);
    scheme.wl_voltages_v.assign(n_rows, v_half);
    for (std::size_t c : target_cols) scheme.bl_voltages_v[c] = v_full_v;
    for (std::size_t r : target_rows) scheme.wl_voltages_v[r] = 0.0;
    return scheme;
}

CellCurrentMap compute_cell_currents(const ArrayState& array, const BiasScheme& scheme) {
    if (scheme.wl_voltages_v.size() != array.rows() ||
        scheme.bl_voltages_v.size() != array.cols()) {
        throw std::invalid_argument("bias scheme dimensions do not match array");
    }

    CellCurrentMap map;
    map.rows = array.rows();
    map.cols = array.cols();
    map.currents_a.resize(map.rows * map.cols);
    map.tags.resize(map.rows * map.cols);

    // The half-select scheme yields at most three distinct biases per cycle;
    // solve each once.
    std::map<double, std::pair<double, CellTag>> solved;
    const double select_threshold = 0.75 * std::abs(scheme.v_full_v);

    for (std::size_t r = 0; r < map.rows; ++r) {
        for (std::size_t c = 0; c < map.cols; ++c) {
            const double bias = scheme.cell_bias_v(r, c);
            auto it = solved.find(bias);
            if (it == solved.end()) {
                std::pair<double, CellTag> entry;
                if (bias == 0.0) {
                    entry = {0.0, CellTag::Unselected};
                } else {
                    double current;
                    try {
                        current = solve_cell_current(bias, array.selector(), array.params());
                    } catch (const UnsolvableBiasError& e) {
                        std::ostringstream msg;
                        msg << "cell (" << r << ", " << c << "): " << e.what();
                        throw UnsolvableBiasError(msg.str());
                    }
                    const CellTag tag = std::abs(bias) > select_threshold
                                            ? CellTag::Selected
                                            : CellTag::HalfSelected;
                    entry = {current, tag};
                }
                it = solved.emplace(bias, entry).first;
            }
            map.currents_a[r * map.cols + c] = it->second.first;
            map.tags[r * map.cols + c] = it->second.second;
        }
    }
    return map;
}

double row_hall_sum(const ArrayState& array, const CellCurrentMap& currents, std::size_t row) {
    if (currents.rows != array.rows() || currents.cols != array.cols()) {
        throw std::invalid_argument("current map dimensions do not match array");
    }
    if (row >= array.rows()) {
        throw std::out_of_range("row " + std::to_string(row) + " outside array");
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < array.cols(); ++c) {
        sum += hall_voltage(array.cell(row, c), currents.current_at(row, c), array.params());
    }
    return sum + 0.0;
}

PowerReport power_report(const BiasScheme& scheme, const CellCurrentMap& currents,
                         double cycle_time_s) {
    if (scheme.wl_voltages_v.size() != currents.rows ||
        scheme.bl_voltages_v.size() != currents.cols) {
        throw std::invalid_argument("bias scheme dimensions do not match current map");
    }
    if (cycle_time_s < 0.0) throw std::invalid_argument("cycle time must be >= 0");

    PowerReport report;
    for (std::size_t r = 0; r < currents.rows; ++r) {
        for (std::size_t c = 0; c < currents.cols; ++c) {
            const double p = std::abs(scheme.cell_bias_v(r, c) * currents.current_at(r, c));
            switch (currents.tag_at(r, c)) {
                case CellTag::Selected:
                    report.selected_power_w += p;
                    ++report.n_selected;
                    break;
                case CellTag::HalfSelected:
                    report.leakage_power_w += p;
                    ++report.n_half_selected;
                    break;
                case CellTag::Unselected:
                    break;
            }
        }
    }
    if (report.n_selected > 0) {
        report.per_cell_selected_w = report.selected_power_w / report.n_selected;
    }
    if (report.n_half_selected > 0) {
        report.per_cell_leakage_w = report.leakage_power_w / report.n_half_selected;
    }
    report.cycle_energy_j = (report.selected_power_w + report.leakage_power_w) * cycle_time_s;
    return report;
}

ArrayState apply_write(const ArrayState& array, const BiasScheme& scheme) {
    if (scheme.mode != CycleMode::Write0 && scheme.mode != CycleMode::Write1) {
        throw std::invalid_argument("apply_write needs a write-mode scheme");
    }
    const CellCurrentMap currents = compute_cell_currents(array, scheme);
    const uint8_t target_bit = scheme.mode == CycleMode::Write1 ? 1 : 0;

    ArrayState next = array;
    for (std::size_t r = 0; r < array.rows(); ++r) {
        for (std::size_t c = 0; c < array.cols(); ++c) {
            const QaheCellState stepped =
                qahe_step(array.cell(r, c), currents.current_at(r, c), array.params());
            next.set_cell(r, c, stepped);
            if (currents.tag_at(r, c) == CellTag::Selected && stepped.bit != target_bit) {
                std::ostringstream msg;
                msg << "write verify failed at cell (" << r << ", " << c << "): bias "
                    << scheme.cell_bias_v(r, c) << " V drives " << currents.current_at(r, c)
                    << " A, which does not cross the write-" << int(target_bit) << " threshold";
                throw WriteVerifyError(msg.str());
            }
        }
    }
    return next;
}

}  // namespace cryocim
