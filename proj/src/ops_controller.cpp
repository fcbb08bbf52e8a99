#include "cryocim/ops_controller.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace cryocim {

void BiasConfig::validate() const {
    if (v_read_v == 0.0) throw std::invalid_argument("read bias must be nonzero");
    if (!(v_write_v > 0.0)) throw std::invalid_argument("write bias magnitude must be > 0");
    if (!(cycle_time_s >= 0.0)) throw std::invalid_argument("cycle time must be >= 0");
}

std::string trace_to_json(const OperationTrace& trace) {
    nlohmann::ordered_json j;
    j["cycle"] = trace.cycle_index;
    j["op"] = trace.op_name;
    j["mode"] = to_string(trace.scheme.mode);
    j["opcode"] = trace.opcode ? nlohmann::ordered_json(to_string(*trace.opcode))
                               : nlohmann::ordered_json(nullptr);
    j["sen"] = trace.sen;
    j["v_full_v"] = trace.scheme.v_full_v;
    j["bl_voltages_v"] = trace.scheme.bl_voltages_v;
    j["wl_voltages_v"] = trace.scheme.wl_voltages_v;
    j["rows"] = trace.currents.rows;
    j["cols"] = trace.currents.cols;
    j["currents_a"] = trace.currents.currents_a;
    auto tags = nlohmann::ordered_json::array();
    for (CellTag tag : trace.currents.tags) tags.push_back(to_string(tag));
    j["tags"] = std::move(tags);
    j["row_sums_v"] = trace.row_sums_v;
    j["amplified_v"] = trace.amplified_v;
    j["vc1_v"] = trace.vc1_v;
    j["vc2_v"] = trace.vc2_v;
    j["outputs"] = trace.outputs;
    j["active_rows"] = trace.active_rows;
    j["power"] = {{"selected_w", trace.power.selected_power_w},
                  {"leakage_w", trace.power.leakage_power_w},
                  {"per_cell_selected_w", trace.power.per_cell_selected_w},
                  {"per_cell_leakage_w", trace.power.per_cell_leakage_w},
                  {"cycle_energy_j", trace.power.cycle_energy_j},
                  {"n_selected", trace.power.n_selected},
                  {"n_half_selected", trace.power.n_half_selected}};
    j["diagnostics"] = trace.diagnostics;
    return j.dump();
}

OpsController::OpsController(ArrayState array, BiasConfig bias, SenseConfig sense)
    : array_(std::move(array)), bias_(bias), sense_(std::move(sense)) {
    bias_.validate();
    sense_.validate();
}

OperationTrace OpsController::run_cycle(std::string op_name, const BiasScheme& scheme,
                                        const std::vector<std::size_t>& active_rows,
                                        std::optional<Opcode> opcode, bool sen) {
    OperationTrace trace;
    trace.cycle_index = cycle_++;
    trace.op_name = std::move(op_name);
    trace.scheme = scheme;
    trace.currents = compute_cell_currents(array_, scheme);
    trace.sen = sen;
    trace.opcode = opcode;

    const std::size_t n_rows = array_.rows();
    trace.active_rows.assign(n_rows, 0);
    for (std::size_t r : active_rows) trace.active_rows[r] = 1;

    trace.row_sums_v.resize(n_rows);
    trace.amplified_v.resize(n_rows);
    trace.outputs.assign(n_rows, 0);
    if (opcode) {
        trace.vc1_v.resize(n_rows);
        trace.vc2_v.resize(n_rows);
    }
    for (std::size_t r = 0; r < n_rows; ++r) {
        trace.row_sums_v[r] = row_hall_sum(array_, trace.currents, r);
        trace.amplified_v[r] = amplify(trace.row_sums_v[r], sense_);
        if (opcode) {
            const RefPair refs = select_references(*opcode, sense_);
            trace.vc1_v[r] = compare(trace.amplified_v[r], refs.v_ref1_v, sense_.v_dd_v);
            trace.vc2_v[r] = compare(trace.amplified_v[r], refs.v_ref2_v, sense_.v_dd_v);
            trace.outputs[r] = sense(trace.amplified_v[r], *opcode,
                                     sen && trace.active_rows[r] != 0, sense_);
        }
    }
    trace.power = power_report(scheme, trace.currents, bias_.cycle_time_s);
    return trace;
}

OperationTrace OpsController::write_bit(std::size_t row, std::size_t col, uint8_t bit) {
    if (bit > 1) throw std::invalid_argument("bit must be 0 or 1");
    const CycleMode mode = bit ? CycleMode::Write1 : CycleMode::Write0;
    const double v_full = bit ? bias_.v_write_v : -bias_.v_write_v;
    const BiasScheme scheme =
        build_bias_scheme(mode, {row}, {col}, v_full, array_.rows(), array_.cols());
    OperationTrace trace = run_cycle("write_bit", scheme, {}, std::nullopt, false);
    array_ = apply_write(array_, scheme);
    return trace;
}

std::pair<uint8_t, OperationTrace> OpsController::read_bit(std::size_t row, std::size_t col) {
    const BiasScheme scheme = build_bias_scheme(CycleMode::Read, {row}, {col}, bias_.v_read_v,
                                                array_.rows(), array_.cols());
    OperationTrace trace = run_cycle("read_bit", scheme, {row}, Opcode::Read, true);
    if (trace.row_sums_v[row] == 0.0) {
        trace.diagnostics.push_back("invalid read: selected row's Hall-voltage sum is 0 V");
    }
    const uint8_t bit = trace.outputs[row];
    return {bit, trace};
}

std::pair<uint8_t, OperationTrace> OpsController::logic_op(std::size_t row, std::size_t col_a,
                                                           std::size_t col_b, Opcode op) {
    auto [bits, trace] = parallel_logic({row}, col_a, col_b, op);
    trace.op_name = "logic_op";
    return {bits[0], std::move(trace)};
}

std::pair<std::vector<uint8_t>, OperationTrace> OpsController::parallel_logic(
    const std::vector<std::size_t>& rows, std::size_t col_a, std::size_t col_b, Opcode op) {
    if (rows.empty()) throw std::invalid_argument("parallel logic needs at least one row");
    if (col_a == col_b) throw std::invalid_argument("logic operands must be distinct columns");
    if (op == Opcode::Read) {
        throw std::invalid_argument("logic operations accept NAND, NOR, or XOR only");
    }
    const BiasScheme scheme = build_bias_scheme(CycleMode::Logic, rows, {col_a, col_b},
                                                bias_.v_read_v, array_.rows(), array_.cols());
    OperationTrace trace = run_cycle("parallel_logic", scheme, rows, op, true);
    std::vector<uint8_t> bits;
    bits.reserve(rows.size());
    for (std::size_t r : rows) bits.push_back(trace.outputs[r]);
    return {std::move(bits), std::move(trace)};
}

}  // namespace cryocim
