#include "cryocim/scenario.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "cryocim/errors.hpp"
#include "cryocim/version.hpp"

namespace fs = std::filesystem;
using njson = nlohmann::json;

namespace cryocim {

namespace {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

const char* kind_name(ScenarioOp::Kind kind) {
    switch (kind) {
        case ScenarioOp::Kind::Write: return "write";
        case ScenarioOp::Kind::Read: return "read";
        case ScenarioOp::Kind::Logic: return "logic";
        case ScenarioOp::Kind::ParallelLogic: return "parallel_logic";
        case ScenarioOp::Kind::McReadCurrent: return "mc_read_current";
        case ScenarioOp::Kind::McCellHall: return "mc_cell_hall";
        case ScenarioOp::Kind::McRow: return "mc_row";
        case ScenarioOp::Kind::McMargin: return "mc_margin";
        case ScenarioOp::Kind::HysteresisSweep: return "hysteresis_sweep";
        case ScenarioOp::Kind::Snapshot: return "snapshot";
    }
    return "unknown";
}

std::optional<ScenarioOp::Kind> kind_from_string(const std::string& name) {
    static const std::map<std::string, ScenarioOp::Kind> kinds = {
        {"write", ScenarioOp::Kind::Write},
        {"read", ScenarioOp::Kind::Read},
        {"logic", ScenarioOp::Kind::Logic},
        {"parallel_logic", ScenarioOp::Kind::ParallelLogic},
        {"mc_read_current", ScenarioOp::Kind::McReadCurrent},
        {"mc_cell_hall", ScenarioOp::Kind::McCellHall},
        {"mc_row", ScenarioOp::Kind::McRow},
        {"mc_margin", ScenarioOp::Kind::McMargin},
        {"hysteresis_sweep", ScenarioOp::Kind::HysteresisSweep},
        {"snapshot", ScenarioOp::Kind::Snapshot},
    };
    auto it = kinds.find(name);
    if (it == kinds.end()) return std::nullopt;
    return it->second;
}

/// Collects schema violations while pulling typed fields out of the JSON
/// tree; absent fields keep their defaults so validation can keep going.
struct Checker {
    std::vector<std::string>& out;

    void add(const std::string& where, const std::string& what) {
        out.push_back(where + ": " + what);
    }

    void known_keys(const njson& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (allowed.find(it.key()) == allowed.end()) {
                add(where, "unknown field \"" + it.key() + "\"");
            }
        }
    }

    const njson* object(const njson& obj, const std::string& where, const char* key) {
        if (!obj.contains(key)) return nullptr;
        const njson& v = obj.at(key);
        if (!v.is_object()) {
            add(where + "." + key, "must be an object");
            return nullptr;
        }
        return &v;
    }

    std::optional<double> number(const njson& obj, const std::string& where, const char* key) {
        if (!obj.contains(key)) return std::nullopt;
        const njson& v = obj.at(key);
        if (!v.is_number()) {
            add(where + "." + key, "must be a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<uint64_t> unsigned_int(const njson& obj, const std::string& where,
                                         const char* key) {
        if (!obj.contains(key)) return std::nullopt;
        const njson& v = obj.at(key);
        if (!v.is_number_unsigned()) {
            add(where + "." + key, "must be a non-negative integer");
            return std::nullopt;
        }
        return v.get<uint64_t>();
    }

    std::optional<std::string> string(const njson& obj, const std::string& where,
                                      const char* key) {
        if (!obj.contains(key)) return std::nullopt;
        const njson& v = obj.at(key);
        if (!v.is_string()) {
            add(where + "." + key, "must be a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    std::optional<uint8_t> bit_value(const njson& obj, const std::string& where,
                                     const char* key) {
        auto v = unsigned_int(obj, where, key);
        if (!v) return std::nullopt;
        if (*v > 1) {
            add(where + "." + key, "must be 0 or 1");
            return std::nullopt;
        }
        return static_cast<uint8_t>(*v);
    }

    std::optional<std::size_t> index(const njson& obj, const std::string& where,
                                     const char* key, std::size_t bound,
                                     const char* bound_name) {
        auto v = unsigned_int(obj, where, key);
        if (!v) return std::nullopt;
        if (*v >= bound) {
            std::ostringstream msg;
            msg << *v << " outside array with " << bound << " " << bound_name;
            add(where + "." + key, msg.str());
            return std::nullopt;
        }
        return static_cast<std::size_t>(*v);
    }

    bool require(const njson& obj, const std::string& where, const char* key) {
        if (obj.contains(key)) return true;
        add(where, std::string("missing required field \"") + key + "\"");
        return false;
    }
};

bool valid_label(const std::string& label) {
    if (label.empty()) return false;
    for (char c : label) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

void parse_device(Checker& ck, const njson& obj, QaheParams& device) {
    ck.known_keys(obj, "device", {"i_c_plus_a", "i_c_minus_a", "r_quantum_ohm", "r_series_ohm"});
    if (auto v = ck.number(obj, "device", "i_c_plus_a")) device.i_c_plus_a = *v;
    if (auto v = ck.number(obj, "device", "i_c_minus_a")) device.i_c_minus_a = *v;
    if (auto v = ck.number(obj, "device", "r_quantum_ohm")) device.r_quantum_ohm = *v;
    if (auto v = ck.number(obj, "device", "r_series_ohm")) device.r_series_ohm = *v;
    try {
        device.validate();
    } catch (const std::exception& e) {
        ck.add("device", e.what());
    }
}

void parse_bias(Checker& ck, const njson& obj, BiasConfig& bias) {
    ck.known_keys(obj, "bias", {"v_read_v", "v_write_v", "cycle_time_s"});
    if (auto v = ck.number(obj, "bias", "v_read_v")) bias.v_read_v = *v;
    if (auto v = ck.number(obj, "bias", "v_write_v")) bias.v_write_v = *v;
    if (auto v = ck.number(obj, "bias", "cycle_time_s")) bias.cycle_time_s = *v;
    try {
        bias.validate();
    } catch (const std::exception& e) {
        ck.add("bias", e.what());
    }
}

void parse_sense(Checker& ck, const njson& obj, SenseConfig& sense) {
    ck.known_keys(obj, "sense", {"gain", "v_dd_v", "references"});
    if (auto v = ck.number(obj, "sense", "gain")) sense.gain = *v;
    if (auto v = ck.number(obj, "sense", "v_dd_v")) sense.v_dd_v = *v;
    if (const njson* refs = ck.object(obj, "sense", "references")) {
        for (auto it = refs->begin(); it != refs->end(); ++it) {
            const std::string where = "sense.references." + it.key();
            Opcode op;
            try {
                op = opcode_from_string(it.key());
            } catch (const std::exception& e) {
                ck.add(where, e.what());
                continue;
            }
            const njson& pair = it.value();
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
                !pair[1].is_number()) {
                ck.add(where, "must be an array of two numbers [v_ref1, v_ref2]");
                continue;
            }
            sense.references[op] = {pair[0].get<double>(), pair[1].get<double>()};
        }
    }
    try {
        sense.validate();
    } catch (const std::exception& e) {
        ck.add("sense", e.what());
    }
}

void parse_variation(Checker& ck, const njson& obj, VariationConfig& variation) {
    ck.known_keys(obj, "variation",
                  {"nominal_read_current_a", "relative_sigma", "n_trials", "seed", "mode",
                   "shape", "n_threads"});
    if (auto v = ck.number(obj, "variation", "nominal_read_current_a")) {
        variation.nominal_read_current_a = *v;
    }
    if (auto v = ck.number(obj, "variation", "relative_sigma")) variation.relative_sigma = *v;
    if (auto v = ck.unsigned_int(obj, "variation", "n_trials")) {
        variation.n_trials = static_cast<std::size_t>(*v);
    }
    if (auto v = ck.unsigned_int(obj, "variation", "seed")) variation.seed = *v;
    if (auto v = ck.string(obj, "variation", "mode")) {
        try {
            variation.mode = variation_mode_from_string(*v);
        } catch (const std::exception& e) {
            ck.add("variation.mode", e.what());
        }
    }
    if (auto v = ck.string(obj, "variation", "shape")) {
        try {
            variation.shape = noise_shape_from_string(*v);
        } catch (const std::exception& e) {
            ck.add("variation.shape", e.what());
        }
    }
    if (auto v = ck.unsigned_int(obj, "variation", "n_threads")) {
        variation.n_threads = static_cast<unsigned>(*v);
    }
    try {
        variation.validate();
    } catch (const std::exception& e) {
        ck.add("variation", e.what());
    }
}

std::optional<Opcode> parse_logic_opcode(Checker& ck, const njson& obj,
                                         const std::string& where) {
    if (!ck.require(obj, where, "opcode")) return std::nullopt;
    auto name = ck.string(obj, where, "opcode");
    if (!name) return std::nullopt;
    Opcode op;
    try {
        op = opcode_from_string(*name);
    } catch (const std::exception& e) {
        ck.add(where + ".opcode", e.what());
        return std::nullopt;
    }
    if (op == Opcode::Read) {
        ck.add(where + ".opcode", "logic operations accept NAND, NOR, or XOR only");
        return std::nullopt;
    }
    return op;
}

void parse_script_op(Checker& ck, const njson& obj, std::size_t k, const Scenario& sc,
                     std::set<std::string>& labels, ScenarioOp& op) {
    const std::string where = "script[" + std::to_string(k) + "]";
    if (!obj.is_object()) {
        ck.add(where, "must be an object");
        return;
    }
    if (!ck.require(obj, where, "op")) return;
    auto op_name = ck.string(obj, where, "op");
    if (!op_name) return;
    auto kind = kind_from_string(*op_name);
    if (!kind) {
        ck.add(where + ".op", "unknown operation \"" + *op_name + "\"");
        return;
    }
    op.kind = *kind;

    static const std::map<ScenarioOp::Kind, std::set<std::string>> allowed = {
        {ScenarioOp::Kind::Write, {"op", "row", "col", "bit"}},
        {ScenarioOp::Kind::Read, {"op", "row", "col"}},
        {ScenarioOp::Kind::Logic, {"op", "row", "col_a", "col_b", "opcode"}},
        {ScenarioOp::Kind::ParallelLogic, {"op", "rows", "col_a", "col_b", "opcode"}},
        {ScenarioOp::Kind::McReadCurrent, {"op", "label"}},
        {ScenarioOp::Kind::McCellHall, {"op", "label", "bit"}},
        {ScenarioOp::Kind::McRow, {"op", "label", "bits"}},
        {ScenarioOp::Kind::McMargin, {"op", "label"}},
        {ScenarioOp::Kind::HysteresisSweep,
         {"op", "label", "i_start_a", "i_end_a", "n_points"}},
        {ScenarioOp::Kind::Snapshot, {"op", "label"}},
    };
    ck.known_keys(obj, where, allowed.at(op.kind));

    auto need_label = [&]() {
        if (!ck.require(obj, where, "label")) return;
        auto label = ck.string(obj, where, "label");
        if (!label) return;
        if (!valid_label(*label)) {
            ck.add(where + ".label",
                   "must be non-empty and use only letters, digits, '_' or '-'");
            return;
        }
        if (!labels.insert(*label).second) {
            ck.add(where + ".label", "duplicate label \"" + *label + "\"");
            return;
        }
        op.label = *label;
    };

    switch (op.kind) {
        case ScenarioOp::Kind::Write:
            if (ck.require(obj, where, "row")) {
                if (auto v = ck.index(obj, where, "row", sc.rows, "rows")) op.row = *v;
            }
            if (ck.require(obj, where, "col")) {
                if (auto v = ck.index(obj, where, "col", sc.cols, "columns")) op.col = *v;
            }
            if (ck.require(obj, where, "bit")) {
                if (auto v = ck.bit_value(obj, where, "bit")) op.bit = *v;
            }
            break;
        case ScenarioOp::Kind::Read:
            if (ck.require(obj, where, "row")) {
                if (auto v = ck.index(obj, where, "row", sc.rows, "rows")) op.row = *v;
            }
            if (ck.require(obj, where, "col")) {
                if (auto v = ck.index(obj, where, "col", sc.cols, "columns")) op.col = *v;
            }
            break;
        case ScenarioOp::Kind::Logic:
        case ScenarioOp::Kind::ParallelLogic: {
            if (op.kind == ScenarioOp::Kind::Logic) {
                if (ck.require(obj, where, "row")) {
                    if (auto v = ck.index(obj, where, "row", sc.rows, "rows")) op.row = *v;
                }
            } else if (obj.contains("rows")) {
                const njson& rows = obj.at("rows");
                if (!rows.is_array() || rows.empty()) {
                    ck.add(where + ".rows", "must be a non-empty array of row indices");
                } else {
                    for (std::size_t i = 0; i < rows.size(); ++i) {
                        const njson& r = rows[i];
                        if (!r.is_number_unsigned() || r.get<uint64_t>() >= sc.rows) {
                            ck.add(where + ".rows[" + std::to_string(i) + "]",
                                   "must be a row index below " + std::to_string(sc.rows));
                        } else {
                            op.rows.push_back(static_cast<std::size_t>(r.get<uint64_t>()));
                        }
                    }
                }
            }
            if (ck.require(obj, where, "col_a")) {
                if (auto v = ck.index(obj, where, "col_a", sc.cols, "columns")) op.col_a = *v;
            }
            if (ck.require(obj, where, "col_b")) {
                if (auto v = ck.index(obj, where, "col_b", sc.cols, "columns")) op.col_b = *v;
            }
            if (obj.contains("col_a") && obj.contains("col_b") && op.col_a == op.col_b) {
                ck.add(where, "col_a and col_b must be distinct columns");
            }
            if (auto parsed = parse_logic_opcode(ck, obj, where)) op.opcode = *parsed;
            break;
        }
        case ScenarioOp::Kind::McReadCurrent:
        case ScenarioOp::Kind::McMargin:
        case ScenarioOp::Kind::Snapshot:
            need_label();
            break;
        case ScenarioOp::Kind::McCellHall:
            need_label();
            if (ck.require(obj, where, "bit")) {
                if (auto v = ck.bit_value(obj, where, "bit")) op.bit = *v;
            }
            break;
        case ScenarioOp::Kind::McRow: {
            need_label();
            if (ck.require(obj, where, "bits")) {
                auto bits = ck.string(obj, where, "bits");
                if (bits) {
                    if (bits->size() != 2 || (*bits)[0] < '0' || (*bits)[0] > '1' ||
                        (*bits)[1] < '0' || (*bits)[1] > '1') {
                        ck.add(where + ".bits", "must be \"00\", \"01\", \"10\", or \"11\"");
                    } else {
                        op.bit_a = static_cast<uint8_t>((*bits)[0] - '0');
                        op.bit_b = static_cast<uint8_t>((*bits)[1] - '0');
                    }
                }
            }
            break;
        }
        case ScenarioOp::Kind::HysteresisSweep: {
            need_label();
            if (auto v = ck.number(obj, where, "i_start_a")) op.i_start_a = *v;
            if (auto v = ck.number(obj, where, "i_end_a")) op.i_end_a = *v;
            if (auto v = ck.unsigned_int(obj, where, "n_points")) {
                if (*v < 2) {
                    ck.add(where + ".n_points", "must be at least 2");
                } else {
                    op.n_points = static_cast<std::size_t>(*v);
                }
            }
            break;
        }
    }
}

Scenario parse_scenario(const njson& j, const fs::path& base_dir,
                        std::vector<std::string>& violations) {
    Checker ck{violations};
    Scenario sc;
    if (!j.is_object()) {
        ck.add("scenario", "top level must be a JSON object");
        return sc;
    }
    ck.known_keys(j, "scenario",
                  {"name", "rows", "cols", "device", "selector_table", "bias", "sense",
                   "variation", "script"});

    if (auto v = ck.string(j, "scenario", "name")) sc.name = *v;
    if (auto v = ck.unsigned_int(j, "scenario", "rows")) {
        if (*v < 1) {
            ck.add("scenario.rows", "must be at least 1");
        } else {
            sc.rows = static_cast<std::size_t>(*v);
        }
    }
    if (auto v = ck.unsigned_int(j, "scenario", "cols")) {
        if (*v < 1) {
            ck.add("scenario.cols", "must be at least 1");
        } else {
            sc.cols = static_cast<std::size_t>(*v);
        }
    }
    if (const njson* obj = ck.object(j, "scenario", "device")) parse_device(ck, *obj, sc.device);
    if (auto v = ck.string(j, "scenario", "selector_table")) sc.selector_table = *v;
    if (sc.selector_table != "default-synthetic") {
        fs::path p(sc.selector_table);
        if (p.is_relative()) p = base_dir / p;
        if (!fs::exists(p)) {
            ck.add("selector_table", "file not found: " + p.string());
        }
        sc.selector_table = p.string();
    }
    if (const njson* obj = ck.object(j, "scenario", "bias")) parse_bias(ck, *obj, sc.bias);
    if (const njson* obj = ck.object(j, "scenario", "sense")) parse_sense(ck, *obj, sc.sense);
    if (const njson* obj = ck.object(j, "scenario", "variation")) {
        parse_variation(ck, *obj, sc.variation);
    }

    if (j.contains("script")) {
        const njson& script = j.at("script");
        if (!script.is_array()) {
            ck.add("script", "must be an array");
        } else {
            std::set<std::string> labels;
            for (std::size_t k = 0; k < script.size(); ++k) {
                ScenarioOp op;
                parse_script_op(ck, script[k], k, sc, labels, op);
                sc.script.push_back(std::move(op));
            }
        }
    }
    return sc;
}

std::optional<njson> read_json_file(const std::string& path,
                                    std::vector<std::string>& violations) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        violations.push_back("file: cannot open " + path);
        return std::nullopt;
    }
    njson j = njson::parse(in, nullptr, false);
    if (j.is_discarded()) {
        violations.push_back("file: " + path + " is not valid JSON");
        return std::nullopt;
    }
    return j;
}

std::string header_line(const Scenario& sc) {
    std::ostringstream line;
    line << "# cryocim " << kVersion << " seed=" << sc.variation.seed;
    return line.str();
}

std::string meta_line(const Scenario& sc) {
    nlohmann::ordered_json meta;
    meta["tool_version"] = kVersion;
    meta["seed"] = sc.variation.seed;
    meta["scenario"] = sc.name;
    return meta.dump();
}

std::ofstream open_artifact(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file " + path.string());
    return out;
}

void write_distribution_artifacts(const fs::path& dir, const Scenario& sc,
                                  const ScenarioOp& op, const char* kind,
                                  const Distribution& dist) {
    auto csv = open_artifact(dir / (op.label + "_samples.csv"));
    csv << header_line(sc) << '\n';
    csv << "sample_index,value\n";
    for (std::size_t i = 0; i < dist.samples.size(); ++i) {
        csv << i << ',' << format_double(dist.samples[i]) << '\n';
    }

    nlohmann::ordered_json j;
    j["tool_version"] = kVersion;
    j["seed"] = sc.variation.seed;
    j["label"] = op.label;
    j["kind"] = kind;
    if (op.kind == ScenarioOp::Kind::McCellHall) j["bit"] = static_cast<int>(op.bit);
    if (op.kind == ScenarioOp::Kind::McRow) {
        j["bits"] = std::string(1, char('0' + op.bit_a)) + char('0' + op.bit_b);
    }
    j["n"] = dist.samples.size();
    j["mean"] = dist.mean;
    j["std_dev"] = dist.std_dev;
    j["min"] = dist.min;
    j["max"] = dist.max;
    j["bin_edges"] = dist.bin_edges;
    j["bin_counts"] = dist.bin_counts;
    auto summary = open_artifact(dir / (op.label + "_summary.json"));
    summary << j.dump() << '\n';
}

std::string summarize_distribution(const Distribution& dist) {
    std::ostringstream s;
    s << "n=" << dist.samples.size() << " mean=" << format_double(dist.mean)
      << " std=" << format_double(dist.std_dev) << " min=" << format_double(dist.min)
      << " max=" << format_double(dist.max);
    return s.str();
}

std::string join_indices(const std::vector<std::size_t>& values) {
    std::ostringstream s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) s << ',';
        s << values[i];
    }
    return s.str();
}

std::string join_bits(const std::vector<uint8_t>& bits) {
    std::ostringstream s;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (i) s << ',';
        s << int(bits[i]);
    }
    return s.str();
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    std::vector<std::string> violations;
    auto j = read_json_file(path, violations);
    Scenario sc;
    if (j) {
        sc = parse_scenario(*j, fs::path(path).parent_path(), violations);
        if (!j->contains("name")) sc.name = fs::path(path).stem().string();
    }
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "scenario " << path << " has " << violations.size() << " violation(s):";
        for (const auto& v : violations) msg << "\n  - " << v;
        throw ParseError(msg.str());
    }
    return sc;
}

std::vector<std::string> check_scenario(const std::string& path) {
    std::vector<std::string> violations;
    auto j = read_json_file(path, violations);
    if (j) parse_scenario(*j, fs::path(path).parent_path(), violations);
    return violations;
}

void run_scenario(const Scenario& scenario, const std::string& out_dir) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);

    std::shared_ptr<const SelectorModel> selector;
    if (scenario.selector_table != "default-synthetic") {
        selector = std::make_shared<SelectorModel>(load_selector_table(scenario.selector_table));
    }
    OpsController ctl(ArrayState(scenario.rows, scenario.cols, scenario.device, selector),
                      scenario.bias, scenario.sense);

    auto trace_out = open_artifact(dir / "trace.jsonl");
    trace_out << meta_line(scenario) << '\n';

    std::vector<std::string> summary_lines;
    auto note = [&](std::size_t k, const std::string& text) {
        summary_lines.push_back("[" + std::to_string(k) + "] " + text);
    };

    for (std::size_t k = 0; k < scenario.script.size(); ++k) {
        const ScenarioOp& op = scenario.script[k];
        try {
            switch (op.kind) {
                case ScenarioOp::Kind::Write: {
                    OperationTrace trace = ctl.write_bit(op.row, op.col, op.bit);
                    trace_out << trace_to_json(trace) << '\n';
                    std::ostringstream s;
                    s << "write row=" << op.row << " col=" << op.col << " bit=" << int(op.bit)
                      << " per_cell_program_w=" << format_double(trace.power.per_cell_selected_w);
                    note(k, s.str());
                    break;
                }
                case ScenarioOp::Kind::Read: {
                    auto [bit, trace] = ctl.read_bit(op.row, op.col);
                    trace_out << trace_to_json(trace) << '\n';
                    std::ostringstream s;
                    s << "read row=" << op.row << " col=" << op.col << " -> " << int(bit)
                      << " per_cell_read_w=" << format_double(trace.power.per_cell_selected_w);
                    if (!trace.diagnostics.empty()) s << " [" << trace.diagnostics[0] << "]";
                    note(k, s.str());
                    break;
                }
                case ScenarioOp::Kind::Logic: {
                    auto [bit, trace] = ctl.logic_op(op.row, op.col_a, op.col_b, op.opcode);
                    trace_out << trace_to_json(trace) << '\n';
                    std::ostringstream s;
                    s << "logic " << to_string(op.opcode) << " row=" << op.row << " col_a="
                      << op.col_a << " col_b=" << op.col_b << " -> " << int(bit)
                      << " per_bit_w=" << format_double(trace.power.selected_power_w);
                    note(k, s.str());
                    break;
                }
                case ScenarioOp::Kind::ParallelLogic: {
                    std::vector<std::size_t> rows = op.rows;
                    if (rows.empty()) {
                        rows.resize(scenario.rows);
                        for (std::size_t r = 0; r < scenario.rows; ++r) rows[r] = r;
                    }
                    auto [bits, trace] = ctl.parallel_logic(rows, op.col_a, op.col_b, op.opcode);
                    trace_out << trace_to_json(trace) << '\n';
                    const double per_bit =
                        trace.power.selected_power_w / static_cast<double>(rows.size());
                    std::ostringstream s;
                    s << "parallel_logic " << to_string(op.opcode) << " rows="
                      << join_indices(rows) << " col_a=" << op.col_a << " col_b=" << op.col_b
                      << " -> " << join_bits(bits) << " per_bit_w=" << format_double(per_bit);
                    note(k, s.str());
                    break;
                }
                case ScenarioOp::Kind::McReadCurrent: {
                    Distribution dist =
                        make_distribution(sample_read_currents(scenario.variation));
                    write_distribution_artifacts(dir, scenario, op, "mc_read_current", dist);
                    note(k, "mc_read_current label=" + op.label + " " +
                                summarize_distribution(dist));
                    break;
                }
                case ScenarioOp::Kind::McCellHall: {
                    Distribution dist =
                        mc_cell_hall_voltage(scenario.variation, op.bit, scenario.device);
                    write_distribution_artifacts(dir, scenario, op, "mc_cell_hall", dist);
                    std::ostringstream s;
                    s << "mc_cell_hall bit=" << int(op.bit) << " label=" << op.label << " "
                      << summarize_distribution(dist);
                    note(k, s.str());
                    break;
                }
                case ScenarioOp::Kind::McRow: {
                    Distribution dist = mc_row_voltages(scenario.variation, op.bit_a, op.bit_b,
                                                        scenario.device, scenario.sense.gain);
                    write_distribution_artifacts(dir, scenario, op, "mc_row", dist);
                    std::ostringstream s;
                    s << "mc_row bits=" << int(op.bit_a) << int(op.bit_b) << " label="
                      << op.label << " " << summarize_distribution(dist);
                    note(k, s.str());
                    break;
                }
                case ScenarioOp::Kind::McMargin: {
                    const Distribution d00 = mc_row_voltages(scenario.variation, 0, 0,
                                                             scenario.device,
                                                             scenario.sense.gain);
                    const Distribution d01 = mc_row_voltages(scenario.variation, 0, 1,
                                                             scenario.device,
                                                             scenario.sense.gain);
                    const Distribution d11 = mc_row_voltages(scenario.variation, 1, 1,
                                                             scenario.device,
                                                             scenario.sense.gain);
                    const MarginReport report = margin_report(d00, d01, d11, scenario.sense);

                    nlohmann::ordered_json j;
                    j["tool_version"] = kVersion;
                    j["seed"] = scenario.variation.seed;
                    j["label"] = op.label;
                    auto entries = nlohmann::ordered_json::array();
                    double worst = 0.0;
                    bool first = true;
                    for (const MarginEntry& entry : report.entries) {
                        entries.push_back({{"opcode", to_string(entry.opcode)},
                                           {"reference", entry.reference},
                                           {"reference_v", entry.reference_v},
                                           {"worst_gap_v", entry.worst_gap_v},
                                           {"inside_observed_range",
                                            entry.inside_observed_range}});
                        if (first || entry.worst_gap_v < worst) worst = entry.worst_gap_v;
                        first = false;
                    }
                    j["entries"] = std::move(entries);
                    j["any_flag"] = report.any_flag;
                    auto out = open_artifact(dir / (op.label + ".json"));
                    out << j.dump() << '\n';

                    std::ostringstream s;
                    s << "mc_margin label=" << op.label << " worst_gap_v="
                      << format_double(worst) << " any_flag="
                      << (report.any_flag ? "true" : "false");
                    note(k, s.str());
                    break;
                }
                case ScenarioOp::Kind::HysteresisSweep: {
                    std::vector<double> sweep;
                    sweep.reserve(2 * op.n_points);
                    const double span = op.i_end_a - op.i_start_a;
                    for (std::size_t i = 0; i < op.n_points; ++i) {
                        sweep.push_back(op.i_start_a + span * static_cast<double>(i) /
                                                           static_cast<double>(op.n_points - 1));
                    }
                    for (std::size_t i = 0; i < op.n_points; ++i) {
                        sweep.push_back(op.i_end_a - span * static_cast<double>(i) /
                                                         static_cast<double>(op.n_points - 1));
                    }
                    auto csv = open_artifact(dir / (op.label + ".csv"));
                    csv << header_line(scenario) << '\n';
                    csv << "step,i_bias_a,bit\n";
                    QaheCellState state{0};
                    std::size_t transitions = 0;
                    for (std::size_t i = 0; i < sweep.size(); ++i) {
                        const QaheCellState next = qahe_step(state, sweep[i], scenario.device);
                        if (next.bit != state.bit) ++transitions;
                        state = next;
                        csv << i << ',' << format_double(sweep[i]) << ',' << int(state.bit)
                            << '\n';
                    }
                    std::ostringstream s;
                    s << "hysteresis_sweep label=" << op.label << " points=" << sweep.size()
                      << " transitions=" << transitions;
                    note(k, s.str());
                    break;
                }
                case ScenarioOp::Kind::Snapshot: {
                    nlohmann::ordered_json j =
                        nlohmann::ordered_json::parse(ctl.array().snapshot_json());
                    nlohmann::ordered_json wrapped;
                    wrapped["tool_version"] = kVersion;
                    wrapped["seed"] = scenario.variation.seed;
                    wrapped["rows"] = j["rows"];
                    wrapped["cols"] = j["cols"];
                    wrapped["bits"] = j["bits"];
                    auto out = open_artifact(dir / (op.label + ".json"));
                    out << wrapped.dump() << '\n';
                    note(k, "snapshot label=" + op.label + " file=" + op.label + ".json");
                    break;
                }
            }
        } catch (const std::exception& e) {
            throw Error("operation " + std::to_string(k) + " (" + kind_name(op.kind) +
                        "): " + e.what());
        }
    }

    auto summary = open_artifact(dir / "summary.txt");
    summary << header_line(scenario) << '\n';
    summary << "scenario=" << scenario.name << " rows=" << scenario.rows
            << " cols=" << scenario.cols << " operations=" << scenario.script.size() << '\n';
    for (const auto& line : summary_lines) summary << line << '\n';
}

}  // namespace cryocim
