#include "cryocim/variation_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <utility>

namespace cryocim {

const char* to_string(VariationMode mode) {
    switch (mode) {
        case VariationMode::SharedPerTrial: return "shared_per_trial";
        case VariationMode::PerCell: return "per_cell";
    }
    return "unknown";
}

const char* to_string(NoiseShape shape) {
    switch (shape) {
        case NoiseShape::Gaussian: return "gaussian";
        case NoiseShape::Uniform: return "uniform";
    }
    return "unknown";
}

VariationMode variation_mode_from_string(const std::string& name) {
    if (name == "shared_per_trial") return VariationMode::SharedPerTrial;
    if (name == "per_cell") return VariationMode::PerCell;
    throw std::invalid_argument("unknown variation mode \"" + name +
                                "\" (expected shared_per_trial or per_cell)");
}

NoiseShape noise_shape_from_string(const std::string& name) {
    if (name == "gaussian") return NoiseShape::Gaussian;
    if (name == "uniform") return NoiseShape::Uniform;
    throw std::invalid_argument("unknown noise shape \"" + name +
                                "\" (expected gaussian or uniform)");
}

void VariationConfig::validate() const {
    if (!(relative_sigma >= 0.0)) throw std::invalid_argument("relative_sigma must be >= 0");
    if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
}

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Each trial owns four counters: two slots x two raw draws.
uint64_t draw_counter(uint64_t trial, uint64_t slot, uint64_t draw) {
    return trial * 4 + slot * 2 + draw;
}

// Fill samples[first, last) in parallel chunks. The generator is addressed
// by index, so the split cannot change any value.
template <typename Fn>
void parallel_fill(std::vector<double>& samples, unsigned n_threads, Fn&& per_index) {
    const std::size_t n = samples.size();
    unsigned hw = n_threads != 0 ? n_threads : std::thread::hardware_concurrency();
    if (hw < 1) hw = 1;
    hw = static_cast<unsigned>(std::min<std::size_t>(hw, n));
    if (hw <= 1) {
        for (std::size_t i = 0; i < n; ++i) samples[i] = per_index(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(hw);
    const std::size_t chunk = (n + hw - 1) / hw;
    for (unsigned t = 0; t < hw; ++t) {
        const std::size_t first = t * chunk;
        const std::size_t last = std::min(n, first + chunk);
        if (first >= last) break;
        workers.emplace_back([&samples, first, last, &per_index] {
            for (std::size_t i = first; i < last; ++i) samples[i] = per_index(i);
        });
    }
    for (auto& w : workers) w.join();
}

}  // namespace

double variation_u01(uint64_t seed, uint64_t counter) {
    const uint64_t word = mix64(seed + (counter + 1) * kGolden);
    // 53 mantissa bits, offset half a step: strictly inside (0, 1).
    return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
}

double variation_draw(uint64_t seed, uint64_t trial, uint64_t slot, NoiseShape shape) {
    const double u1 = variation_u01(seed, draw_counter(trial, slot, 0));
    if (shape == NoiseShape::Uniform) {
        // Width sqrt(12) gives unit variance.
        return (u1 - 0.5) * 3.4641016151377544;
    }
    const double u2 = variation_u01(seed, draw_counter(trial, slot, 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

Distribution make_distribution(std::vector<double> samples, std::size_t n_bins) {
    if (samples.empty()) throw std::invalid_argument("distribution needs at least one sample");
    if (n_bins < 1) throw std::invalid_argument("histogram needs at least one bin");

    Distribution dist;
    dist.samples = std::move(samples);
    const std::size_t n = dist.samples.size();

    dist.mean = std::accumulate(dist.samples.begin(), dist.samples.end(), 0.0) /
                static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (double x : dist.samples) {
            const double d = x - dist.mean;
            ss += d * d;
        }
        dist.std_dev = std::sqrt(ss / static_cast<double>(n - 1));
    }
    const auto [lo, hi] = std::minmax_element(dist.samples.begin(), dist.samples.end());
    dist.min = *lo;
    dist.max = *hi;

    dist.bin_edges.resize(n_bins + 1);
    const double width = (dist.max - dist.min) / static_cast<double>(n_bins);
    for (std::size_t b = 0; b <= n_bins; ++b) {
        dist.bin_edges[b] = dist.min + width * static_cast<double>(b);
    }
    dist.bin_edges.back() = dist.max;

    dist.bin_counts.assign(n_bins, 0);
    for (double x : dist.samples) {
        std::size_t idx = 0;
        if (width > 0.0) {
            idx = static_cast<std::size_t>((x - dist.min) / width);
            if (idx >= n_bins) idx = n_bins - 1;  // max lands in the last bin
        }
        ++dist.bin_counts[idx];
    }
    return dist;
}

std::vector<double> sample_read_currents(const VariationConfig& cfg) {
    cfg.validate();
    const double sigma = cfg.relative_sigma * std::abs(cfg.nominal_read_current_a);
    std::vector<double> currents(cfg.n_trials);
    parallel_fill(currents, cfg.n_threads, [&](std::size_t trial) {
        return cfg.nominal_read_current_a +
               sigma * variation_draw(cfg.seed, trial, 0, cfg.shape);
    });
    return currents;
}

Distribution mc_cell_hall_voltage(const VariationConfig& cfg, uint8_t bit,
                                  const QaheParams& params) {
    if (bit > 1) throw std::invalid_argument("bit must be 0 or 1");
    params.validate();
    std::vector<double> samples = sample_read_currents(cfg);
    const QaheCellState state{bit};
    for (double& v : samples) v = hall_voltage(state, v, params);
    return make_distribution(std::move(samples));
}

Distribution mc_row_voltages(const VariationConfig& cfg, uint8_t bit_a, uint8_t bit_b,
                             const QaheParams& params, double gain) {
    if (bit_a > 1 || bit_b > 1) throw std::invalid_argument("bits must be 0 or 1");
    if (!(gain > 0.0)) throw std::invalid_argument("gain must be > 0");
    cfg.validate();
    params.validate();

    const double sigma = cfg.relative_sigma * std::abs(cfg.nominal_read_current_a);
    const QaheCellState cell_a{bit_a};
    const QaheCellState cell_b{bit_b};

    std::vector<double> samples(cfg.n_trials);
    parallel_fill(samples, cfg.n_threads, [&](std::size_t trial) {
        const double i_a = cfg.nominal_read_current_a +
                           sigma * variation_draw(cfg.seed, trial, 0, cfg.shape);
        const double i_b = cfg.mode == VariationMode::SharedPerTrial
                               ? i_a
                               : cfg.nominal_read_current_a +
                                     sigma * variation_draw(cfg.seed, trial, 1, cfg.shape);
        // Complementary bits at the shared current cancel exactly: the two
        // Hall voltages are the same product with opposite signs.
        const double row = hall_voltage(cell_a, i_a, params) + hall_voltage(cell_b, i_b, params);
        return gain * row + 0.0;
    });
    return make_distribution(std::move(samples));
}

namespace {

// Signed distance from v to the observed range: positive outside, negative
// penetration depth inside, 0 on a boundary.
double signed_gap(double v, const Distribution& dist) {
    if (v < dist.min) return dist.min - v;
    if (v > dist.max) return v - dist.max;
    return -std::min(v - dist.min, dist.max - v);
}

}  // namespace

MarginReport margin_report(const Distribution& level_00, const Distribution& level_mixed,
                           const Distribution& level_11, const SenseConfig& sense) {
    sense.validate();
    const Distribution* levels[] = {&level_00, &level_mixed, &level_11};

    MarginReport report;
    for (Opcode op : {Opcode::Nand, Opcode::Nor, Opcode::Xor}) {
        const RefPair refs = select_references(op, sense);
        const std::pair<const char*, double> sides[] = {{"v_ref1", refs.v_ref1_v},
                                                        {"v_ref2", refs.v_ref2_v}};
        for (const auto& [name, v_ref] : sides) {
            MarginEntry entry;
            entry.opcode = op;
            entry.reference = name;
            entry.reference_v = v_ref;
            entry.worst_gap_v = signed_gap(v_ref, *levels[0]);
            for (int k = 1; k < 3; ++k) {
                entry.worst_gap_v = std::min(entry.worst_gap_v, signed_gap(v_ref, *levels[k]));
            }
            entry.inside_observed_range = entry.worst_gap_v <= 0.0;
            report.any_flag = report.any_flag || entry.inside_observed_range;
            report.entries.push_back(entry);
        }
    }
    return report;
}

}  // namespace cryocim
