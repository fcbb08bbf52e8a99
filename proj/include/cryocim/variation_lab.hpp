#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cryocim/device_models.hpp"
#include "cryocim/sense_chain.hpp"

namespace cryocim {

/// How read-current noise maps onto the two operand cells of a row.
/// SharedPerTrial draws one current per trial and applies it to both cells,
/// so complementary rows cancel exactly; PerCell draws independently.
enum class VariationMode { SharedPerTrial, PerCell };

/// Perturbation distribution family (zero mean, unit variance before
/// scaling).
enum class NoiseShape { Gaussian, Uniform };

const char* to_string(VariationMode mode);
const char* to_string(NoiseShape shape);
VariationMode variation_mode_from_string(const std::string& name);
NoiseShape noise_shape_from_string(const std::string& name);

/// Monte-Carlo study configuration.
struct VariationConfig {
    double nominal_read_current_a = -2.02e-9;
    double relative_sigma = 0.10;  ///< sigma as a fraction of |nominal|
    std::size_t n_trials = 10000;
    uint64_t seed = 1;
    VariationMode mode = VariationMode::SharedPerTrial;
    NoiseShape shape = NoiseShape::Gaussian;
    unsigned n_threads = 0;  ///< 0 = hardware concurrency

    void validate() const;
};

/// Counter-based random stream: every (seed, counter) pair maps to one
/// fixed word, so samples are addressable by trial and independent of
/// evaluation order or thread count. Returns a uniform double in (0, 1).
double variation_u01(uint64_t seed, uint64_t counter);

/// Zero-mean unit-variance draw for (trial, slot). Slot 0/1 pick the cell
/// within a row; the two slots never share counters.
double variation_draw(uint64_t seed, uint64_t trial, uint64_t slot, NoiseShape shape);

/// Samples plus summary statistics and a fixed-bin histogram.
struct Distribution {
    std::vector<double> samples;
    double mean = 0.0;
    double std_dev = 0.0;  ///< unbiased (n-1); 0 when n == 1
    double min = 0.0;
    double max = 0.0;
    std::vector<double> bin_edges;        ///< n_bins + 1 uniform edges over [min, max]
    std::vector<std::size_t> bin_counts;  ///< sums to samples.size()
};

/// Summarize samples into a Distribution with n_bins uniform bins.
Distribution make_distribution(std::vector<double> samples, std::size_t n_bins = 50);

/// Per-trial perturbed read currents (slot 0 of each trial).
std::vector<double> sample_read_currents(const VariationConfig& cfg);

/// Per-trial Hall voltage of a single cell storing `bit`, using the same
/// currents as sample_read_currents (exact elementwise correspondence).
Distribution mc_cell_hall_voltage(const VariationConfig& cfg, uint8_t bit,
                                  const QaheParams& params = {});

/// Per-trial amplified row voltage for a two-cell operand row storing
/// (bit_a, bit_b). In SharedPerTrial mode both cells carry the trial's one
/// current, so complementary rows are exactly 0 in every trial.
Distribution mc_row_voltages(const VariationConfig& cfg, uint8_t bit_a, uint8_t bit_b,
                             const QaheParams& params = {}, double gain = 1000.0);

/// One reference voltage checked against the observed row-voltage levels.
struct MarginEntry {
    Opcode opcode = Opcode::Nand;
    std::string reference;          ///< "v_ref1" or "v_ref2"
    double reference_v = 0.0;
    double worst_gap_v = 0.0;       ///< distance to the nearest observed extremum;
                                    ///< negative = inside a distribution's range
    bool inside_observed_range = false;
};

/// Margin summary for the three logic levels against the logic opcode
/// references (NAND, NOR, XOR; the read window senses single-cell levels,
/// not these row levels, so it is not judged here).
struct MarginReport {
    std::vector<MarginEntry> entries;
    bool any_flag = false;
};

MarginReport margin_report(const Distribution& level_00, const Distribution& level_mixed,
                           const Distribution& level_11, const SenseConfig& sense);

}  // namespace cryocim
