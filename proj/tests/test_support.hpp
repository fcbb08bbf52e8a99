#pragma once

// Shared helpers for the test binaries: randomized selector tables and an
// independent KVL-residual oracle for the series-cell solver.

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "cryocim/device_models.hpp"

namespace cryocim::testing {

/// Random strictly-monotone selector table with no zero-current plateaus and
/// well-separated currents, so the voltage-at-current inverse is unique and
/// numerically benign.
inline std::vector<SelectorSample> random_monotone_table(std::mt19937& rng) {
    std::uniform_int_distribution<int> n_dist(2, 12);
    std::uniform_real_distribution<double> v_step(0.02, 0.15);
    std::uniform_real_distribution<double> ratio(1.5, 40.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    const int n = n_dist(rng);
    std::vector<double> voltages(n);
    double v = -1.0 + u01(rng);
    for (int i = 0; i < n; ++i) {
        voltages[i] = v;
        v += v_step(rng);
    }

    // Currents: strictly increasing, either all same sign or crossing zero
    // between two knots. Built outward from the sign boundary so segment
    // ratios stay comfortably away from 1.
    std::vector<double> currents(n);
    const int n_negative = std::uniform_int_distribution<int>(0, n)(rng);
    double magnitude = 1e-9 * std::pow(10.0, 3.0 * u01(rng));
    for (int i = n_negative - 1; i >= 0; --i) {
        currents[i] = -magnitude;
        magnitude *= ratio(rng);
    }
    magnitude = 1e-9 * std::pow(10.0, 3.0 * u01(rng));
    for (int i = n_negative; i < n; ++i) {
        currents[i] = magnitude;
        magnitude *= ratio(rng);
    }

    std::vector<SelectorSample> samples(n);
    for (int i = 0; i < n; ++i) samples[i] = {voltages[i], currents[i]};
    return samples;
}

/// Selector voltage at a given current, inverted independently of the solver
/// through the same interpolation law (log-linear on same-sign segments,
/// linear on segments touching or crossing zero). Requires strictly
/// increasing sample currents.
inline double selector_voltage_at_current(const SelectorModel& model, double current_a) {
    const auto& s = model.samples();
    if (current_a < s.front().current_a || current_a > s.back().current_a) {
        throw std::out_of_range("current outside table span");
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].current_a == current_a) return s[i].voltage_v;
    }
    std::size_t hi = 1;
    while (s[hi].current_a < current_a) ++hi;
    const SelectorSample& a = s[hi - 1];
    const SelectorSample& b = s[hi];
    double t;
    const bool same_sign = (a.current_a > 0.0) == (b.current_a > 0.0) && a.current_a != 0.0 &&
                           b.current_a != 0.0;
    if (same_sign) {
        const double la = std::log(std::abs(a.current_a));
        const double lb = std::log(std::abs(b.current_a));
        t = (std::log(std::abs(current_a)) - la) / (lb - la);
    } else {
        t = (current_a - a.current_a) / (b.current_a - a.current_a);
    }
    return a.voltage_v + t * (b.voltage_v - a.voltage_v);
}

/// |V_sel(I) + I * r_series - v_applied| via the independent inverse map.
inline double kvl_residual(const SelectorModel& model, const QaheParams& params,
                           double v_applied_v, double i_solved_a) {
    const double v_sel = selector_voltage_at_current(model, i_solved_a);
    return std::abs(v_sel + i_solved_a * params.r_series_ohm - v_applied_v);
}

}  // namespace cryocim::testing
