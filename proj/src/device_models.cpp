#include "cryocim/device_models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "cryocim/errors.hpp"

namespace cryocim {

void QaheParams::validate() const {
    if (!(i_c_minus_a < 0.0) || !(i_c_plus_a > 0.0)) {
        throw std::invalid_argument(
            "QaheParams: thresholds must satisfy i_c_minus < 0 < i_c_plus");
    }
    if (!(r_quantum_ohm > 0.0)) {
        throw std::invalid_argument("QaheParams: r_quantum must be > 0");
    }
    if (!(r_series_ohm >= 0.0)) {
        throw std::invalid_argument("QaheParams: r_series must be >= 0");
    }
}

double hall_resistance(QaheCellState state, const QaheParams& params) {
    return state.bit ? params.r_quantum_ohm : -params.r_quantum_ohm;
}

QaheCellState qahe_step(QaheCellState state, double i_bias_a, const QaheParams& params) {
    if (i_bias_a <= params.i_c_minus_a) return QaheCellState{0};
    if (i_bias_a >= params.i_c_plus_a) return QaheCellState{1};
    return state;
}

double hall_voltage(QaheCellState state, double i_bias_a, const QaheParams& params) {
    // + 0.0 normalizes the -0.0 that a zero current would otherwise produce.
    return i_bias_a * hall_resistance(state, params) + 0.0;
}

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Interpolated current at parameter t in [0, 1] along the segment [a, b].
// Log-linear in |I| for same-sign nonzero endpoints, linear otherwise.
double segment_current(const SelectorSample& a, const SelectorSample& b, double t) {
    if (t <= 0.0) return a.current_a;
    if (t >= 1.0) return b.current_a;
    const int sa = sign_of(a.current_a);
    const int sb = sign_of(b.current_a);
    if (sa != 0 && sa == sb) {
        const double la = std::log(std::abs(a.current_a));
        const double lb = std::log(std::abs(b.current_a));
        return sa * std::exp(la + t * (lb - la));
    }
    return a.current_a + t * (b.current_a - a.current_a);
}

}  // namespace

SelectorModel::SelectorModel(std::vector<SelectorSample> samples)
    : samples_(std::move(samples)) {
    if (samples_.size() < 2) {
        throw ParseError("selector table needs at least 2 samples, got " +
                         std::to_string(samples_.size()));
    }
    for (std::size_t i = 1; i < samples_.size(); ++i) {
        if (!(samples_[i].voltage_v > samples_[i - 1].voltage_v)) {
            throw MonotonicityError("selector table row " + std::to_string(i + 1) +
                                    ": voltage " + std::to_string(samples_[i].voltage_v) +
                                    " does not increase over previous row");
        }
        if (samples_[i].current_a < samples_[i - 1].current_a) {
            throw MonotonicityError("selector table row " + std::to_string(i + 1) +
                                    ": current decreases over previous row");
        }
    }
}

double SelectorModel::current_at(double voltage_v) const {
    if (voltage_v < min_voltage() || voltage_v > max_voltage()) {
        std::ostringstream msg;
        msg << "selector query " << voltage_v << " V outside table span ["
            << min_voltage() << ", " << max_voltage() << "] V";
        throw RangeError(msg.str());
    }
    auto it = std::lower_bound(samples_.begin(), samples_.end(), voltage_v,
                               [](const SelectorSample& s, double v) { return s.voltage_v < v; });
    if (it != samples_.end() && it->voltage_v == voltage_v) return it->current_a;
    const SelectorSample& hi = *it;
    const SelectorSample& lo = *(it - 1);
    const double t = (voltage_v - lo.voltage_v) / (hi.voltage_v - lo.voltage_v);
    return segment_current(lo, hi, t);
}

SelectorModel load_selector_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open selector table: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ParseError("selector table is empty: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "voltage_v,current_a") {
        throw ParseError(path + ": expected header \"voltage_v,current_a\", got \"" + line + "\"");
    }

    std::vector<SelectorSample> samples;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError(path + " row " + std::to_string(row) + ": missing comma");
        }
        const std::string vs = line.substr(0, comma);
        const std::string is = line.substr(comma + 1);
        char* end = nullptr;
        const double v = std::strtod(vs.c_str(), &end);
        if (end == vs.c_str() || *end != '\0') {
            throw ParseError(path + " row " + std::to_string(row) + ": bad voltage \"" + vs + "\"");
        }
        const double i = std::strtod(is.c_str(), &end);
        if (end == is.c_str() || *end != '\0') {
            throw ParseError(path + " row " + std::to_string(row) + ": bad current \"" + is + "\"");
        }
        samples.push_back({v, i});
    }
    if (samples.empty()) throw ParseError(path + ": no data rows");
    try {
        return SelectorModel(std::move(samples));
    } catch (const MonotonicityError& e) {
        throw MonotonicityError(path + ": " + e.what());
    }
}

const SelectorModel& synthetic_miec_table() {
    static const SelectorModel model{{
        {-0.88, -0.0043606751398367685},
        {-0.85, -0.0013789665577957381},
        {-0.82, -0.0004360675139836751},
        {-0.79, -0.0001378966557795744},
        {-0.76, -4.3606751398367696e-05},
        {-0.73, -1.3789665577957382e-05},
        {-0.7, -4.360675139836751e-06},
        {-0.67, -1.378966557795744e-06},
        {-0.64, -4.360675139836769e-07},
        {-0.61, -1.3789665577957381e-07},
        {-0.58, -4.3606751398367514e-08},
        {-0.55, -1.3789665577957439e-08},
        {-0.5208195267895831, -4.5e-09},
        {-0.52, -4.3606751398367685e-09},
        {-0.49994785812986, -2.02e-09},
        {-0.49, -1.3789665577957382e-09},
        {-0.46, -4.36067513983676e-10},
        {-0.43, -1.378966557795741e-10},
        {-0.4, -4.36067513983676e-11},
        {-0.37, -1.378966557795741e-11},
        {-0.34, -4.36067513983676e-12},
        {-0.31, -1.378966557795741e-12},
        {-0.28, -4.36067513983676e-13},
        {-0.27, 0.0},
        {0.0, 0.0},
        {0.27, 0.0},
        {0.28, 4.36067513983676e-13},
        {0.31, 1.378966557795741e-12},
        {0.34, 4.36067513983676e-12},
        {0.37, 1.378966557795741e-11},
        {0.4, 4.36067513983676e-11},
        {0.43, 1.378966557795741e-10},
        {0.46, 4.36067513983676e-10},
        {0.49, 1.3789665577957382e-09},
        {0.49994785812986, 2.02e-09},
        {0.52, 4.3606751398367685e-09},
        {0.5208195267895831, 4.5e-09},
        {0.55, 1.3789665577957439e-08},
        {0.58, 4.3606751398367514e-08},
        {0.61, 1.3789665577957381e-07},
        {0.64, 4.360675139836769e-07},
        {0.67, 1.378966557795744e-06},
        {0.7, 4.360675139836751e-06},
        {0.73, 1.3789665577957382e-05},
        {0.76, 4.3606751398367696e-05},
        {0.79, 0.0001378966557795744},
        {0.82, 0.0004360675139836751},
        {0.85, 0.0013789665577957381},
        {0.88, 0.0043606751398367685},
    }};
    return model;
}

double solve_cell_current(double v_applied_v, const SelectorModel& selector,
                          const QaheParams& params) {
    const auto& s = selector.samples();
    const double r = params.r_series_ohm;
    const double tol = 0.5e-12 * std::max(1.0, std::abs(v_applied_v));

    // Residual of v = V_sel + I * r_series, increasing along the table.
    auto residual = [&](double v_sel, double i) { return v_sel + i * r - v_applied_v; };

    const double g_lo = residual(s.front().voltage_v, s.front().current_a);
    const double g_hi = residual(s.back().voltage_v, s.back().current_a);
    if (g_lo > tol || g_hi < -tol) {
        std::ostringstream msg;
        msg << "no bracket for applied bias " << v_applied_v
            << " V: composed characteristic spans [" << (s.front().voltage_v + s.front().current_a * r)
            << ", " << (s.back().voltage_v + s.back().current_a * r) << "] V";
        throw UnsolvableBiasError(msg.str());
    }

    // Binary search for the first knot with residual >= 0.
    std::size_t lo = 0, hi = s.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (residual(s[mid].voltage_v, s[mid].current_a) >= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if (std::abs(residual(s[lo].voltage_v, s[lo].current_a)) <= tol) return s[lo].current_a;
    if (std::abs(residual(s[hi].voltage_v, s[hi].current_a)) <= tol) return s[hi].current_a;

    // Bisect on the segment parameter; both V(t) and I(t) follow the
    // interpolation law, so steep segments stay well conditioned.
    const SelectorSample& a = s[lo];
    const SelectorSample& b = s[hi];
    double t_lo = 0.0, t_hi = 1.0;
    double t = 0.5, i_mid = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        t = 0.5 * (t_lo + t_hi);
        const double v_mid = a.voltage_v + t * (b.voltage_v - a.voltage_v);
        i_mid = segment_current(a, b, t);
        const double g = residual(v_mid, i_mid);
        if (std::abs(g) <= tol) break;
        if (g < 0.0) {
            t_lo = t;
        } else {
            t_hi = t;
        }
    }
    return i_mid;
}

}  // namespace cryocim
