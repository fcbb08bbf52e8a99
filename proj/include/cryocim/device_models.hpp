#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cryocim {

/// Parameters of the hysteretic Hall-effect memory element.
///
/// The element stores one bit in the sign of its quantized Hall resistance
/// (-r_quantum_ohm for bit 0, +r_quantum_ohm for bit 1, never anything in
/// between). It switches to bit 0 when the bias current drops to
/// i_c_minus_a or below, to bit 1 when it reaches i_c_plus_a or above, and
/// keeps its state for any current strictly between the two thresholds.
///
/// r_series_ohm is the state-independent two-terminal resistance the
/// element presents in the bias-current path; the Hall probes are ideal
/// (they draw no current), so the stored bit never affects the series path.
struct QaheParams {
    double i_c_plus_a = 3e-9;          ///< positive switching threshold, > 0
    double i_c_minus_a = -3e-9;        ///< negative switching threshold, < 0
    double r_quantum_ohm = 25812.807;  ///< |quantized Hall resistance|, h/e^2
    double r_series_ohm = 25812.807;   ///< series resistance in the bias path, >= 0

    /// Throws std::invalid_argument if the threshold signs or resistances
    /// are out of range.
    void validate() const;
};

/// State of one memory cell: the stored logic value.
struct QaheCellState {
    std::uint8_t bit = 0;  // 0 or 1
};

/// Signed Hall resistance of the cell: -r_quantum for bit 0, +r_quantum
/// for bit 1.
double hall_resistance(QaheCellState state, const QaheParams& params);

/// Advance the cell state by one bias step. Threshold comparisons are
/// inclusive: i_bias <= i_c_minus writes 0, i_bias >= i_c_plus writes 1,
/// anything strictly in between leaves the state untouched.
QaheCellState qahe_step(QaheCellState state, double i_bias_a, const QaheParams& params);

/// Transverse Hall voltage V = I * R_hall. For a negative read current a
/// stored 0 produces a positive voltage and a stored 1 a negative one.
double hall_voltage(QaheCellState state, double i_bias_a, const QaheParams& params);

/// One sample of the selector's I-V characteristic.
struct SelectorSample {
    double voltage_v = 0.0;
    double current_a = 0.0;
};

/// Look-up-table model of the two-terminal selector.
///
/// Samples must have strictly increasing voltages and non-decreasing
/// currents. Between samples the current is interpolated log-linearly in
/// |I| with the sign preserved; any segment that touches a zero-current
/// sample or spans a sign change falls back to linear interpolation.
/// Queries at a sample voltage return that sample's current exactly.
class SelectorModel {
public:
    /// Validates and takes ownership of the sample table. Throws ParseError
    /// for fewer than two samples and MonotonicityError (naming the row)
    /// for ordering violations.
    explicit SelectorModel(std::vector<SelectorSample> samples);

    /// Interpolated current at the given voltage. Throws RangeError,
    /// identifying the span, for queries outside [min_voltage, max_voltage].
    double current_at(double voltage_v) const;

    double min_voltage() const { return samples_.front().voltage_v; }
    double max_voltage() const { return samples_.back().voltage_v; }
    const std::vector<SelectorSample>& samples() const { return samples_; }

private:
    std::vector<SelectorSample> samples_;
};

/// Load a selector table from a CSV file with header "voltage_v,current_a".
/// Accepts decimal or scientific notation. Throws ParseError for syntax
/// problems and MonotonicityError for out-of-order rows.
SelectorModel load_selector_table(const std::string& path);

/// The bundled synthetic selector table (also shipped as
/// data/miec_selector_synthetic.csv). Zero current up to |V| = 0.27 V, then
/// an odd-symmetric exponential branch covering ten decades up to |V| =
/// 0.88 V. The values are frozen; the default bias voltages are tuned
/// against them.
const SelectorModel& synthetic_miec_table();

/// Solve the series composition of selector and memory element for the cell
/// current I at a given applied voltage: v = V_selector(I) + I * r_series.
///
/// The composed characteristic is monotone, so the root is found by
/// bracketed bisection (first across table knots, then inside one segment).
/// The returned current satisfies
///   |v - V_sel(I) - I * r_series| <= 1e-12 * max(1, |v|).
/// Throws UnsolvableBiasError when the applied voltage lies outside the
/// range the table can absorb.
double solve_cell_current(double v_applied_v, const SelectorModel& selector,
                          const QaheParams& params);

}  // namespace cryocim
