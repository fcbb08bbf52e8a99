#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <random>
#include <stdexcept>
#include <string>

#include "cryocim/array_engine.hpp"
#include "cryocim/errors.hpp"

using namespace cryocim;

namespace {

std::shared_ptr<const SelectorModel> linear_selector() {
    // 1 kohm resistor as a table; segments touch zero, so interpolation is
    // linear and currents obey Ohm's law exactly.
    return std::make_shared<SelectorModel>(
        SelectorModel({{-1.0, -1e-3}, {0.0, 0.0}, {1.0, 1e-3}}));
}

ArrayState demo_array() {
    // Rows store 00, 01, 10, 11 in the first two columns.
    ArrayState array(4, 4);
    array.set_cell(1, 1, QaheCellState{1});
    array.set_cell(2, 0, QaheCellState{1});
    array.set_cell(3, 0, QaheCellState{1});
    array.set_cell(3, 1, QaheCellState{1});
    return array;
}

}  // namespace

TEST_CASE("array state stores bits with bounds checking and canonical snapshots") {
    ArrayState array(2, 2);
    CHECK(array.rows() == 2);
    CHECK(array.cols() == 2);
    CHECK(array.cell(0, 0).bit == 0);

    array.set_cell(0, 1, QaheCellState{1});
    array.set_cell(1, 0, QaheCellState{1});
    CHECK(array.cell(0, 1).bit == 1);
    CHECK(array.snapshot_json() == R"({"rows":2,"cols":2,"bits":[0,1,1,0]})");

    CHECK_THROWS_AS(array.cell(2, 0), std::out_of_range);
    CHECK_THROWS_AS(array.set_cell(0, 2, QaheCellState{1}), std::out_of_range);
    CHECK_THROWS_AS(ArrayState(0, 4), std::invalid_argument);

    ArrayState other(2, 2);
    CHECK_FALSE(array.same_bits(other));
    other.set_cell(0, 1, QaheCellState{1});
    other.set_cell(1, 0, QaheCellState{1});
    CHECK(array.same_bits(other));
    CHECK_FALSE(array.same_bits(ArrayState(2, 3)));
}

TEST_CASE("half-select scheme drives the accessed lines and halves the rest") {
    const double v = -0.5;
    const BiasScheme scheme = build_bias_scheme(CycleMode::Read, {0}, {0}, v, 4, 4);

    CHECK(scheme.bl_voltages_v[0] == v);
    CHECK(scheme.wl_voltages_v[0] == 0.0);
    for (std::size_t i = 1; i < 4; ++i) {
        CHECK(scheme.bl_voltages_v[i] == v / 2);
        CHECK(scheme.wl_voltages_v[i] == v / 2);
    }

    // Every cell sees exactly v, v/2, or 0.
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            const double bias = scheme.cell_bias_v(r, c);
            if (r == 0 && c == 0) {
                CHECK(bias == v);
            } else if (r == 0 || c == 0) {
                CHECK(bias == v / 2);
            } else {
                CHECK(bias == 0.0);
            }
        }
    }
}

TEST_CASE("zero full bias grounds every line") {
    const BiasScheme scheme = build_bias_scheme(CycleMode::Read, {2}, {3}, 0.0, 4, 4);
    for (double v : scheme.bl_voltages_v) CHECK(v == 0.0);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) CHECK(scheme.cell_bias_v(r, c) == 0.0);
    }
}

TEST_CASE("bias scheme construction rejects malformed targets") {
    CHECK_THROWS_AS(build_bias_scheme(CycleMode::Read, {4}, {0}, -0.5, 4, 4),
                    std::out_of_range);
    CHECK_THROWS_AS(build_bias_scheme(CycleMode::Read, {0}, {7}, -0.5, 4, 4),
                    std::out_of_range);
    CHECK_THROWS_AS(build_bias_scheme(CycleMode::Logic, {0}, {1}, -0.5, 4, 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_bias_scheme(CycleMode::Logic, {0}, {1, 1}, -0.5, 4, 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_bias_scheme(CycleMode::Logic, {0}, {0, 1, 2}, -0.5, 4, 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_bias_scheme(CycleMode::Write1, {0, 1}, {0}, 0.5, 4, 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_bias_scheme(CycleMode::Read, {}, {0}, -0.5, 4, 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_bias_scheme(CycleMode::Read, {0}, {}, -0.5, 4, 4),
                    std::invalid_argument);
}

TEST_CASE("cell currents: zero-bias cells carry exactly zero current") {
    const ArrayState array(4, 4);
    const BiasScheme scheme = build_bias_scheme(CycleMode::Read, {1}, {2}, 0.0, 4, 4);
    const CellCurrentMap map = compute_cell_currents(array, scheme);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            CHECK(map.current_at(r, c) == 0.0);
            CHECK(map.tag_at(r, c) == CellTag::Unselected);
        }
    }
}

TEST_CASE("cell currents: read scheme on the default table") {
    const ArrayState array(4, 4);
    const BiasScheme scheme = build_bias_scheme(CycleMode::Read, {0}, {0}, -0.5, 4, 4);
    const CellCurrentMap map = compute_cell_currents(array, scheme);

    CHECK(map.current_at(0, 0) == -2.02e-9);
    CHECK(map.tag_at(0, 0) == CellTag::Selected);

    std::size_t n_half = 0, n_unselected = 0;
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            if (r == 0 && c == 0) continue;
            if (map.tag_at(r, c) == CellTag::HalfSelected) {
                // Half-select bias sits on the selector's zero plateau.
                CHECK(map.current_at(r, c) == 0.0);
                ++n_half;
            } else {
                CHECK(map.tag_at(r, c) == CellTag::Unselected);
                CHECK(map.current_at(r, c) == 0.0);
                ++n_unselected;
            }
        }
    }
    CHECK(n_half == 6);
    CHECK(n_unselected == 9);
}

TEST_CASE("cell currents: linear table obeys the series-divider oracle") {
    const QaheParams params;
    const ArrayState array(4, 4, params, linear_selector());
    const double v = -0.5;
    const BiasScheme scheme = build_bias_scheme(CycleMode::Read, {0}, {0}, v, 4, 4);
    const CellCurrentMap map = compute_cell_currents(array, scheme);

    const double r_total = 1000.0 + params.r_series_ohm;
    CHECK(map.current_at(0, 0) == doctest::Approx(v / r_total).epsilon(1e-9));
    CHECK(map.current_at(0, 1) == doctest::Approx(v / 2 / r_total).epsilon(1e-9));
    CHECK(map.tag_at(0, 1) == CellTag::HalfSelected);
    CHECK(map.current_at(1, 1) == 0.0);
}

TEST_CASE("cell currents: errors carry context") {
    const ArrayState array(2, 2);
    BiasScheme scheme = build_bias_scheme(CycleMode::Read, {0}, {0}, -0.5, 2, 2);
    scheme.bl_voltages_v.push_back(0.0);
    CHECK_THROWS_AS(compute_cell_currents(array, scheme), std::invalid_argument);

    // A table too narrow for the requested bias names the failing cell.
    const auto narrow = std::make_shared<SelectorModel>(
        SelectorModel({{-0.01, -1e-9}, {0.01, 1e-9}}));
    const ArrayState small(2, 2, QaheParams{}, narrow);
    const BiasScheme read = build_bias_scheme(CycleMode::Read, {0}, {0}, -0.5, 2, 2);
    try {
        compute_cell_currents(small, read);
        FAIL("expected UnsolvableBiasError");
    } catch (const UnsolvableBiasError& e) {
        CHECK(std::string(e.what()).find("cell (0, 0)") != std::string::npos);
    }
}

TEST_CASE("row hall sum cancels complementary bits exactly") {
    ArrayState array = demo_array();
    const BiasScheme scheme =
        build_bias_scheme(CycleMode::Logic, {0, 1, 2, 3}, {0, 1}, -0.5, 4, 4);
    const CellCurrentMap map = compute_cell_currents(array, scheme);

    // 01 and 10 rows: equal currents, opposite Hall signs.
    CHECK(row_hall_sum(array, map, 1) == 0.0);
    CHECK(row_hall_sum(array, map, 2) == 0.0);

    // 00 row: two positive Hall voltages of 52.14187014 uV each.
    CHECK(row_hall_sum(array, map, 0) == doctest::Approx(1.0428374028e-4).epsilon(1e-12));
    CHECK(row_hall_sum(array, map, 3) == doctest::Approx(-1.0428374028e-4).epsilon(1e-12));
}

TEST_CASE("row hall sum of an inactive row is exactly zero") {
    ArrayState array = demo_array();
    const BiasScheme scheme = build_bias_scheme(CycleMode::Read, {0}, {0}, -0.5, 4, 4);
    const CellCurrentMap map = compute_cell_currents(array, scheme);
    // Rows 1-3 hold half-selected (zero-current) and unselected cells only.
    CHECK(row_hall_sum(array, map, 1) == 0.0);
    CHECK(row_hall_sum(array, map, 3) == 0.0);
    CHECK_THROWS_AS(row_hall_sum(array, map, 4), std::out_of_range);
}

TEST_CASE("row hall sum equals the independent per-cell sum") {
    std::mt19937 rng(7);
    const QaheParams params;
    ArrayState array(3, 5, params, linear_selector());
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 5; ++c) {
            array.set_cell(r, c, QaheCellState{static_cast<uint8_t>(rng() % 2)});
        }
    }
    const BiasScheme scheme = build_bias_scheme(CycleMode::Logic, {0, 2}, {1, 3}, -0.4, 3, 5);
    const CellCurrentMap map = compute_cell_currents(array, scheme);
    for (std::size_t r = 0; r < 3; ++r) {
        double expected = 0.0;
        for (std::size_t c = 0; c < 5; ++c) {
            expected += hall_voltage(array.cell(r, c), map.current_at(r, c), params);
        }
        CHECK(row_hall_sum(array, map, r) == expected);
    }
}

TEST_CASE("power report splits selected and leakage dissipation") {
    BiasScheme scheme;
    scheme.mode = CycleMode::Read;
    scheme.v_full_v = 0.5;
    scheme.bl_voltages_v = {0.5};
    scheme.wl_voltages_v = {0.0};

    CellCurrentMap map;
    map.rows = 1;
    map.cols = 1;
    map.currents_a = {2e-9};
    map.tags = {CellTag::Selected};

    const PowerReport one = power_report(scheme, map, 1e-8);
    CHECK(one.selected_power_w == 1e-9);
    CHECK(one.per_cell_selected_w == 1e-9);
    CHECK(one.leakage_power_w == 0.0);
    CHECK(one.n_selected == 1);
    CHECK(one.cycle_energy_j == doctest::Approx(1e-17).epsilon(1e-12));

    // Two identical selected cells dissipate exactly double.
    BiasScheme two_scheme;
    two_scheme.mode = CycleMode::Read;
    two_scheme.v_full_v = 0.5;
    two_scheme.bl_voltages_v = {0.5, 0.5};
    two_scheme.wl_voltages_v = {0.0};
    CellCurrentMap two_map;
    two_map.rows = 1;
    two_map.cols = 2;
    two_map.currents_a = {2e-9, 2e-9};
    two_map.tags = {CellTag::Selected, CellTag::Selected};
    const PowerReport two = power_report(two_scheme, two_map, 1e-8);
    CHECK(two.selected_power_w == 2.0 * one.selected_power_w);
    CHECK(two.per_cell_selected_w == one.per_cell_selected_w);

    // Half-selected dissipation lands in the leakage bucket.
    two_map.tags = {CellTag::Selected, CellTag::HalfSelected};
    const PowerReport split = power_report(two_scheme, two_map, 1e-8);
    CHECK(split.selected_power_w == 1e-9);
    CHECK(split.leakage_power_w == 1e-9);
    CHECK(split.n_half_selected == 1);

    CHECK_THROWS_AS(power_report(two_scheme, two_map, -1.0), std::invalid_argument);
    CellCurrentMap bad = two_map;
    bad.cols = 3;
    CHECK_THROWS_AS(power_report(two_scheme, bad, 1e-8), std::invalid_argument);
}

TEST_CASE("power report with no selected cells is zero") {
    const ArrayState array(2, 2);
    const BiasScheme scheme = build_bias_scheme(CycleMode::Read, {0}, {0}, 0.0, 2, 2);
    const CellCurrentMap map = compute_cell_currents(array, scheme);
    const PowerReport report = power_report(scheme, map, 1e-8);
    CHECK(report.selected_power_w == 0.0);
    CHECK(report.leakage_power_w == 0.0);
    CHECK(report.per_cell_selected_w == 0.0);
    CHECK(report.cycle_energy_j == 0.0);
}

TEST_CASE("apply_write programs the target cell and only the target cell") {
    const double v_write = 0.5209356844210831;
    ArrayState array = demo_array();
    const ArrayState before = array;

    const BiasScheme scheme =
        build_bias_scheme(CycleMode::Write1, {1}, {0}, v_write, 4, 4);
    const ArrayState after = apply_write(array, scheme);

    CHECK(after.cell(1, 0).bit == 1);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            if (r == 1 && c == 0) continue;
            CHECK(after.cell(r, c).bit == before.cell(r, c).bit);
        }
    }

    // Rewriting the stored value is a no-op on state.
    const BiasScheme again =
        build_bias_scheme(CycleMode::Write1, {1}, {0}, v_write, 4, 4);
    CHECK(apply_write(after, again).same_bits(after));

    // Write 0 via the negative full bias.
    const BiasScheme erase =
        build_bias_scheme(CycleMode::Write0, {1}, {0}, -v_write, 4, 4);
    CHECK(apply_write(after, erase).cell(1, 0).bit == 0);
}

TEST_CASE("apply_write rejects wrong modes and insufficient bias") {
    ArrayState array(2, 2);
    const BiasScheme read = build_bias_scheme(CycleMode::Read, {0}, {0}, -0.5, 2, 2);
    CHECK_THROWS_AS(apply_write(array, read), std::invalid_argument);

    // 0.4 V drives well under the switching threshold on the default table.
    const BiasScheme weak = build_bias_scheme(CycleMode::Write1, {1}, {1}, 0.4, 2, 2);
    try {
        apply_write(array, weak);
        FAIL("expected WriteVerifyError");
    } catch (const WriteVerifyError& e) {
        CHECK(std::string(e.what()).find("cell (1, 1)") != std::string::npos);
    }
}
