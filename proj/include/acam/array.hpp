#pragma once

#include "acam/cell.hpp"
#include "acam/device.hpp"

#include <optional>
#include <vector>

namespace acam {

struct Parasitics {
    double r_ml = 1.91, r_dl = 2.27, r_sl = 0.85;                 // ohm per cell
    double c_ml = 0.227e-15, c_dl = 0.324e-15, c_sl = 0.454e-15;  // F per cell
};

enum class variant { transistor_pulldown, ts_pullup };

struct ArraySpec {
    int rows = 0;
    int cols = 0;
    std::vector<CellConfig> cells;  // row-major, rows*cols
    Parasitics parasitics;
    double v_precharge = 0.8;
    double t_sense = 100e-12;
    double sense_frac = 0.5;
    double c_fixed = 1e-15;
    variant kind = variant::transistor_pulldown;
    TsDeviceParams ts;

    const CellConfig& cell(int r, int c) const { return cells[static_cast<std::size_t>(r) * cols + c]; }
    CellConfig& cell(int r, int c) { return cells[static_cast<std::size_t>(r) * cols + c]; }
    double c_ml_total() const { return cols * parasitics.c_ml + c_fixed; }
    void validate() const;
};

/// rows x cols array with every cell set to `c` and default electricals.
ArraySpec uniform_array(int rows, int cols, const CellConfig& c);

struct RowResult {
    bool matched = false;
    double v_ml = 0;                  // ML voltage at t_sense
    std::optional<double> latency;    // time the ML crosses the sense threshold
};

struct SearchResult {
    std::vector<RowResult> rows;
};

/// ML conductance at which V_ML(t_sense) sits exactly on the sense threshold.
double sense_threshold_conductance(const ArraySpec& a);

/// Summed pull-down (or TS pull-up) conductance of one row.
double row_conductance(const ArraySpec& a, int row, const std::vector<double>& stimulus,
                       const DeviceParams& p);
/// Per-cell contribution to row_conductance.
double cell_conductance(const ArraySpec& a, const CellConfig& c, double v_dl, const DeviceParams& p);

double ml_voltage_at_sense(const ArraySpec& a, double g_row);
bool is_match(const ArraySpec& a, double g_row);

SearchResult search(const ArraySpec& a, const std::vector<double>& stimulus, const DeviceParams& p);

/// Match decision only, stopping once the row is known to mismatch.
bool row_matches(const ArraySpec& a, int row, const std::vector<double>& stimulus,
                 const DeviceParams& p);

/// Sweeps column `col` over [0, 1] V at `step` with the other columns held at `bias`
/// and returns the matched band of `row`, edges refined between grid points.
VoltageInterval effective_bounds_in_array(const ArraySpec& a, int row, int col,
                                          const DeviceParams& p, double step,
                                          const std::vector<double>& bias);
VoltageInterval effective_bounds_in_array(const ArraySpec& a, int row, int col,
                                          const DeviceParams& p, double step, double bias = 0.4);

int max_word_length(const DeviceParams& p, double margin_ratio);

/// Leakage-induced bound shift estimate; the operating point is the sense threshold
/// of a default-electrical array with n_cols columns (or of `ref` when given).
double analytic_range_shift(int n_cols, const DeviceParams& p);
double analytic_range_shift(int n_cols, const DeviceParams& p, const ArraySpec& ref);

double discharge_latency(const ArraySpec& a, const std::vector<double>& stimulus, int row,
                         const DeviceParams& p);

} // namespace acam
