#pragma once

#include "acam/device.hpp"

#include <vector>

namespace acam {

struct CellConfig {
    double g_m1 = 0;  // lower-bound memristor
    double g_m2 = 0;  // upper-bound memristor
};

struct VoltageInterval {
    double lo = 0;
    double hi = 0;
    bool contains(double v) const { return v >= lo && v <= hi; }
    double width() const { return hi - lo; }
};

struct LevelCode {
    int n_levels = 0;
    int index = 0;
    VoltageInterval interval;
};

/// Root of the M1 divider node crossing v_th_ml.
double lower_bound(double g_m1, const DeviceParams& p);
/// Root of the M2 divider node crossing v_th_inv.
double upper_bound(double g_m2, const DeviceParams& p);

VoltageInterval bounds_from_conductance(const CellConfig& c, const DeviceParams& p);
CellConfig conductance_from_bounds(const VoltageInterval& iv, const DeviceParams& p);

/// Closed-form bounds, valid while the divider transistor is in triode.
double linear_lower_bound(double g_m1, const DeviceParams& p);
double linear_upper_bound(double g_m2, const DeviceParams& p);

/// Widest interval the conductance window can store: [lower_bound(g_min), upper_bound(g_max)].
VoltageInterval achievable_window(const DeviceParams& p);

std::vector<LevelCode> quantize_levels(int n_levels, const VoltageInterval& window, double guard);
/// Centre voltage of a level (the DL voltage used to encode it).
double level_voltage(int index, int n_levels, const VoltageInterval& window);
/// Index of the level whose pitch slot contains v; -1 if outside the window.
int level_index(double v, int n_levels, const VoltageInterval& window);

struct Anchor {
    CellConfig cell;
    VoltageInterval target;
};

struct CalibrationResult {
    DeviceParams params;
    std::vector<VoltageInterval> residuals;  // fitted minus target, per anchor
    double max_residual = 0;
};

/// Fits {v_th, v_th_ml, v_th_inv, beta}; every other field comes from `base`.
CalibrationResult calibrate(const std::vector<Anchor>& anchors, const DeviceParams& base = {});

/// The two anchor cells the defaults are fitted to.
std::vector<Anchor> reference_anchors();

/// Calibrated defaults used across the tool.
const DeviceParams& calibrated_defaults();

} // namespace acam
