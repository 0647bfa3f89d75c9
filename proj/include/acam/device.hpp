#pragma once

#include <cstdint>
#include <utility>

namespace acam {

/// Transistor, supply and memristor-window constants of the 6T2M cell.
/// SI units throughout; swing is stored in V/decade.
struct DeviceParams {
    double v_slhi = 0.5;
    double v_th = 0.29;
    double v_th_ml = 0.25;
    double v_th_inv = 0.2712;
    double beta = 500e-6;     // S/V
    double g_on = 1e-3;
    double g_off = 1e-6;
    double swing = 0.1;       // V/dec
    double alpha = 0.1;
    double inv_gain = 10.0;   // small-signal gain of the hi-side inverter at its threshold
    double blend = 0.01;      // C1 smoothing window of the divider transistor (V)
    double pulldown_blend = 0.002;  // pull-down turn-on width below v_th_ml; 0 gives a hard step
    double g_min = 1e-6;
    double g_max = 150e-6;
    double sigma_prog = 2e-6;

    void validate() const;
};

struct TsDeviceParams {
    double v_threshold = 0.4;
    double v_hold = 0.1;
    double swing_ts = 0.001;  // V/dec
    double g_ts_on = 1e-3;
    double g_ts_off = 1e-6;

    void validate() const;
};

enum class ts_state { off, on };

struct MemristorState {
    double g = 0;
    double sigma_prog = 0;
    int iterations = 0;
};

/// Conductance of the divider's series transistor at drain-line voltage v_dl.
double series_conductance(double v_dl, const DeviceParams& p);

double divider_gate_voltage(double g_m, double v_dl, const DeviceParams& p);

/// Same as divider_gate_voltage without the window check (for internal sweeps
/// where g_m may sit exactly on a limit or be perturbed by programming noise).
double divider_node(double g_m, double v_dl, const DeviceParams& p);

/// Hi-side inverter transfer; maps v_th_inv onto v_th_ml.
double inverter_output(double v_in, const DeviceParams& p);

double pulldown_conductance(double v_g, const DeviceParams& p);

std::pair<double, ts_state> ts_conductance(double v, ts_state prior, const TsDeviceParams& p);

MemristorState program_memristor(double target, std::uint64_t seed, double tol, int max_iters,
                                 const DeviceParams& p);

/// Write protocol (set/reset/read per device). Only the line assignment is
/// represented; switching dynamics are not simulated.
enum class write_op { set_m1, reset_m1, set_m2, reset_m2, read_m1, read_m2 };

enum class line_level { zero, v_set, v_reset, v_read, v_gset, v_dd };

struct WriteBias {
    line_level sl_hi, sl_lo, dl1, dl2;
};

WriteBias write_protocol(write_op op);
const char* to_string(line_level l);
const char* to_string(write_op op);

} // namespace acam
