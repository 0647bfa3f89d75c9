#include "acam/device.hpp"
#include "acam/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace acam {

namespace {

constexpr double ln10 = 2.302585092994046;

// Cubic Hermite on [0, 1] with endpoint values y and slopes m (already scaled by the interval).
double hermite(double t, double y0, double m0, double y1, double m1) {
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 +
           (t3 - t2) * m1;
}

} // namespace

void DeviceParams::validate() const {
    if (!(v_th_ml > 0 && v_th_ml < v_slhi))
        throw domain_error("device: need 0 < v_th_ml < v_slhi");
    if (!(v_th_inv > 0 && v_th_inv < v_slhi))
        throw domain_error("device: need 0 < v_th_inv < v_slhi");
    if (!(g_off < g_on) || g_off < 0)
        throw domain_error("device: need 0 <= g_off < g_on");
    if (!(g_min < g_max) || g_min <= 0)
        throw domain_error("device: need 0 < g_min < g_max");
    if (!(beta > 0)) throw domain_error("device: beta must be > 0");
    if (!(swing > 0)) throw domain_error("device: swing must be > 0");
    if (!(alpha > 0)) throw domain_error("device: alpha must be > 0");
    if (!(inv_gain > 0)) throw domain_error("device: inv_gain must be > 0");
    if (!(blend > 0)) throw domain_error("device: blend must be > 0");
    if (pulldown_blend < 0) throw domain_error("device: pulldown_blend must be >= 0");
    if (sigma_prog < 0) throw domain_error("device: sigma_prog must be >= 0");
}

void TsDeviceParams::validate() const {
    if (!(v_hold < v_threshold)) throw domain_error("ts device: need v_hold < v_threshold");
    if (!(g_ts_off < g_ts_on) || g_ts_off < 0)
        throw domain_error("ts device: need 0 <= g_ts_off < g_ts_on");
    if (!(swing_ts > 0)) throw domain_error("ts device: swing_ts must be > 0");
}

double series_conductance(double v_dl, const DeviceParams& p) {
    const double h = p.blend / 2;
    const double a = p.v_th - h, b = p.v_th + h;
    if (v_dl >= b) return p.beta * (v_dl - p.v_th);
    // left edge chosen so the blend stays monotone for any swing
    const double ga = p.beta * h / 4;
    if (v_dl <= a) return ga * std::pow(10.0, (v_dl - a) / p.swing);
    const double w = b - a;
    return hermite((v_dl - a) / w, ga, w * ga * ln10 / p.swing, p.beta * h, w * p.beta);
}

double divider_node(double g_m, double v_dl, const DeviceParams& p) {
    return p.v_slhi * g_m / (g_m + series_conductance(v_dl, p));
}

double divider_gate_voltage(double g_m, double v_dl, const DeviceParams& p) {
    if (!(g_m >= p.g_min && g_m <= p.g_max))
        throw domain_error("conductance " + std::to_string(g_m * 1e6) + " uS outside window [" +
                           std::to_string(p.g_min * 1e6) + ", " + std::to_string(p.g_max * 1e6) +
                           "] uS");
    if (!(v_dl >= 0 && v_dl <= 1)) throw domain_error("v_dl outside [0, 1] V");
    return divider_node(g_m, v_dl, p);
}

double inverter_output(double v_in, const DeviceParams& p) {
    const double a = p.v_slhi / p.v_th_ml - 1;
    const double k = p.inv_gain / (p.v_th_ml * (1 - p.v_th_ml / p.v_slhi));
    const double z = k * (v_in - p.v_th_inv);
    if (z > 700) return 0.0;
    return p.v_slhi / (1 + a * std::exp(z));
}

double pulldown_conductance(double v_g, const DeviceParams& p) {
    if (v_g >= p.v_th_ml) return p.g_on;
    if (p.g_off <= 0) return 0.0;
    const double w = p.pulldown_blend;
    if (w <= 0 || v_g <= p.v_th_ml - w)
        return std::clamp(p.g_off * std::pow(10.0, (v_g - p.v_th_ml) / p.swing), p.g_off * 1e-6,
                          p.g_on);
    // log-domain blend from the sub-threshold tail up to g_on, flat at threshold
    const double y0 = std::log10(p.g_off) - w / p.swing;
    const double y1 = std::log10(p.g_on);
    const double t = (v_g - (p.v_th_ml - w)) / w;
    return std::pow(10.0, hermite(t, y0, w / p.swing, y1, 0.0));
}

std::pair<double, ts_state> ts_conductance(double v, ts_state prior, const TsDeviceParams& p) {
    ts_state s = prior;
    if (v >= p.v_threshold)
        s = ts_state::on;
    else if (v <= p.v_hold)
        s = ts_state::off;
    if (s == ts_state::on) return {p.g_ts_on, s};
    double g = p.g_ts_off * std::pow(10.0, (v - p.v_threshold) / p.swing_ts);
    return {std::max(g, p.g_ts_off * 1e-6), s};
}

MemristorState program_memristor(double target, std::uint64_t seed, double tol, int max_iters,
                                 const DeviceParams& p) {
    if (!(target >= p.g_min && target <= p.g_max))
        throw domain_error("program target outside conductance window");
    if (!(tol > 0)) throw domain_error("program tolerance must be > 0");
    if (max_iters < 1) throw domain_error("max_iters must be >= 1");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, p.sigma_prog);
    double g = p.g_min, best = g;
    for (int i = 1; i <= max_iters; ++i) {
        g = std::clamp(target + noise(rng), p.g_min, p.g_max);
        if (std::abs(g - target) < std::abs(best - target)) best = g;
        if (std::abs(g - target) <= tol) return {g, p.sigma_prog, i};
    }
    throw programming_error("program-and-verify did not converge", best, max_iters);
}

WriteBias write_protocol(write_op op) {
    using L = line_level;
    switch (op) {
    case write_op::set_m1: return {L::v_set, L::zero, L::v_gset, L::zero};
    case write_op::reset_m1: return {L::zero, L::v_reset, L::v_dd, L::zero};
    case write_op::set_m2: return {L::v_set, L::zero, L::zero, L::v_gset};
    case write_op::reset_m2: return {L::zero, L::v_reset, L::zero, L::v_dd};
    case write_op::read_m1: return {L::v_read, L::zero, L::v_dd, L::zero};
    case write_op::read_m2: return {L::v_read, L::zero, L::zero, L::v_dd};
    }
    throw domain_error("unknown write op");
}

const char* to_string(line_level l) {
    switch (l) {
    case line_level::zero: return "0";
    case line_level::v_set: return "Vset";
    case line_level::v_reset: return "Vreset";
    case line_level::v_read: return "Vread";
    case line_level::v_gset: return "Vg,set";
    case line_level::v_dd: return "VDD";
    }
    return "?";
}

const char* to_string(write_op op) {
    switch (op) {
    case write_op::set_m1: return "set_m1";
    case write_op::reset_m1: return "reset_m1";
    case write_op::set_m2: return "set_m2";
    case write_op::reset_m2: return "reset_m2";
    case write_op::read_m1: return "read_m1";
    case write_op::read_m2: return "read_m2";
    }
    return "?";
}

} // namespace acam
