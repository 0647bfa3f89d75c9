#include "acam/array.hpp"
#include "acam/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace acam {

namespace {

constexpr double ln10 = 2.302585092994046;

void check_stimulus(const ArraySpec& a, const std::vector<double>& s) {
    if (static_cast<int>(s.size()) != a.cols)
        throw error(error_kind::invalid_argument,
                    "stimulus length " + std::to_string(s.size()) + " != cols " +
                        std::to_string(a.cols));
    for (double v : s)
        if (!(v >= 0 && v <= 1)) throw domain_error("stimulus voltage outside [0, 1] V");
}

void check_row(const ArraySpec& a, int row) {
    if (row < 0 || row >= a.rows) throw error(error_kind::invalid_argument, "row out of range");
}

// Time constant factor: ML crosses the threshold after C * crossing_log / G.
double crossing_log(const ArraySpec& a) {
    return a.kind == variant::ts_pullup ? std::log(1 / (1 - a.sense_frac))
                                        : std::log(1 / a.sense_frac);
}

} // namespace

void ArraySpec::validate() const {
    if (rows < 1 || cols < 1) throw domain_error("array: rows and cols must be >= 1");
    if (cells.size() != static_cast<std::size_t>(rows) * cols)
        throw error(error_kind::invalid_argument, "array: cells matrix is not rows x cols");
    if (!(sense_frac > 0 && sense_frac < 1)) throw domain_error("array: need 0 < sense_frac < 1");
    if (!(t_sense > 0)) throw domain_error("array: t_sense must be > 0");
    if (!(v_precharge > 0)) throw domain_error("array: v_precharge must be > 0");
    if (c_fixed < 0) throw domain_error("array: c_fixed must be >= 0");
    const Parasitics& q = parasitics;
    if (q.r_ml < 0 || q.r_dl < 0 || q.r_sl < 0 || q.c_ml < 0 || q.c_dl < 0 || q.c_sl < 0)
        throw domain_error("array: parasitics must be >= 0");
    if (!(c_ml_total() > 0)) throw domain_error("array: zero ML capacitance");
    if (kind == variant::ts_pullup) ts.validate();
}

ArraySpec uniform_array(int rows, int cols, const CellConfig& c) {
    ArraySpec a;
    a.rows = rows;
    a.cols = cols;
    a.cells.assign(static_cast<std::size_t>(rows) * cols, c);
    return a;
}

double sense_threshold_conductance(const ArraySpec& a) {
    return a.c_ml_total() * crossing_log(a) / a.t_sense;
}

double cell_conductance(const ArraySpec& a, const CellConfig& c, double v_dl, const DeviceParams& p) {
    double v1 = divider_node(c.g_m1, v_dl, p);
    double v2 = inverter_output(divider_node(c.g_m2, v_dl, p), p);
    if (a.kind == variant::transistor_pulldown)
        return pulldown_conductance(v1, p) + pulldown_conductance(v2, p);
    // TS devices start OFF each search; the drive is scaled so the bound sits at the TS threshold
    const double k = a.ts.v_threshold / p.v_th_ml;
    return ts_conductance(v1 * k, ts_state::off, a.ts).first +
           ts_conductance(v2 * k, ts_state::off, a.ts).first;
}

double row_conductance(const ArraySpec& a, int row, const std::vector<double>& stimulus,
                       const DeviceParams& p) {
    double g = 0;
    for (int c = 0; c < a.cols; ++c) g += cell_conductance(a, a.cell(row, c), stimulus[c], p);
    return g;
}

double ml_voltage_at_sense(const ArraySpec& a, double g_row) {
    double x = std::exp(-g_row * a.t_sense / a.c_ml_total());
    return a.kind == variant::ts_pullup ? a.v_precharge * (1 - x) : a.v_precharge * x;
}

bool is_match(const ArraySpec& a, double g_row) {
    // V_ML(t_sense) on the match side of the threshold, compared in the exponent so a row
    // at exactly the threshold conductance is a tie (match) despite rounding in exp
    return g_row * a.t_sense / a.c_ml_total() <= crossing_log(a) * (1 + 1e-12);
}

SearchResult search(const ArraySpec& a, const std::vector<double>& stimulus, const DeviceParams& p) {
    a.validate();
    check_stimulus(a, stimulus);
    SearchResult out;
    out.rows.resize(a.rows);
    const double ln_cross = crossing_log(a);
    for (int r = 0; r < a.rows; ++r) {
        double g = row_conductance(a, r, stimulus, p);
        RowResult& rr = out.rows[r];
        rr.v_ml = ml_voltage_at_sense(a, g);
        rr.matched = is_match(a, g);
        if (!rr.matched && g > 0)
            rr.latency = a.c_ml_total() * ln_cross * (1 / g + a.cols * a.parasitics.r_ml);
    }
    return out;
}

bool row_matches(const ArraySpec& a, int row, const std::vector<double>& stimulus,
                 const DeviceParams& p) {
    const double g_th = sense_threshold_conductance(a);
    double g = 0;
    for (int c = 0; c < a.cols; ++c) {
        g += cell_conductance(a, a.cell(row, c), stimulus[c], p);
        // margin keeps this consistent with the exp-based decision at the boundary
        if (g > g_th * (1 + 1e-9)) return false;
    }
    return is_match(a, g);
}

VoltageInterval effective_bounds_in_array(const ArraySpec& a, int row, int col,
                                          const DeviceParams& p, double step,
                                          const std::vector<double>& bias) {
    a.validate();
    check_row(a, row);
    if (col < 0 || col >= a.cols) throw error(error_kind::invalid_argument, "column out of range");
    if (!(step > 0)) throw domain_error("sweep step must be > 0");
    check_stimulus(a, bias);

    double g_rest = 0;
    for (int c = 0; c < a.cols; ++c)
        if (c != col) g_rest += cell_conductance(a, a.cell(row, c), bias[c], p);
    const CellConfig& cell = a.cell(row, col);
    auto matched = [&](double v) { return is_match(a, g_rest + cell_conductance(a, cell, v, p)); };

    const int n = static_cast<int>(std::floor(1.0 / step + 1e-9));
    int first = -1, last = -1;
    for (int i = 0; i <= n; ++i) {
        if (matched(i * step)) {
            if (first < 0) first = i;
            last = i;
        }
    }
    if (first < 0) throw domain_error("no matched point in sweep");

    // refine each edge between the neighbouring unmatched grid point and the matched one
    auto refine = [&](double in, double out) {
        for (int k = 0; k < 60; ++k) {
            double m = 0.5 * (in + out);
            if (matched(m))
                in = m;
            else
                out = m;
        }
        return in;
    };
    double lo = first * step, hi = last * step;
    if (first > 0) lo = refine(lo, (first - 1) * step);
    if (last < n) hi = refine(hi, std::min(1.0, (last + 1) * step));
    return {lo, hi};
}

VoltageInterval effective_bounds_in_array(const ArraySpec& a, int row, int col,
                                          const DeviceParams& p, double step, double bias) {
    return effective_bounds_in_array(a, row, col, p, step, std::vector<double>(a.cols, bias));
}

int max_word_length(const DeviceParams& p, double margin_ratio) {
    if (!(margin_ratio > 1)) throw domain_error("margin ratio must be > 1");
    constexpr int cap = 1 << 30;
    if (p.g_off <= 0) return cap;
    double ratio = p.g_on / p.g_off;
    // snap ratios that are integers up to rounding, so 1e-3/1e-6 behaves as 1000
    double rr = std::round(ratio);
    if (std::abs(ratio - rr) <= 1e-9 * ratio) ratio = rr;
    double x = (ratio - 1) / (margin_ratio - 1);  // N < x
    if (!(x > 0)) return 0;
    if (x >= cap) return cap;
    int n = static_cast<int>(std::ceil(x)) - 1;
    while (ratio > (margin_ratio - 1) * (n + 1) + 1 && n + 1 < cap) ++n;
    while (n > 0 && !(ratio > (margin_ratio - 1) * n + 1)) --n;
    return n;
}

double analytic_range_shift(int n_cols, const DeviceParams& p, const ArraySpec& ref) {
    if (n_cols < 1) throw domain_error("n_cols must be >= 1");
    ArraySpec a = ref;
    a.cols = n_cols;
    double g_op = a.c_ml_total() * std::log(1 / a.sense_frac) / a.t_sense;
    double s = g_op * ln10 / (p.alpha * p.swing);  // S/V
    return (n_cols - 1) * p.g_off / s;
}

double analytic_range_shift(int n_cols, const DeviceParams& p) {
    return analytic_range_shift(n_cols, p, ArraySpec{});
}

double discharge_latency(const ArraySpec& a, const std::vector<double>& stimulus, int row,
                         const DeviceParams& p) {
    a.validate();
    check_stimulus(a, stimulus);
    check_row(a, row);
    double g = row_conductance(a, row, stimulus, p);
    if (is_match(a, g) || !(g > 0))
        throw error(error_kind::invalid_argument, "row matches: ML never crosses the threshold");
    return a.c_ml_total() * crossing_log(a) * (1 / g + a.cols * a.parasitics.r_ml);
}

} // namespace acam
