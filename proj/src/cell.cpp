#include "acam/cell.hpp"
#include "acam/error.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <algorithm>
#include <cmath>
#include <string>

namespace acam {

namespace {

constexpr double root_tol = 1e-9;

// f decreasing in v; returns v with f(v) = 0 on [a, b].
template <class F> double bisect_decreasing(F f, double a, double b) {
    while (b - a > root_tol) {
        double m = 0.5 * (a + b);
        if (f(m) > 0)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

double node_root(double g, double target, const DeviceParams& p, const char* which) {
    auto f = [&](double v) { return divider_node(g, v, p) - target; };
    if (!(f(0.0) > 0 && f(1.0) < 0))
        throw domain_error(std::string(which) + " bound not inside [0, 1] V for g = " +
                           std::to_string(g * 1e6) + " uS");
    return bisect_decreasing(f, 0.0, 1.0);
}

void check_g(double g, const DeviceParams& p, const char* name) {
    if (!(g >= p.g_min && g <= p.g_max))
        throw domain_error(std::string(name) + " = " + std::to_string(g * 1e6) +
                           " uS outside conductance window");
}

// Inverse of a bound function increasing in g, by bisection on log g.
template <class F> double invert_bound(F bound, double v, const DeviceParams& p, const char* name) {
    double lo_v = bound(p.g_min), hi_v = bound(p.g_max);
    if (v < lo_v - 1e-12 || v > hi_v + 1e-12)
        throw domain_error(std::string(name) + " " + std::to_string(v) +
                           " V unachievable (window " + std::to_string(lo_v) + ".." +
                           std::to_string(hi_v) + " V)");
    double a = std::log(p.g_min), b = std::log(p.g_max);
    for (int i = 0; i < 200 && b - a > 1e-13; ++i) {
        double m = 0.5 * (a + b);
        if (bound(std::exp(m)) < v)
            a = m;
        else
            b = m;
    }
    return std::clamp(std::exp(0.5 * (a + b)), p.g_min, p.g_max);
}

} // namespace

double linear_lower_bound(double g_m1, const DeviceParams& p) {
    return g_m1 * (p.v_slhi / p.v_th_ml - 1) / p.beta + p.v_th;
}

double linear_upper_bound(double g_m2, const DeviceParams& p) {
    return g_m2 * (p.v_slhi / p.v_th_inv - 1) / p.beta + p.v_th;
}

double lower_bound(double g_m1, const DeviceParams& p) {
    double v = linear_lower_bound(g_m1, p);
    if (v >= p.v_th + p.blend / 2 && v <= 1.0) return v;
    return node_root(g_m1, p.v_th_ml, p, "lower");
}

double upper_bound(double g_m2, const DeviceParams& p) {
    double v = linear_upper_bound(g_m2, p);
    if (v >= p.v_th + p.blend / 2 && v <= 1.0) return v;
    return node_root(g_m2, p.v_th_inv, p, "upper");
}

VoltageInterval bounds_from_conductance(const CellConfig& c, const DeviceParams& p) {
    check_g(c.g_m1, p, "g_m1");
    check_g(c.g_m2, p, "g_m2");
    VoltageInterval iv{lower_bound(c.g_m1, p), upper_bound(c.g_m2, p)};
    if (iv.lo > iv.hi)
        throw error(error_kind::inconsistent, "inverted interval: lo " + std::to_string(iv.lo) +
                                                  " V > hi " + std::to_string(iv.hi) + " V");
    return iv;
}

CellConfig conductance_from_bounds(const VoltageInterval& iv, const DeviceParams& p) {
    if (iv.lo > iv.hi) throw domain_error("interval lo > hi");
    CellConfig c;
    c.g_m1 = invert_bound([&](double g) { return lower_bound(g, p); }, iv.lo, p, "lower bound");
    c.g_m2 = invert_bound([&](double g) { return upper_bound(g, p); }, iv.hi, p, "upper bound");
    return c;
}

VoltageInterval achievable_window(const DeviceParams& p) {
    return {lower_bound(p.g_min, p), upper_bound(p.g_max, p)};
}

std::vector<LevelCode> quantize_levels(int n_levels, const VoltageInterval& window, double guard) {
    if (n_levels < 2) throw domain_error("quantize_levels: need at least 2 levels");
    if (guard < 0) throw domain_error("quantize_levels: guard must be >= 0");
    const double width = window.hi - window.lo;
    if (!(width > 0)) throw domain_error("quantize_levels: empty window");
    if (!(n_levels * guard < width))
        throw domain_error("quantize_levels: " + std::to_string(n_levels) + " levels with " +
                           std::to_string(guard * 1e3) + " mV guard do not fit the window");
    const double pitch = width / n_levels;
    std::vector<LevelCode> out;
    out.reserve(n_levels);
    for (int i = 0; i < n_levels; ++i) {
        double a = window.lo + i * pitch;
        out.push_back({n_levels, i, {a + guard / 2, a + pitch - guard / 2}});
    }
    return out;
}

double level_voltage(int index, int n_levels, const VoltageInterval& window) {
    return window.lo + (index + 0.5) * (window.hi - window.lo) / n_levels;
}

int level_index(double v, int n_levels, const VoltageInterval& window) {
    if (v < window.lo || v > window.hi) return -1;
    int i = static_cast<int>(std::floor((v - window.lo) / (window.hi - window.lo) * n_levels));
    return std::min(i, n_levels - 1);
}

namespace {

// Parameter vector: v_th, v_th_ml, v_th_inv (V) and beta in mS/V so all are O(0.1..1).
struct Prior {
    double v_th = 0.3, v_th_ml = 0.25, v_th_inv = 0.25, beta_mS = 0.5;
    double weight = 1e-3;
};

struct FitFunctor {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    const std::vector<Anchor>* anchors;
    DeviceParams base;
    Prior prior;

    int inputs() const { return 4; }
    int values() const { return static_cast<int>(anchors->size()) * 2 + 4; }

    DeviceParams unpack(const Eigen::VectorXd& x) const {
        DeviceParams q = base;
        q.v_th = x[0];
        q.v_th_ml = x[1];
        q.v_th_inv = x[2];
        q.beta = x[3] * 1e-3;
        return q;
    }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
        DeviceParams q = unpack(x);
        bool ok = q.v_th_ml > 1e-3 && q.v_th_ml < q.v_slhi - 1e-3 && q.v_th_inv > 1e-3 &&
                  q.v_th_inv < q.v_slhi - 1e-3 && q.beta > 0;
        std::size_t k = 0;
        for (const auto& a : *anchors) {
            // the closed forms are smooth in the parameters; the fit lives in the triode regime
            r[k++] = ok ? linear_lower_bound(a.cell.g_m1, q) - a.target.lo : 1.0;
            r[k++] = ok ? linear_upper_bound(a.cell.g_m2, q) - a.target.hi : 1.0;
        }
        r[k++] = prior.weight * (x[0] - prior.v_th);
        r[k++] = prior.weight * (x[1] - prior.v_th_ml);
        r[k++] = prior.weight * (x[2] - prior.v_th_inv);
        r[k++] = prior.weight * (x[3] - prior.beta_mS);
        return 0;
    }
};

} // namespace

CalibrationResult calibrate(const std::vector<Anchor>& anchors, const DeviceParams& base) {
    if (anchors.size() < 2) throw domain_error("calibrate: underdetermined, need at least 2 anchors");
    bool distinct = false;
    for (const auto& a : anchors)
        if (a.cell.g_m1 != anchors[0].cell.g_m1 || a.cell.g_m2 != anchors[0].cell.g_m2)
            distinct = true;
    if (!distinct) throw domain_error("calibrate: anchors need distinct conductances");
    for (const auto& a : anchors) {
        if (a.cell.g_m1 <= 0 || a.cell.g_m2 <= 0)
            throw domain_error("calibrate: anchor conductances must be > 0");
        if (a.target.lo > a.target.hi) throw domain_error("calibrate: anchor interval lo > hi");
    }

    FitFunctor f{&anchors, base, {}};
    Eigen::NumericalDiff<FitFunctor> nd(f);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<FitFunctor>> lm(nd);
    lm.parameters.xtol = 1e-14;
    lm.parameters.ftol = 1e-14;
    lm.parameters.maxfev = 4000;
    Eigen::VectorXd x(4);
    x << f.prior.v_th, f.prior.v_th_ml, f.prior.v_th_inv, f.prior.beta_mS;
    lm.minimize(x);

    CalibrationResult out;
    out.params = f.unpack(x);
    try {
        out.params.validate();
    } catch (const error&) {
        throw error(error_kind::convergence, "calibrate: fit left the valid parameter region");
    }
    for (const auto& a : anchors) {
        VoltageInterval iv;
        try {
            iv = {lower_bound(a.cell.g_m1, out.params), upper_bound(a.cell.g_m2, out.params)};
        } catch (const error&) {
            throw error(error_kind::convergence, "calibrate: anchor not reproducible by fit");
        }
        VoltageInterval res{iv.lo - a.target.lo, iv.hi - a.target.hi};
        out.residuals.push_back(res);
        out.max_residual = std::max({out.max_residual, std::abs(res.lo), std::abs(res.hi)});
    }
    if (out.max_residual > 15e-3)
        throw error(error_kind::convergence,
                    "calibrate: residual " + std::to_string(out.max_residual * 1e3) +
                        " mV exceeds 15 mV");
    return out;
}

std::vector<Anchor> reference_anchors() {
    return {{{40e-6, 80e-6}, {0.37, 0.42}}, {{20e-6, 80e-6}, {0.33, 0.43}}};
}

const DeviceParams& calibrated_defaults() {
    static const DeviceParams p = calibrate(reference_anchors()).params;
    return p;
}

} // namespace acam
