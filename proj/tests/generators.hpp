// Random instance generators shared by the unit tests and the acceptance binary.
#pragma once

#include "acam/array.hpp"
#include "acam/cell.hpp"
#include "acam/compiler.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace gen {

struct TreeCase {
    acam::DecisionTree tree;
    std::vector<std::vector<double>> thresholds;  // per feature, every threshold in the tree
};

// Random tree with consistent paths: each split falls inside the interval its path
// already allows, at least `gap_v` (in encoded volts) from the interval ends.
inline TreeCase random_tree(std::mt19937_64& rng, double window_v, int max_depth = 6,
                            int max_features = 4, double gap_v = 0.025) {
    std::uniform_real_distribution<double> u(0, 1);
    TreeCase tc;
    const int nf = 1 + static_cast<int>(u(rng) * max_features);
    for (int f = 0; f < nf; ++f) {
        double lo = std::round(-10 + 20 * u(rng));
        tc.tree.features.push_back({"f" + std::to_string(f), lo, lo + 1 + std::round(99 * u(rng))});
    }
    tc.thresholds.resize(nf);
    int n_leaves = 0;

    struct Box {
        std::vector<double> lo, hi;
    };
    auto build = [&](auto&& self, int depth, Box box) -> int {
        int idx = static_cast<int>(tc.tree.nodes.size());
        tc.tree.nodes.emplace_back();
        std::vector<int> usable;
        for (int f = 0; f < nf; ++f) {
            const auto& e = tc.tree.features[f];
            double gap = gap_v / window_v * (e.max - e.min);
            if (box.hi[f] - box.lo[f] > 2 * gap) usable.push_back(f);
        }
        bool leaf = depth == max_depth || usable.empty() || (depth > 0 && u(rng) < 0.2);
        if (leaf) {
            tc.tree.nodes[idx].label = "L" + std::to_string(n_leaves++);
            return idx;
        }
        int f = usable[static_cast<std::size_t>(u(rng) * usable.size())];
        const auto& e = tc.tree.features[f];
        double gap = gap_v / window_v * (e.max - e.min);
        double th = box.lo[f] + gap + u(rng) * (box.hi[f] - box.lo[f] - 2 * gap);
        tc.thresholds[f].push_back(th);
        Box l = box, r = box;
        l.hi[f] = th;
        r.lo[f] = th;
        int left = self(self, depth + 1, l);
        int right = self(self, depth + 1, r);
        acam::TreeNode& n = tc.tree.nodes[idx];
        n.leaf = false;
        n.feature = f;
        n.threshold = th;
        n.left = left;
        n.right = right;
        return idx;
    };
    Box root;
    for (const auto& e : tc.tree.features) {
        root.lo.push_back(e.min);
        root.hi.push_back(e.max);
    }
    build(build, 0, root);
    return tc;
}

// Input vector whose features are at least `margin_v` (encoded volts) away from
// every threshold of the tree.
inline std::vector<double> tree_input(std::mt19937_64& rng, const TreeCase& tc, double window_v,
                                      double margin_v = 0.010) {
    std::uniform_real_distribution<double> u(0, 1);
    const auto& fs = tc.tree.features;
    std::vector<double> x(fs.size());
    for (std::size_t f = 0; f < fs.size(); ++f) {
        double m = margin_v / window_v * (fs[f].max - fs[f].min);
        for (;;) {
            double v = fs[f].min + u(rng) * (fs[f].max - fs[f].min);
            bool ok = true;
            for (double th : tc.thresholds[f])
                if (std::abs(v - th) < m) ok = false;
            if (ok) {
                x[f] = v;
                break;
            }
        }
    }
    return x;
}

struct ContainmentCase {
    acam::ArraySpec array;
    std::vector<acam::VoltageInterval> intervals;  // row-major stored intervals
    std::vector<double> stimulus;
    std::vector<bool> expected;  // pure containment, per row
};

// Array with random stored intervals and a stimulus at least `margin` inside or
// outside every stored interval.
inline ContainmentCase containment_case(std::mt19937_64& rng, const acam::DeviceParams& p,
                                        int max_rows = 8, int max_cols = 16, double margin = 0.030) {
    std::uniform_real_distribution<double> u(0, 1);
    const acam::VoltageInterval w = acam::achievable_window(p);
    ContainmentCase c;
    const int rows = 1 + static_cast<int>(u(rng) * max_rows);
    const int cols = 1 + static_cast<int>(u(rng) * max_cols);
    c.array.rows = rows;
    c.array.cols = cols;
    for (int k = 0; k < cols; ++k) c.stimulus.push_back(w.lo + margin + u(rng) * (w.hi - w.lo - 2 * margin));
    auto span = [&](double a, double b) { return a + u(rng) * (b - a); };
    for (int r = 0; r < rows; ++r) {
        const bool match = u(rng) < 0.5;
        const int miss_col = static_cast<int>(u(rng) * cols);
        bool all = true;
        for (int k = 0; k < cols; ++k) {
            const double v = c.stimulus[k];
            bool inside = match || (k != miss_col && u(rng) < 0.7);
            acam::VoltageInterval iv;
            bool room_below = v - margin - w.lo > 1e-3, room_above = w.hi - (v + margin) > 1e-3;
            if (!inside && !room_below && !room_above) inside = true;
            if (inside) {
                double lo = span(w.lo, v - margin), hi = span(v + margin, w.hi);
                iv = {lo, hi};
            } else {
                bool below = room_below && (!room_above || u(rng) < 0.5);
                if (below) {
                    double hi = span(w.lo + 1e-3, v - margin);
                    iv = {span(w.lo, hi), hi};
                } else {
                    double lo = span(v + margin, w.hi - 1e-3);
                    iv = {lo, span(lo, w.hi)};
                }
            }
            all = all && inside;
            c.intervals.push_back(iv);
            c.array.cells.push_back(acam::conductance_from_bounds(iv, p));
        }
        c.expected.push_back(all);
    }
    return c;
}

} // namespace gen
