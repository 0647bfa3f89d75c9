#include "acam/compiler.hpp"
#include "acam/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace acam {

void RangeRule::validate() const {
    if (width_bits < 1 || width_bits > 63) throw domain_error("rule: width_bits must be in [1, 63]");
    if (lo > hi) throw domain_error("rule: lo > hi");
    if (hi >> width_bits) throw domain_error("rule: hi does not fit in width_bits");
}

bool TernaryWord::matches(std::uint64_t x) const {
    const int w = static_cast<int>(symbols.size());
    for (int i = 0; i < w; ++i) {
        char s = symbols[i];
        if (s == 'X') continue;
        int bit = static_cast<int>((x >> (w - 1 - i)) & 1u);
        if (bit != s - '0') return false;
    }
    return (w >= 64) || (x >> w) == 0;
}

bool DigitSpec::matches(int d) const {
    switch (kind) {
    case digit_kind::exact: return d == n;
    case digit_kind::wildcard: return true;
    case digit_kind::subrange: return d >= n && d <= m;
    }
    return false;
}

bool DigitWord::matches(std::uint64_t x, int bits_per_cell) const {
    const int nd = static_cast<int>(digits.size());
    const std::uint64_t mask = (std::uint64_t{1} << bits_per_cell) - 1;
    for (int i = 0; i < nd; ++i) {
        int d = static_cast<int>((x >> (bits_per_cell * (nd - 1 - i))) & mask);
        if (!digits[i].matches(d)) return false;
    }
    return bits_per_cell * nd >= 64 || (x >> (bits_per_cell * nd)) == 0;
}

bool FeatureInterval::contains(double x) const {
    if (wildcard) return true;
    bool above = lo_closed ? x >= lo : x > lo;
    bool below = hi_closed ? x <= hi : x < hi;
    return above && below;
}

int CamTable::cols() const {
    switch (kind) {
    case table_kind::ternary: return width_bits;
    case table_kind::digit: return (width_bits + bits_per_cell - 1) / bits_per_cell;
    case table_kind::interval: return static_cast<int>(features.size());
    }
    return 0;
}

std::vector<TernaryWord> range_to_ternary(const RangeRule& r) {
    r.validate();
    const int w = r.width_bits;
    std::vector<TernaryWord> out;
    std::uint64_t lo = r.lo;
    while (true) {
        // largest aligned power-of-two block starting at lo that stays inside the range
        int k = 0;
        while (k < w) {
            std::uint64_t size = std::uint64_t{1} << (k + 1);
            if ((lo & (size - 1)) != 0 || lo + size - 1 > r.hi) break;
            ++k;
        }
        std::string s(w, 'X');
        for (int i = 0; i < w - k; ++i) s[i] = ((lo >> (w - 1 - i)) & 1u) ? '1' : '0';
        out.push_back({s});
        std::uint64_t end = lo + (std::uint64_t{1} << k) - 1;
        if (end >= r.hi) break;
        lo = end + 1;
    }
    return out;
}

namespace {

DigitSpec make_digit(int a, int b, int base) {
    if (a == 0 && b == base - 1) return {digit_kind::wildcard, 0, 0};
    if (a == b) return {digit_kind::exact, a, a};
    return {digit_kind::subrange, a, b};
}

// Row with higher digits fixed to `prefix`, digit j in [a, b], lower digits wildcard.
DigitWord digit_row(std::int64_t prefix, int j, int a, int b, int k, int nd) {
    const int base = 1 << k;
    DigitWord w;
    w.digits.resize(nd);
    for (int i = nd - 1; i >= 0; --i) {
        DigitSpec& d = w.digits[nd - 1 - i];
        if (i > j) {
            int v = static_cast<int>((static_cast<std::uint64_t>(prefix) >> (k * (i - j - 1))) &
                                     (base - 1));
            d = {digit_kind::exact, v, v};
        } else if (i == j) {
            d = make_digit(a, b, base);
        } else {
            d = {digit_kind::wildcard, 0, 0};
        }
    }
    return w;
}

} // namespace

std::vector<DigitWord> range_to_digits(const RangeRule& r, int bits_per_cell) {
    r.validate();
    const int k = bits_per_cell;
    if (k < 1 || k > r.width_bits) throw domain_error("bits_per_cell must be in [1, width_bits]");
    if (k > 30) throw domain_error("bits_per_cell above 30 is not supported");
    const int nd = (r.width_bits + k - 1) / k;
    const std::int64_t base = std::int64_t{1} << k;

    std::vector<DigitWord> lower, upper;
    std::int64_t lo = static_cast<std::int64_t>(r.lo), hi = static_cast<std::int64_t>(r.hi);
    for (int j = 0; lo <= hi; ++j) {
        if (j == nd - 1 || lo / base == hi / base) {
            lower.push_back(digit_row(lo / base, j, static_cast<int>(lo % base),
                                      static_cast<int>(hi % base), k, nd));
            break;
        }
        // peel partial digits at both ends, keep the aligned middle for the next level
        if (lo % base != 0) {
            lower.push_back(digit_row(lo / base, j, static_cast<int>(lo % base),
                                      static_cast<int>(base - 1), k, nd));
            lo = lo / base + 1;
        } else {
            lo = lo / base;
        }
        if (hi % base != base - 1) {
            upper.push_back(digit_row(hi / base, j, 0, static_cast<int>(hi % base), k, nd));
            hi = hi / base - 1;
        } else {
            hi = hi / base;
        }
    }
    lower.insert(lower.end(), upper.rbegin(), upper.rend());
    return lower;
}

CamTable compile_rules(const std::vector<RangeRule>& rules, int bits_per_cell) {
    CamTable t;
    t.kind = bits_per_cell == 0 ? table_kind::ternary : table_kind::digit;
    t.bits_per_cell = bits_per_cell == 0 ? 1 : bits_per_cell;
    t.rules = rules;
    for (const auto& r : rules) {
        r.validate();
        if (t.width_bits == 0) t.width_bits = r.width_bits;
        if (r.width_bits != t.width_bits)
            throw domain_error("all rules in one table need the same width_bits");
        if (t.kind == table_kind::ternary) {
            for (auto& w : range_to_ternary(r)) t.rows.push_back({w, {}, {}, r.label});
        } else {
            for (auto& w : range_to_digits(r, bits_per_cell)) t.rows.push_back({{}, w, {}, r.label});
        }
    }
    return t;
}

void DecisionTree::validate() const {
    if (nodes.empty()) throw domain_error("tree has no nodes");
    std::vector<int> seen(nodes.size(), 0);
    std::vector<int> stack{0};
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        if (seen[i]++) throw domain_error("tree node " + std::to_string(i) + " reached twice");
        const TreeNode& n = nodes[i];
        if (n.leaf) continue;
        if (n.feature < 0 || n.feature >= static_cast<int>(features.size()))
            throw domain_error("tree node " + std::to_string(i) + " uses unknown feature");
        if (!std::isfinite(n.threshold))
            throw domain_error("tree node " + std::to_string(i) + " has non-finite threshold");
        for (int c : {n.left, n.right}) {
            if (c < 0 || c >= static_cast<int>(nodes.size()))
                throw domain_error("tree node " + std::to_string(i) + " has a bad child");
            stack.push_back(c);
        }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (!seen[i]) throw domain_error("tree node " + std::to_string(i) + " unreachable");
    for (const auto& f : features)
        if (!(f.min < f.max)) throw domain_error("feature " + f.name + " has empty domain");
}

CamTable tree_to_cam(const DecisionTree& t) {
    t.validate();
    CamTable out;
    out.kind = table_kind::interval;
    out.bits_per_cell = 0;
    out.features = t.features;
    const int nf = static_cast<int>(t.features.size());

    struct Frame {
        int node;
        std::vector<FeatureInterval> iv;
    };
    std::vector<Frame> stack;
    stack.push_back({0, std::vector<FeatureInterval>(nf)});
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        const TreeNode& n = t.nodes[f.node];
        if (n.leaf) {
            out.rows.push_back({{}, {}, {f.iv}, n.label});
            continue;
        }
        const FeatureEncoding& enc = t.features[n.feature];
        auto narrowed = [&](bool right) {
            std::vector<FeatureInterval> iv = f.iv;
            FeatureInterval& x = iv[n.feature];
            if (x.wildcard) x = {false, enc.min, enc.max, true, true};
            if (right) {
                if (n.threshold > x.lo || (n.threshold == x.lo && !x.lo_closed)) {
                    x.lo = n.threshold;
                    x.lo_closed = true;
                }
            } else if (n.threshold < x.hi || (n.threshold == x.hi && x.hi_closed)) {
                x.hi = n.threshold;
                x.hi_closed = false;
            }
            if (x.lo > x.hi || (x.lo == x.hi && !(x.lo_closed && x.hi_closed)))
                throw domain_error("malformed tree: contradictory constraints on feature " +
                                   enc.name + " below node " + std::to_string(f.node));
            return iv;
        };
        // push right first so rows come out left-to-right
        stack.push_back({n.right, narrowed(true)});
        stack.push_back({n.left, narrowed(false)});
    }
    return out;
}

std::string traverse(const DecisionTree& t, const std::vector<double>& x) {
    int i = 0;
    while (!t.nodes[i].leaf) {
        const TreeNode& n = t.nodes[i];
        i = x[n.feature] < n.threshold ? n.left : n.right;
    }
    return t.nodes[i].label;
}

LevelFamily default_level_family(int bits_per_cell, const DeviceParams& p) {
    if (bits_per_cell < 1 || bits_per_cell > 16) throw domain_error("bits_per_cell out of range");
    VoltageInterval w = achievable_window(p);
    w.lo += 5e-3;
    w.hi -= 5e-3;
    const int n = 1 << bits_per_cell;
    const double pitch = (w.hi - w.lo) / n;
    return {n, w, std::min(10e-3, 0.4 * pitch)};
}

VoltageInterval tree_voltage_window(const CamTable& t, const DeviceParams& p) {
    VoltageInterval w = achievable_window(p);
    return {w.lo + 5e-3 + 2 * t.edge_guard, w.hi - 5e-3 - t.edge_guard};
}

namespace {

double encode_value(double x, const FeatureEncoding& f, const VoltageInterval& w) {
    return w.lo + (x - f.min) / (f.max - f.min) * (w.hi - w.lo);
}

CellConfig lower_digit(const DigitSpec& d, const std::vector<LevelCode>& levels,
                       const DeviceParams& p) {
    if (d.kind == digit_kind::wildcard) return {p.g_min, p.g_max};
    int a = d.n, b = d.kind == digit_kind::exact ? d.n : d.m;
    if (a < 0 || b >= static_cast<int>(levels.size()) || a > b)
        throw domain_error("digit value outside the level family");
    return conductance_from_bounds({levels[a].interval.lo, levels[b].interval.hi}, p);
}

} // namespace

std::vector<CellConfig> lower_to_conductances(const CamTable& t, const DeviceParams& p,
                                              const LevelFamily& family) {
    const int cols = t.cols();
    std::vector<CellConfig> out;
    out.reserve(t.rows.size() * cols);

    if (t.kind == table_kind::interval) {
        const VoltageInterval w = tree_voltage_window(t, p);
        const double g = t.edge_guard;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            for (int c = 0; c < cols; ++c) {
                const FeatureInterval& f = t.rows[r].interval.features[c];
                const FeatureEncoding& e = t.features[c];
                CellConfig cell{p.g_min, p.g_max};
                if (!f.wildcard) {
                    VoltageInterval full = achievable_window(p);
                    // thresholds belong to the closed side; see tie rule in README
                    if (f.lo > e.min || !f.lo_closed) {
                        double v = encode_value(f.lo, e, w) + (f.lo_closed ? -g : 2 * g);
                        cell.g_m1 = conductance_from_bounds({std::clamp(v, full.lo, full.hi), full.hi}, p).g_m1;
                    }
                    if (f.hi < e.max || !f.hi_closed) {
                        double v = encode_value(f.hi, e, w) + (f.hi_closed ? g : -2 * g);
                        cell.g_m2 = conductance_from_bounds({full.lo, std::clamp(v, full.lo, full.hi)}, p).g_m2;
                    }
                }
                out.push_back(cell);
            }
        }
        return out;
    }

    const int n_needed = 1 << t.bits_per_cell;
    if (family.n_levels < n_needed)
        throw domain_error("level family has " + std::to_string(family.n_levels) +
                           " levels, table needs " + std::to_string(n_needed));
    const VoltageInterval full = achievable_window(p);
    if (family.window.lo < full.lo || family.window.hi > full.hi)
        throw domain_error("level window exceeds the calibrated window");
    const auto levels = quantize_levels(family.n_levels, family.window, family.guard);

    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (int c = 0; c < cols; ++c) {
            DigitSpec d;
            if (t.kind == table_kind::ternary) {
                char s = t.rows[r].ternary.symbols[c];
                d = s == 'X' ? DigitSpec{digit_kind::wildcard, 0, 0}
                             : DigitSpec{digit_kind::exact, s - '0', s - '0'};
            } else {
                d = t.rows[r].digit.digits[c];
            }
            try {
                out.push_back(lower_digit(d, levels, p));
            } catch (const error& e) {
                throw error(e.kind(), "row " + std::to_string(r) + " digit " + std::to_string(c) +
                                          " (" + to_string(d) + "): " + e.what());
            }
        }
    }
    return out;
}

std::vector<CellConfig> lower_to_conductances(const CamTable& t, const DeviceParams& p) {
    if (t.kind == table_kind::interval) return lower_to_conductances(t, p, LevelFamily{});
    return lower_to_conductances(t, p, default_level_family(t.bits_per_cell, p));
}

std::vector<double> encode_key(const CamTable& t, std::uint64_t x, const LevelFamily& levels) {
    if (t.kind == table_kind::interval) throw domain_error("interval tables take feature vectors");
    if (t.width_bits < 64 && (x >> t.width_bits)) throw domain_error("key does not fit the table width");
    const int k = t.bits_per_cell, nd = t.cols();
    const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
    std::vector<double> v(nd);
    for (int i = 0; i < nd; ++i) {
        int d = static_cast<int>((x >> (k * (nd - 1 - i))) & mask);
        v[i] = level_voltage(d, levels.n_levels, levels.window);
    }
    return v;
}

std::vector<double> encode_key(const CamTable& t, std::uint64_t x, const DeviceParams& p) {
    return encode_key(t, x, default_level_family(t.bits_per_cell, p));
}

std::vector<double> encode_features(const CamTable& t, const std::vector<double>& x,
                                    const DeviceParams& p) {
    if (t.kind != table_kind::interval) throw domain_error("feature vectors need an interval table");
    if (x.size() != t.features.size())
        throw error(error_kind::invalid_argument, "feature vector length mismatch");
    const VoltageInterval w = tree_voltage_window(t, p);
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const FeatureEncoding& f = t.features[i];
        if (!(x[i] >= f.min && x[i] <= f.max))
            throw domain_error("feature " + f.name + " value outside encoded domain");
        v[i] = encode_value(x[i], f, w);
    }
    return v;
}

CompiledArray build_array(const CamTable& t, const DeviceParams& p, const ArraySpec& electrical) {
    CompiledArray c;
    c.table = t;
    c.params = p;
    if (t.kind == table_kind::interval)
        c.feature_window = tree_voltage_window(t, p);
    else
        c.levels = default_level_family(t.bits_per_cell, p);
    c.array = electrical;
    c.array.rows = static_cast<int>(t.rows.size());
    c.array.cols = t.cols();
    c.array.cells = lower_to_conductances(t, p, c.levels);
    if (c.array.rows > 0) c.array.validate();
    return c;
}

std::vector<int> matching_rows(const CompiledArray& c, const std::vector<double>& dl) {
    if (static_cast<int>(dl.size()) != c.array.cols)
        throw error(error_kind::invalid_argument, "stimulus length mismatch");
    std::vector<int> out;
    for (int r = 0; r < c.array.rows; ++r)
        if (row_matches(c.array, r, dl, c.params)) out.push_back(r);
    return out;
}

namespace {

std::string unique_label(const CompiledArray& c, const std::vector<int>& m) {
    if (m.size() != 1)
        throw error(error_kind::ambiguous, m.empty() ? "no matching row"
                                                     : std::to_string(m.size()) + " rows match");
    return c.table.rows[m[0]].label;
}

} // namespace

std::string classify(const CompiledArray& c, const std::vector<double>& features) {
    return unique_label(c, matching_rows(c, encode_features(c.table, features, c.params)));
}

std::string classify_key(const CompiledArray& c, std::uint64_t x) {
    return unique_label(c, matching_rows(c, encode_key(c.table, x, c.levels)));
}

std::string to_string(const DigitSpec& d) {
    char buf[32];
    switch (d.kind) {
    case digit_kind::wildcard: return "*";
    case digit_kind::exact: std::snprintf(buf, sizeof buf, "%X", d.n); return buf;
    case digit_kind::subrange: std::snprintf(buf, sizeof buf, "{%X-%X}", d.n, d.m); return buf;
    }
    return "?";
}

std::string table_grid(const CamTable& t) {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> head{"row"};
    const int cols = t.cols();
    for (int c = 0; c < cols; ++c) {
        if (t.kind == table_kind::interval)
            head.push_back(t.features[c].name.empty() ? "f" + std::to_string(c) : t.features[c].name);
        else
            head.push_back((t.kind == table_kind::ternary ? "b" : "d") + std::to_string(cols - 1 - c));
    }
    head.push_back("label");
    cells.push_back(head);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        std::vector<std::string> line{std::to_string(r)};
        for (int c = 0; c < cols; ++c) {
            if (t.kind == table_kind::ternary) {
                line.emplace_back(1, t.rows[r].ternary.symbols[c]);
            } else if (t.kind == table_kind::digit) {
                line.push_back(to_string(t.rows[r].digit.digits[c]));
            } else {
                const FeatureInterval& f = t.rows[r].interval.features[c];
                if (f.wildcard) {
                    line.push_back("*");
                } else {
                    char buf[96];
                    std::snprintf(buf, sizeof buf, "%c%.6g,%.6g%c", f.lo_closed ? '[' : '(', f.lo,
                                  f.hi, f.hi_closed ? ']' : ')');
                    line.push_back(buf);
                }
            }
        }
        line.push_back(t.rows[r].label);
        cells.push_back(line);
    }
    std::vector<std::size_t> width(head.size(), 0);
    for (const auto& l : cells)
        for (std::size_t i = 0; i < l.size(); ++i) width[i] = std::max(width[i], l[i].size());
    std::ostringstream os;
    for (const auto& l : cells) {
        for (std::size_t i = 0; i < l.size(); ++i) {
            os << l[i];
            if (i + 1 < l.size()) os << std::string(width[i] - l[i].size() + 2, ' ');
        }
        os << '\n';
    }
    return os.str();
}

} // namespace acam
