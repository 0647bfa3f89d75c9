#include "acam/json_io.hpp"
#include "acam/error.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace acam {

namespace {

// Reads an optional number field scaled to SI.
void get(const json& j, const char* key, double& dst, double scale = 1.0) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_number()) throw parse_error(std::string("field '") + key + "' must be a number");
    dst = it->get<double>() * scale;
}

void get(const json& j, const char* key, int& dst) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_number_integer()) throw parse_error(std::string("field '") + key + "' must be an integer");
    dst = it->get<int>();
}

const json& require(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw parse_error(std::string("missing field '") + key + "'");
    return *it;
}

double num(const json& j, const char* key, double scale = 1.0) {
    const json& v = require(j, key);
    if (!v.is_number()) throw parse_error(std::string("field '") + key + "' must be a number");
    return v.get<double>() * scale;
}

// Scales an SI value to the file unit, trimmed to 12 significant digits so a
// read/write cycle is a fixed point.
double si(double x, double scale) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x * scale);
    return std::strtod(buf, nullptr);
}

void require_object(const json& j, const char* what) {
    if (!j.is_object()) throw parse_error(std::string(what) + " must be a JSON object");
}

const char* scaling_name(scaling s) { return to_string(s); }

scaling scaling_from(const std::string& s) {
    if (s == "per-cell") return scaling::per_cell;
    if (s == "per-row") return scaling::per_row;
    if (s == "per-column") return scaling::per_column;
    if (s == "fixed") return scaling::fixed;
    throw parse_error("unknown scaling mode '" + s + "'");
}

} // namespace

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        long line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
        throw parse_error(what + ": malformed JSON at line " + std::to_string(line));
    }
}

DeviceParams device_from_json(const json& j, const DeviceParams& base) {
    require_object(j, "device");
    DeviceParams p = base;
    get(j, "v_slhi_V", p.v_slhi);
    get(j, "v_th_V", p.v_th);
    get(j, "v_th_ml_V", p.v_th_ml);
    get(j, "v_th_inv_V", p.v_th_inv);
    get(j, "beta_uS_per_V", p.beta, 1e-6);
    get(j, "g_on_uS", p.g_on, 1e-6);
    get(j, "g_off_uS", p.g_off, 1e-6);
    get(j, "swing_mV_per_dec", p.swing, 1e-3);
    get(j, "alpha", p.alpha);
    get(j, "inv_gain", p.inv_gain);
    get(j, "blend_mV", p.blend, 1e-3);
    get(j, "pulldown_blend_mV", p.pulldown_blend, 1e-3);
    get(j, "g_min_uS", p.g_min, 1e-6);
    get(j, "g_max_uS", p.g_max, 1e-6);
    get(j, "sigma_prog_uS", p.sigma_prog, 1e-6);
    p.validate();
    return p;
}

json to_json(const DeviceParams& p) {
    return {{"v_slhi_V", p.v_slhi},
            {"v_th_V", p.v_th},
            {"v_th_ml_V", p.v_th_ml},
            {"v_th_inv_V", p.v_th_inv},
            {"beta_uS_per_V", si(p.beta, 1e6)},
            {"g_on_uS", si(p.g_on, 1e6)},
            {"g_off_uS", si(p.g_off, 1e6)},
            {"swing_mV_per_dec", si(p.swing, 1e3)},
            {"alpha", p.alpha},
            {"inv_gain", p.inv_gain},
            {"blend_mV", si(p.blend, 1e3)},
            {"pulldown_blend_mV", si(p.pulldown_blend, 1e3)},
            {"g_min_uS", si(p.g_min, 1e6)},
            {"g_max_uS", si(p.g_max, 1e6)},
            {"sigma_prog_uS", si(p.sigma_prog, 1e6)}};
}

namespace {

TsDeviceParams ts_from_json(const json& j, TsDeviceParams t) {
    require_object(j, "ts_device");
    get(j, "v_threshold_V", t.v_threshold);
    get(j, "v_hold_V", t.v_hold);
    get(j, "swing_ts_mV_per_dec", t.swing_ts, 1e-3);
    get(j, "g_ts_on_uS", t.g_ts_on, 1e-6);
    get(j, "g_ts_off_uS", t.g_ts_off, 1e-6);
    t.validate();
    return t;
}

json to_json(const TsDeviceParams& t) {
    return {{"v_threshold_V", t.v_threshold},
            {"v_hold_V", t.v_hold},
            {"swing_ts_mV_per_dec", si(t.swing_ts, 1e3)},
            {"g_ts_on_uS", si(t.g_ts_on, 1e6)},
            {"g_ts_off_uS", si(t.g_ts_off, 1e6)}};
}

void electrical_from_json(const json& j, ArraySpec& a) {
    get(j, "v_precharge_V", a.v_precharge);
    get(j, "t_sense_ps", a.t_sense, 1e-12);
    get(j, "sense_frac", a.sense_frac);
    get(j, "c_fixed_fF", a.c_fixed, 1e-15);
    if (auto it = j.find("variant"); it != j.end()) {
        std::string v = it->get<std::string>();
        if (v == "mosfet")
            a.kind = variant::transistor_pulldown;
        else if (v == "ts")
            a.kind = variant::ts_pullup;
        else
            throw parse_error("variant must be 'mosfet' or 'ts'");
    }
    if (auto it = j.find("parasitics"); it != j.end()) {
        Parasitics& q = a.parasitics;
        get(*it, "r_ml_ohm", q.r_ml);
        get(*it, "r_dl_ohm", q.r_dl);
        get(*it, "r_sl_ohm", q.r_sl);
        get(*it, "c_ml_fF", q.c_ml, 1e-15);
        get(*it, "c_dl_fF", q.c_dl, 1e-15);
        get(*it, "c_sl_fF", q.c_sl, 1e-15);
    }
}

json electrical_json(const ArraySpec& a) {
    const Parasitics& q = a.parasitics;
    return {{"variant", a.kind == variant::ts_pullup ? "ts" : "mosfet"},
            {"v_precharge_V", a.v_precharge},
            {"t_sense_ps", si(a.t_sense, 1e12)},
            {"sense_frac", a.sense_frac},
            {"c_fixed_fF", si(a.c_fixed, 1e15)},
            {"parasitics",
             {{"r_ml_ohm", q.r_ml},
              {"r_dl_ohm", q.r_dl},
              {"r_sl_ohm", q.r_sl},
              {"c_ml_fF", si(q.c_ml, 1e15)},
              {"c_dl_fF", si(q.c_dl, 1e15)},
              {"c_sl_fF", si(q.c_sl, 1e15)}}}};
}

} // namespace

Config config_from_json(const json& j, const Config& base) {
    require_object(j, "config");
    Config c = base;
    if (auto it = j.find("device"); it != j.end()) c.device = device_from_json(*it, c.device);
    if (auto it = j.find("ts_device"); it != j.end()) c.ts = ts_from_json(*it, c.ts);
    if (auto it = j.find("array"); it != j.end()) electrical_from_json(*it, c.electrical);
    c.electrical.ts = c.ts;
    if (auto it = j.find("energy"); it != j.end()) {
        const json& e = *it;
        if (auto comps = e.find("components"); comps != e.end()) {
            c.energy.components.clear();
            for (const auto& x : *comps)
                c.energy.components.push_back({require(x, "name").get<std::string>(), num(x, "fJ"),
                                               scaling_from(require(x, "scaling").get<std::string>())});
        }
        get(e, "ref_rows", c.energy.ref_rows);
        get(e, "ref_cols", c.energy.ref_cols);
        get(e, "e_per_cell_fJ", c.energy.e_per_cell_fJ);
        get(e, "sram_tcam_fJ_per_bit", c.energy.sram_tcam_fJ_per_bit);
        get(e, "memristor_tcam_fJ_per_bit", c.energy.memristor_tcam_fJ_per_bit);
        c.energy.validate();
    }
    if (auto it = j.find("area"); it != j.end()) {
        get(*it, "area_acam_cell_um2", c.area.area_acam_cell);
        get(*it, "area_tcam_cell_um2", c.area.area_tcam_cell);
        get(*it, "transistors_per_acam_cell", c.area.transistors_per_acam_cell);
        get(*it, "transistors_per_sram_tcam_cell", c.area.transistors_per_sram_tcam_cell);
        c.area.validate();
    }
    return c;
}

json to_json(const Config& c) {
    json comps = json::array();
    for (const auto& x : c.energy.components)
        comps.push_back({{"name", x.name}, {"fJ", x.fJ}, {"scaling", scaling_name(x.mode)}});
    return {{"device", to_json(c.device)},
            {"ts_device", to_json(c.ts)},
            {"array", electrical_json(c.electrical)},
            {"energy",
             {{"components", comps},
              {"ref_rows", c.energy.ref_rows},
              {"ref_cols", c.energy.ref_cols},
              {"e_per_cell_fJ", c.energy.e_per_cell_fJ},
              {"sram_tcam_fJ_per_bit", c.energy.sram_tcam_fJ_per_bit},
              {"memristor_tcam_fJ_per_bit", c.energy.memristor_tcam_fJ_per_bit}}},
            {"area",
             {{"area_acam_cell_um2", c.area.area_acam_cell},
              {"area_tcam_cell_um2", c.area.area_tcam_cell},
              {"transistors_per_acam_cell", c.area.transistors_per_acam_cell},
              {"transistors_per_sram_tcam_cell", c.area.transistors_per_sram_tcam_cell}}}};
}

std::vector<Anchor> anchors_from_json(const json& j) {
    const json& list = j.is_array() ? j : require(j, "anchors");
    if (!list.is_array()) throw parse_error("anchors must be a JSON array");
    std::vector<Anchor> out;
    for (const auto& a : list)
        out.push_back({{num(a, "g_m1_uS", 1e-6), num(a, "g_m2_uS", 1e-6)}, {num(a, "lo_V"), num(a, "hi_V")}});
    return out;
}

json to_json(const CalibrationResult& r) {
    json res = json::array();
    for (const auto& x : r.residuals) res.push_back({{"lo_mV", si(x.lo, 1e3)}, {"hi_mV", si(x.hi, 1e3)}});
    return {{"residuals", res}, {"max_residual_mV", si(r.max_residual, 1e3)}};
}

ArraySpec array_from_json(const json& j, const ArraySpec& electrical) {
    require_object(j, "array");
    ArraySpec a = electrical;
    electrical_from_json(j, a);
    if (!j.contains("cells") && j.contains("uniform")) {
        int rows = 1, cols = 1;
        get(j, "rows", rows);
        get(j, "cols", cols);
        if (rows < 1 || cols < 1) throw parse_error("rows and cols must be >= 1");
        const json& u = j["uniform"];
        ArraySpec out = uniform_array(rows, cols, {num(u, "g_m1_uS", 1e-6), num(u, "g_m2_uS", 1e-6)});
        out.parasitics = a.parasitics;
        out.v_precharge = a.v_precharge;
        out.t_sense = a.t_sense;
        out.sense_frac = a.sense_frac;
        out.c_fixed = a.c_fixed;
        out.kind = a.kind;
        out.ts = a.ts;
        return out;
    }
    const json& cells = require(j, "cells");
    if (!cells.is_array() || cells.empty()) throw parse_error("cells must be a non-empty array of rows");
    a.rows = static_cast<int>(cells.size());
    a.cols = static_cast<int>(cells[0].size());
    a.cells.clear();
    for (const auto& row : cells) {
        if (!row.is_array() || static_cast<int>(row.size()) != a.cols)
            throw parse_error("cells rows must all have the same length");
        for (const auto& c : row) a.cells.push_back({num(c, "g_m1_uS", 1e-6), num(c, "g_m2_uS", 1e-6)});
    }
    return a;
}

json to_json(const ArraySpec& a) {
    json j = electrical_json(a);
    j["rows"] = a.rows;
    j["cols"] = a.cols;
    json cells = json::array();
    for (int r = 0; r < a.rows; ++r) {
        json row = json::array();
        for (int c = 0; c < a.cols; ++c)
            row.push_back({{"g_m1_uS", si(a.cell(r, c).g_m1, 1e6)}, {"g_m2_uS", si(a.cell(r, c).g_m2, 1e6)}});
        cells.push_back(row);
    }
    j["cells"] = cells;
    return j;
}

std::vector<RangeRule> rules_from_jsonl(const std::string& text) {
    std::vector<RangeRule> out;
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error&) {
            throw parse_error("rules: malformed JSON at line " + std::to_string(n));
        }
        try {
            RangeRule r;
            r.lo = require(j, "lo").get<std::uint64_t>();
            r.hi = require(j, "hi").get<std::uint64_t>();
            r.width_bits = require(j, "width_bits").get<int>();
            if (auto it = j.find("label"); it != j.end())
                r.label = it->is_string() ? it->get<std::string>() : it->dump();
            else
                r.label = "r" + std::to_string(out.size());
            r.validate();
            out.push_back(r);
        } catch (const json::exception&) {
            throw parse_error("rules: bad field types at line " + std::to_string(n));
        } catch (const error& e) {
            throw error(e.kind(), std::string(e.what()) + " at line " + std::to_string(n));
        }
    }
    return out;
}

namespace {

int tree_node_from_json(const json& j, DecisionTree& t) {
    require_object(j, "tree node");
    int idx = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    if (j.contains("label") && !j.contains("feature")) {
        const json& l = j["label"];
        t.nodes[idx].label = l.is_string() ? l.get<std::string>() : l.dump();
        return idx;
    }
    TreeNode n;
    n.leaf = false;
    n.feature = require(j, "feature").get<int>();
    n.threshold = num(j, "threshold");
    n.left = tree_node_from_json(require(j, "left"), t);
    n.right = tree_node_from_json(require(j, "right"), t);
    t.nodes[idx] = n;
    return idx;
}

json tree_node_json(const DecisionTree& t, int i) {
    const TreeNode& n = t.nodes[i];
    if (n.leaf) return {{"label", n.label}};
    return {{"feature", n.feature},
            {"threshold", n.threshold},
            {"left", tree_node_json(t, n.left)},
            {"right", tree_node_json(t, n.right)}};
}

json features_json(const std::vector<FeatureEncoding>& fs) {
    json a = json::array();
    for (const auto& f : fs) a.push_back({{"name", f.name}, {"min", f.min}, {"max", f.max}});
    return a;
}

std::vector<FeatureEncoding> features_from_json(const json& j) {
    std::vector<FeatureEncoding> out;
    for (const auto& f : j) {
        FeatureEncoding e;
        e.name = f.contains("name") ? f["name"].get<std::string>() : "f" + std::to_string(out.size());
        e.min = num(f, "min");
        e.max = num(f, "max");
        out.push_back(e);
    }
    return out;
}

DigitSpec digit_from_string(const std::string& s) {
    if (s == "*") return {digit_kind::wildcard, 0, 0};
    auto dash = s.find('-');
    try {
        if (dash == std::string::npos) {
            int v = std::stoi(s);
            return {digit_kind::exact, v, v};
        }
        return {digit_kind::subrange, std::stoi(s.substr(0, dash)), std::stoi(s.substr(dash + 1))};
    } catch (const std::exception&) {
        throw parse_error("bad digit '" + s + "'");
    }
}

std::string digit_to_string(const DigitSpec& d) {
    switch (d.kind) {
    case digit_kind::wildcard: return "*";
    case digit_kind::exact: return std::to_string(d.n);
    case digit_kind::subrange: return std::to_string(d.n) + "-" + std::to_string(d.m);
    }
    return "*";
}

} // namespace

DecisionTree tree_from_json(const json& j) {
    require_object(j, "tree");
    DecisionTree t;
    try {
        t.features = features_from_json(require(j, "features"));
        tree_node_from_json(require(j, "root"), t);
    } catch (const json::exception& e) {
        throw parse_error(std::string("tree: ") + e.what());
    }
    t.validate();
    return t;
}

json to_json(const DecisionTree& t) {
    return {{"features", features_json(t.features)}, {"root", tree_node_json(t, 0)}};
}

json to_json(const CamTable& t) {
    json j;
    j["kind"] = t.kind == table_kind::ternary ? "ternary" : t.kind == table_kind::digit ? "digit" : "interval";
    j["bits_per_cell"] = t.bits_per_cell;
    j["width_bits"] = t.width_bits;
    j["cols"] = t.cols();
    if (t.kind == table_kind::interval) {
        j["features"] = features_json(t.features);
        j["edge_guard_mV"] = si(t.edge_guard, 1e3);
    } else {
        json rules = json::array();
        for (const auto& r : t.rules)
            rules.push_back({{"lo", r.lo}, {"hi", r.hi}, {"width_bits", r.width_bits}, {"label", r.label}});
        j["rules"] = rules;
    }
    json rows = json::array();
    for (const auto& r : t.rows) {
        json word;
        if (t.kind == table_kind::ternary) {
            word = r.ternary.symbols;
        } else if (t.kind == table_kind::digit) {
            word = json::array();
            for (const auto& d : r.digit.digits) word.push_back(digit_to_string(d));
        } else {
            word = json::array();
            for (const auto& f : r.interval.features) {
                if (f.wildcard)
                    word.push_back("*");
                else
                    word.push_back({{"lo", f.lo}, {"hi", f.hi}, {"lo_closed", f.lo_closed}, {"hi_closed", f.hi_closed}});
            }
        }
        rows.push_back({{"word", word}, {"label", r.label}});
    }
    j["rows"] = rows;
    return j;
}

CamTable table_from_json(const json& j) {
    require_object(j, "table");
    CamTable t;
    try {
        std::string kind = require(j, "kind").get<std::string>();
        if (kind == "ternary")
            t.kind = table_kind::ternary;
        else if (kind == "digit")
            t.kind = table_kind::digit;
        else if (kind == "interval")
            t.kind = table_kind::interval;
        else
            throw parse_error("unknown table kind '" + kind + "'");
        get(j, "bits_per_cell", t.bits_per_cell);
        get(j, "width_bits", t.width_bits);
        if (t.kind == table_kind::interval) {
            t.features = features_from_json(require(j, "features"));
            get(j, "edge_guard_mV", t.edge_guard, 1e-3);
        } else if (auto it = j.find("rules"); it != j.end()) {
            for (const auto& r : *it)
                t.rules.push_back({r["lo"].get<std::uint64_t>(), r["hi"].get<std::uint64_t>(),
                                   r["width_bits"].get<int>(), r["label"].get<std::string>()});
        }
        for (const auto& row : require(j, "rows")) {
            CamRow r;
            r.label = row.contains("label") ? row["label"].get<std::string>() : "";
            const json& w = require(row, "word");
            if (t.kind == table_kind::ternary) {
                r.ternary.symbols = w.get<std::string>();
                if (static_cast<int>(r.ternary.symbols.size()) != t.width_bits ||
                    r.ternary.symbols.find_first_not_of("01X") != std::string::npos)
                    throw parse_error("bad ternary word '" + r.ternary.symbols + "'");
            } else if (t.kind == table_kind::digit) {
                for (const auto& d : w) r.digit.digits.push_back(digit_from_string(d.get<std::string>()));
                if (static_cast<int>(r.digit.digits.size()) != t.cols())
                    throw parse_error("digit row has the wrong width");
            } else {
                for (const auto& f : w) {
                    FeatureInterval fi;
                    if (!f.is_string()) {
                        fi.wildcard = false;
                        fi.lo = num(f, "lo");
                        fi.hi = num(f, "hi");
                        fi.lo_closed = f.value("lo_closed", true);
                        fi.hi_closed = f.value("hi_closed", true);
                    }
                    r.interval.features.push_back(fi);
                }
                if (r.interval.features.size() != t.features.size())
                    throw parse_error("interval row has the wrong width");
            }
            t.rows.push_back(r);
        }
    } catch (const json::exception& e) {
        throw parse_error(std::string("table: ") + e.what());
    }
    if (t.kind != table_kind::interval && (t.bits_per_cell < 1 || t.width_bits < 1))
        throw parse_error("table needs bits_per_cell and width_bits");
    return t;
}

json to_json(const CostReport& r) {
    json j;
    if (!r.energy.empty()) {
        json e = json::array();
        for (const auto& c : r.energy) e.push_back({{"name", c.name}, {"fJ", c.fJ}, {"scaling", scaling_name(c.mode)}});
        j["array"] = {{"rows", r.rows}, {"cols", r.cols}};
        j["energy"] = e;
        j["total_fJ"] = r.total_fJ;
        j["per_cell_fJ"] = r.per_cell_fJ;
    }
    if (!r.implementations.empty()) {
        json impl = json::array();
        for (const auto& c : r.implementations) {
            json x = {{"name", c.name},       {"bits_per_cell", c.bits_per_cell},
                      {"rows", c.rows},       {"digits", c.digits},
                      {"cells", c.cells},     {"transistors", c.transistors},
                      {"area_um2", c.area_um2}, {"energy_fJ", c.energy_fJ},
                      {"cell_reduction", c.cell_reduction},
                      {"transistor_reduction", c.transistor_reduction},
                      {"area_reduction", c.area_reduction}};
            x["fJ_per_tcam_bit"] = c.fJ_per_tcam_bit ? json(*c.fJ_per_tcam_bit) : json("n/a");
            impl.push_back(x);
        }
        j["implementations"] = impl;
    }
    if (!r.baselines.empty()) {
        json b = json::array();
        for (const auto& x : r.baselines)
            b.push_back({{"name", x.name}, {"fJ_per_bit", x.fJ_per_bit}, {"ratio", x.ratio ? json(*x.ratio) : json("n/a")}});
        j["baselines"] = b;
    }
    j["assumptions"] = r.assumptions;
    return j;
}

} // namespace acam
