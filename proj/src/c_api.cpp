#include "acam/acam.h"

#include "acam/array.hpp"
#include "acam/cell.hpp"
#include "acam/compiler.hpp"
#include "acam/cost.hpp"
#include "acam/device.hpp"
#include "acam/error.hpp"
#include "acam/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>
#include <string>

struct acam_config {
    acam::Config cfg;
};

struct acam_table {
    acam::CamTable table;
};

struct acam_array {
    acam::CompiledArray c;  // table is empty for arrays loaded from cell documents
    bool has_table = false;
};

namespace {

thread_local std::string last_error;

acam_status status_of(acam::error_kind k) {
    switch (k) {
    case acam::error_kind::parse: return ACAM_ERR_PARSE;
    case acam::error_kind::domain: return ACAM_ERR_DOMAIN;
    case acam::error_kind::convergence: return ACAM_ERR_CONVERGENCE;
    case acam::error_kind::inconsistent: return ACAM_ERR_INCONSISTENT;
    case acam::error_kind::ambiguous: return ACAM_ERR_AMBIGUOUS;
    case acam::error_kind::invalid_argument: return ACAM_ERR_INVALID_ARGUMENT;
    }
    return ACAM_ERR_INTERNAL;
}

template <class F>
acam_status guard(F&& f) {
    try {
        f();
        last_error.clear();
        return ACAM_OK;
    } catch (const acam::error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const nlohmann::json::exception& e) {
        last_error = e.what();
        return ACAM_ERR_PARSE;
    } catch (const std::exception& e) {
        last_error = e.what();
        return ACAM_ERR_INTERNAL;
    }
}

acam_status null_arg(const char* what) {
    last_error = std::string("null argument: ") + what;
    return ACAM_ERR_NULL;
}

char* dup(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, ',')) {
        auto a = cur.find_first_not_of(" \t\r");
        auto b = cur.find_last_not_of(" \t\r");
        out.push_back(a == std::string::npos ? "" : cur.substr(a, b - a + 1));
    }
    return out;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

// Header lines (first field not numeric) are skipped.
bool numeric(const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end && *end == '\0';
}

std::vector<double> parse_doubles(const std::vector<std::string>& f, int line) {
    std::vector<double> v;
    for (const auto& s : f) {
        if (!numeric(s)) throw acam::parse_error("non-numeric field at line " + std::to_string(line));
        v.push_back(std::strtod(s.c_str(), nullptr));
    }
    return v;
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

const char* kind_name(acam::error_kind k) {
    switch (k) {
    case acam::error_kind::parse: return "parse";
    case acam::error_kind::domain: return "domain";
    case acam::error_kind::convergence: return "convergence";
    case acam::error_kind::inconsistent: return "inconsistent";
    case acam::error_kind::ambiguous: return "ambiguous";
    case acam::error_kind::invalid_argument: return "invalid_argument";
    }
    return "internal";
}

} // namespace

extern "C" {

const char* acam_last_error(void) { return last_error.c_str(); }

const char* acam_status_name(acam_status s) {
    switch (s) {
    case ACAM_OK: return "ok";
    case ACAM_ERR_PARSE: return "parse error";
    case ACAM_ERR_DOMAIN: return "domain error";
    case ACAM_ERR_CONVERGENCE: return "convergence error";
    case ACAM_ERR_INCONSISTENT: return "inconsistent bounds";
    case ACAM_ERR_AMBIGUOUS: return "ambiguous match";
    case ACAM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ACAM_ERR_NULL: return "null argument";
    case ACAM_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void acam_free_string(char* s) { std::free(s); }

acam_status acam_config_create(const char* json, acam_config** out) {
    if (!out) return null_arg("out");
    *out = nullptr;
    return guard([&] {
        auto h = std::make_unique<acam_config>();
        if (json && *json) h->cfg = acam::config_from_json(acam::parse_json(json, "config"));
        *out = h.release();
    });
}

acam_status acam_config_to_json(const acam_config* cfg, char** out) {
    if (!cfg) return null_arg("cfg");
    if (!out) return null_arg("out");
    return guard([&] { *out = dup(acam::to_json(cfg->cfg).dump(2) + "\n"); });
}

void acam_config_free(acam_config* cfg) { delete cfg; }

acam_status acam_calibrate(acam_config* cfg, const char* anchors_json, char** report) {
    if (!cfg) return null_arg("cfg");
    return guard([&] {
        auto anchors = anchors_json ? acam::anchors_from_json(acam::parse_json(anchors_json, "anchors"))
                                    : acam::reference_anchors();
        acam::CalibrationResult r = acam::calibrate(anchors, cfg->cfg.device);
        cfg->cfg.device = r.params;
        if (report) {
            acam::json j = acam::to_json(r);
            j["device"] = acam::to_json(r.params);
            *report = dup(j.dump(2) + "\n");
        }
    });
}

acam_status acam_bounds(const acam_config* cfg, double g_m1, double g_m2, double* lo, double* hi) {
    if (!cfg) return null_arg("cfg");
    if (!lo || !hi) return null_arg("lo/hi");
    return guard([&] {
        acam::VoltageInterval iv = acam::bounds_from_conductance({g_m1, g_m2}, cfg->cfg.device);
        *lo = iv.lo;
        *hi = iv.hi;
    });
}

acam_status acam_conductances(const acam_config* cfg, double lo, double hi, double* g_m1, double* g_m2) {
    if (!cfg) return null_arg("cfg");
    if (!g_m1 || !g_m2) return null_arg("g_m1/g_m2");
    return guard([&] {
        acam::CellConfig c = acam::conductance_from_bounds({lo, hi}, cfg->cfg.device);
        *g_m1 = c.g_m1;
        *g_m2 = c.g_m2;
    });
}

acam_status acam_table_compile_rules(const char* jsonl, int bits_per_cell, acam_table** out) {
    if (!jsonl) return null_arg("jsonl");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guard([&] {
        auto h = std::make_unique<acam_table>();
        h->table = acam::compile_rules(acam::rules_from_jsonl(jsonl), bits_per_cell);
        *out = h.release();
    });
}

acam_status acam_table_compile_tree(const char* tree_json, acam_table** out) {
    if (!tree_json) return null_arg("tree_json");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guard([&] {
        auto h = std::make_unique<acam_table>();
        h->table = acam::tree_to_cam(acam::tree_from_json(acam::parse_json(tree_json, "tree")));
        *out = h.release();
    });
}

acam_status acam_table_load(const char* json, acam_table** out) {
    if (!json) return null_arg("json");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guard([&] {
        auto h = std::make_unique<acam_table>();
        h->table = acam::table_from_json(acam::parse_json(json, "table"));
        *out = h.release();
    });
}

acam_status acam_table_to_json(const acam_table* t, char** out) {
    if (!t) return null_arg("t");
    if (!out) return null_arg("out");
    return guard([&] { *out = dup(acam::to_json(t->table).dump(2) + "\n"); });
}

acam_status acam_table_grid(const acam_table* t, char** out) {
    if (!t) return null_arg("t");
    if (!out) return null_arg("out");
    return guard([&] { *out = dup(acam::table_grid(t->table)); });
}

acam_status acam_table_shape(const acam_table* t, int* rows, int* cols) {
    if (!t) return null_arg("t");
    if (!rows || !cols) return null_arg("rows/cols");
    return guard([&] {
        *rows = static_cast<int>(t->table.rows.size());
        *cols = t->table.cols();
    });
}

void acam_table_free(acam_table* t) { delete t; }

acam_status acam_array_from_table(const acam_config* cfg, const acam_table* t, acam_array** out) {
    if (!cfg) return null_arg("cfg");
    if (!t) return null_arg("t");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guard([&] {
        auto h = std::make_unique<acam_array>();
        h->c = acam::build_array(t->table, cfg->cfg.device, cfg->cfg.electrical);
        h->has_table = true;
        *out = h.release();
    });
}

acam_status acam_array_load(const acam_config* cfg, const char* json, acam_array** out) {
    if (!cfg) return null_arg("cfg");
    if (!json) return null_arg("json");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guard([&] {
        auto h = std::make_unique<acam_array>();
        h->c.params = cfg->cfg.device;
        h->c.array = acam::array_from_json(acam::parse_json(json, "array"), cfg->cfg.electrical);
        h->c.array.validate();
        *out = h.release();
    });
}

acam_status acam_array_to_json(const acam_array* a, char** out) {
    if (!a) return null_arg("a");
    if (!out) return null_arg("out");
    return guard([&] { *out = dup(acam::to_json(a->c.array).dump(2) + "\n"); });
}

acam_status acam_array_shape(const acam_array* a, int* rows, int* cols) {
    if (!a) return null_arg("a");
    if (!rows || !cols) return null_arg("rows/cols");
    *rows = a->c.array.rows;
    *cols = a->c.array.cols;
    return ACAM_OK;
}

acam_status acam_array_set_variant(acam_array* a, int ts) {
    if (!a) return null_arg("a");
    a->c.array.kind = ts ? acam::variant::ts_pullup : acam::variant::transistor_pulldown;
    return ACAM_OK;
}

acam_status acam_array_program(acam_array* a, uint64_t seed) {
    if (!a) return null_arg("a");
    return guard([&] {
        const acam::DeviceParams& p = a->c.params;
        const double tol = p.sigma_prog > 0 ? 0.5 * p.sigma_prog : 1e-9;
        std::uint64_t s = seed;
        for (auto& cell : a->c.array.cells) {
            cell.g_m1 = acam::program_memristor(cell.g_m1, s = splitmix(s), tol, 100, p).g;
            cell.g_m2 = acam::program_memristor(cell.g_m2, s = splitmix(s), tol, 100, p).g;
        }
    });
}

void acam_array_free(acam_array* a) { delete a; }

acam_status acam_array_search_csv(const acam_array* a, const char* csv, char** out) {
    if (!a) return null_arg("a");
    if (!csv) return null_arg("csv");
    if (!out) return null_arg("out");
    return guard([&] {
        std::ostringstream os;
        os << "query,row,v_ml,matched,latency_ps\n";
        std::istringstream in(csv);
        std::string line;
        int n = 0, q = 0;
        while (std::getline(in, line)) {
            ++n;
            if (blank(line)) continue;
            auto f = split_fields(line);
            if (!numeric(f[0]) && q == 0) continue;
            auto dl = parse_doubles(f, n);
            acam::SearchResult r = acam::search(a->c.array, dl, a->c.params);
            for (std::size_t i = 0; i < r.rows.size(); ++i) {
                const auto& rr = r.rows[i];
                os << q << ',' << i << ',' << fmt("%.6f", rr.v_ml) << ',' << (rr.matched ? 1 : 0) << ','
                   << (rr.latency ? fmt("%.3f", *rr.latency * 1e12) : std::string()) << '\n';
            }
            ++q;
        }
        *out = dup(os.str());
    });
}

acam_status acam_array_sweep(const acam_array* a, int column, double step, double bias, char** csv,
                             char** bands) {
    if (!a) return null_arg("a");
    if (!csv) return null_arg("csv");
    return guard([&] {
        const acam::ArraySpec& arr = a->c.array;
        if (column < 0 || column >= arr.cols)
            throw acam::error(acam::error_kind::invalid_argument, "column out of range");
        if (!(step > 0)) throw acam::domain_error("sweep step must be > 0");
        std::vector<double> stim(arr.cols, bias);
        std::ostringstream os;
        os << "v_dl,row,v_ml,matched\n";
        const int n = static_cast<int>(std::floor(1.0 / step + 1e-9));
        for (int i = 0; i <= n; ++i) {
            stim[column] = i * step;
            acam::SearchResult r = acam::search(arr, stim, a->c.params);
            for (std::size_t k = 0; k < r.rows.size(); ++k)
                os << fmt("%.6f", stim[column]) << ',' << k << ',' << fmt("%.6f", r.rows[k].v_ml) << ','
                   << (r.rows[k].matched ? 1 : 0) << '\n';
        }
        *csv = dup(os.str());
        if (bands) {
            acam::json j = acam::json::array();
            for (int r = 0; r < arr.rows; ++r) {
                try {
                    acam::VoltageInterval iv =
                        acam::effective_bounds_in_array(arr, r, column, a->c.params, step, bias);
                    j.push_back({{"row", r}, {"lo_V", iv.lo}, {"hi_V", iv.hi}});
                } catch (const acam::error& e) {
                    if (e.kind() != acam::error_kind::domain) throw;
                    j.push_back({{"row", r}, {"empty", true}});
                }
            }
            *bands = dup(j.dump(2) + "\n");
        }
    });
}

acam_status acam_array_classify_csv(const acam_array* a, const char* csv, char** out) {
    if (!a) return null_arg("a");
    if (!csv) return null_arg("csv");
    if (!out) return null_arg("out");
    if (!a->has_table) {
        last_error = "classify needs an array built from a table";
        return ACAM_ERR_INVALID_ARGUMENT;
    }
    return guard([&] {
        const bool tree = a->c.table.kind == acam::table_kind::interval;
        std::ostringstream os;
        std::istringstream in(csv);
        std::string line;
        int n = 0, q = 0;
        while (std::getline(in, line)) {
            ++n;
            if (blank(line)) continue;
            auto f = split_fields(line);
            if (!numeric(f[0]) && q == 0) continue;
            std::string label;
            try {
                if (tree) {
                    label = acam::classify(a->c, parse_doubles(f, n));
                } else {
                    if (f.size() != 1 || f[0].find_first_not_of("0123456789") != std::string::npos)
                        throw acam::parse_error("expected one unsigned integer key at line " + std::to_string(n));
                    label = acam::classify_key(a->c, std::stoull(f[0]));
                }
            } catch (const acam::error& e) {
                if (e.kind() == acam::error_kind::parse) throw;
                label = std::string("error:") + kind_name(e.kind());
            }
            if (q == 0) os << "index,label\n";
            os << q++ << ',' << label << '\n';
        }
        *out = dup(os.str());
    });
}

acam_status acam_cost_report(const acam_config* cfg, const acam_table* t, int rows, int cols,
                             const int* bits, size_t n_bits, int dac, char** json, char** text) {
    if (!cfg) return null_arg("cfg");
    if (n_bits > 0 && !bits) return null_arg("bits");
    return guard([&] {
        const acam::Config& c = cfg->cfg;
        if (t) {
            rows = static_cast<int>(t->table.rows.size());
            cols = t->table.cols();
        }
        acam::CostReport rep;
        if (rows > 0 && cols > 0) rep = acam::energy_per_search(rows, cols, c.energy, dac != 0);
        if (t && t->table.rules.size() == 1) {
            std::vector<int> opts(bits, bits + n_bits);
            if (opts.empty() && t->table.kind == acam::table_kind::digit) opts.push_back(t->table.bits_per_cell);
            if (!opts.empty()) {
                acam::CostReport cmp =
                    acam::compare_range_implementations(t->table.rules[0], opts, c.area, c.energy);
                rep.implementations = cmp.implementations;
                rep.fJ_per_tcam_bit = cmp.fJ_per_tcam_bit;
                for (auto& s : cmp.assumptions) rep.assumptions.push_back(s);
            }
        }
        rep = acam::baseline_comparison(rep, c.energy);
        if (json) *json = dup(acam::to_json(rep).dump(2) + "\n");
        if (text) *text = dup(acam::report_text(rep));
    });
}

} // extern "C"
