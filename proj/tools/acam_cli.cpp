// acam_cli: calibrate, compile, sweep, search, classify, cost.
#include "acam/acam.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct failure {
    acam_status status;
    std::string message;
};

struct usage_error {
    std::string message;
};

void check(acam_status s) {
    if (s != ACAM_OK) throw failure{s, acam_last_error()};
}

int exit_code(acam_status s) {
    switch (s) {
    case ACAM_ERR_PARSE: return 2;
    case ACAM_ERR_DOMAIN: return 3;
    case ACAM_ERR_CONVERGENCE: return 4;
    default: return 1;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error{"cannot read " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Takes ownership of a string returned by the library.
std::string take(char* s) {
    std::string out = s ? s : "";
    acam_free_string(s);
    return out;
}

struct ConfigDeleter {
    void operator()(acam_config* c) const { acam_config_free(c); }
};
struct TableDeleter {
    void operator()(acam_table* t) const { acam_table_free(t); }
};
struct ArrayDeleter {
    void operator()(acam_array* a) const { acam_array_free(a); }
};
using config_ptr = std::unique_ptr<acam_config, ConfigDeleter>;
using table_ptr = std::unique_ptr<acam_table, TableDeleter>;
using array_ptr = std::unique_ptr<acam_array, ArrayDeleter>;

struct Options {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    std::string input, inputs;
    int bits = 4;
    bool ternary = false;
    int column = 0;
    double step_mV = 1.0;
    double bias = 0.4;
    bool no_dac = false;
    bool program = false;
    std::string variant = "mosfet";
    int rows = 0, cols = 0;
    std::vector<int> compare_bits;
};

config_ptr load_config(const Options& o) {
    std::string path = o.config;
    if (path.empty())
        if (const char* env = std::getenv("ACAM_CONFIG")) path = env;
    std::string text = path.empty() ? std::string() : read_file(path);
    acam_config* c = nullptr;
    check(acam_config_create(text.c_str(), &c));
    return config_ptr(c);
}

// Writes to --out/<name> when an output directory is given, otherwise to stdout.
void emit(const Options& o, const std::string& name, const std::string& body, bool to_stdout = true) {
    if (!o.out.empty()) {
        fs::create_directories(o.out);
        std::ofstream f(fs::path(o.out) / name, std::ios::binary);
        if (!f) throw usage_error{"cannot write " + (fs::path(o.out) / name).string()};
        f << body;
    } else if (to_stdout) {
        std::cout << body;
    }
}

bool looks_like_tree(const std::string& text) {
    auto p = text.find_first_not_of(" \t\r\n");
    if (p == std::string::npos || text[p] != '{') return false;
    return text.find("\"root\"") != std::string::npos;
}

bool looks_like_array(const std::string& text) {
    return text.find("\"cells\"") != std::string::npos || text.find("\"uniform\"") != std::string::npos;
}

table_ptr load_table(const std::string& path) {
    acam_table* t = nullptr;
    check(acam_table_load(read_file(path).c_str(), &t));
    return table_ptr(t);
}

array_ptr load_array(const Options& o, const acam_config* cfg, const std::string& path) {
    std::string text = read_file(path);
    acam_array* a = nullptr;
    if (looks_like_array(text)) {
        check(acam_array_load(cfg, text.c_str(), &a));
    } else {
        acam_table* t = nullptr;
        check(acam_table_load(text.c_str(), &t));
        table_ptr tp(t);
        check(acam_array_from_table(cfg, t, &a));
    }
    array_ptr ap(a);
    if (o.variant != "mosfet") check(acam_array_set_variant(a, 1));
    if (o.program) check(acam_array_program(a, o.seed));
    return ap;
}

void cmd_calibrate(const Options& o) {
    config_ptr cfg = load_config(o);
    std::string anchors;
    if (!o.input.empty()) anchors = read_file(o.input);
    char* report = nullptr;
    check(acam_calibrate(cfg.get(), o.input.empty() ? nullptr : anchors.c_str(), &report));
    std::string rep = take(report);
    char* doc = nullptr;
    check(acam_config_to_json(cfg.get(), &doc));
    emit(o, "device_params.json", take(doc));
    emit(o, "calibration_report.json", rep, false);
    if (!o.out.empty()) std::cout << rep;
}

void cmd_compile(const Options& o) {
    std::string text = read_file(o.input);
    acam_table* t = nullptr;
    if (looks_like_tree(text))
        check(acam_table_compile_tree(text.c_str(), &t));
    else
        check(acam_table_compile_rules(text.c_str(), o.ternary ? 0 : o.bits, &t));
    table_ptr tp(t);
    char *js = nullptr, *grid = nullptr;
    check(acam_table_to_json(t, &js));
    std::string json = take(js);
    check(acam_table_grid(t, &grid));
    std::string g = take(grid);
    if (o.out.empty()) {
        std::cout << g;
    } else {
        emit(o, "table.json", json);
        emit(o, "grid.txt", g);
        std::cout << g;
    }
}

void cmd_sweep(const Options& o) {
    config_ptr cfg = load_config(o);
    array_ptr a = load_array(o, cfg.get(), o.input);
    char *csv = nullptr, *bands = nullptr;
    check(acam_array_sweep(a.get(), o.column, o.step_mV * 1e-3, o.bias, &csv, &bands));
    std::string c = take(csv), b = take(bands);
    if (b.find("\"empty\"") != std::string::npos)
        std::cerr << "warning: no matched sweep point for some rows (step " << o.step_mV
                  << " mV may exceed the band); reported as empty\n";
    emit(o, "sweep.csv", c);
    emit(o, "bands.json", b, false);
    if (!o.out.empty()) std::cout << b;
}

void cmd_search(const Options& o) {
    config_ptr cfg = load_config(o);
    array_ptr a = load_array(o, cfg.get(), o.input);
    char* out = nullptr;
    check(acam_array_search_csv(a.get(), read_file(o.inputs).c_str(), &out));
    emit(o, "search.csv", take(out));
}

void cmd_classify(const Options& o) {
    config_ptr cfg = load_config(o);
    array_ptr a = load_array(o, cfg.get(), o.input);
    char* out = nullptr;
    check(acam_array_classify_csv(a.get(), read_file(o.inputs).c_str(), &out));
    emit(o, "labels.csv", take(out));
}

void cmd_cost(const Options& o) {
    config_ptr cfg = load_config(o);
    table_ptr t;
    if (!o.input.empty()) t = load_table(o.input);
    if (!t && (o.rows < 1 || o.cols < 1)) throw usage_error{"cost needs a table file or --rows and --cols"};
    char *js = nullptr, *txt = nullptr;
    check(acam_cost_report(cfg.get(), t.get(), o.rows, o.cols, o.compare_bits.data(), o.compare_bits.size(),
                           o.no_dac ? 0 : 1, &js, &txt));
    std::string j = take(js), x = take(txt);
    emit(o, "cost.json", j, false);
    emit(o, "cost.txt", x);
    if (!o.out.empty()) std::cout << x;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analog CAM simulator and compiler"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* s) {
        s->add_option("--config", o.config, "Config JSON (falls back to $ACAM_CONFIG)");
        s->add_option("--seed", o.seed, "Seed for programming noise");
        s->add_option("--out", o.out, "Output directory (default: stdout)");
    };
    auto array_opts = [&](CLI::App* s) {
        s->add_option("--variant", o.variant, "Pull-down variant")->check(CLI::IsMember({"mosfet", "ts"}));
        s->add_flag("--program", o.program, "Program targets with verify noise (uses --seed)");
    };

    auto* cal = app.add_subcommand("calibrate", "Fit device parameters to anchor intervals");
    common(cal);
    cal->add_option("anchors", o.input, "Anchor JSON (default: built-in anchors)");

    auto* comp = app.add_subcommand("compile", "Compile range rules (JSONL) or a decision tree (JSON)");
    common(comp);
    comp->add_option("input", o.input, "Rules or tree file")->required();
    auto* bits = comp->add_option("--bits", o.bits, "Bits per cell")->check(CLI::Range(1, 16));
    comp->add_flag("--ternary", o.ternary, "Ternary (TCAM) encoding")->excludes(bits);

    auto* sw = app.add_subcommand("sweep", "Sweep one column's input and record the ML response");
    common(sw);
    array_opts(sw);
    sw->add_option("input", o.input, "Table or array file")->required();
    sw->add_option("--column", o.column, "Column to sweep");
    sw->add_option("--step", o.step_mV, "Step in mV")->check(CLI::PositiveNumber);
    sw->add_option("--bias", o.bias, "DL voltage of the other columns (V)");

    auto* se = app.add_subcommand("search", "Search DL voltage vectors");
    common(se);
    array_opts(se);
    se->add_option("input", o.input, "Table or array file")->required();
    se->add_option("queries", o.inputs, "CSV of DL voltages, one query per line")->required();

    auto* cl = app.add_subcommand("classify", "Classify inputs through a compiled table");
    common(cl);
    array_opts(cl);
    cl->add_option("table", o.input, "Table file")->required();
    cl->add_option("inputs", o.inputs, "CSV of feature vectors or integer keys")->required();

    auto* co = app.add_subcommand("cost", "Energy and area report");
    common(co);
    co->add_option("table", o.input, "Table file");
    co->add_option("--bits", o.compare_bits, "Bits per cell to compare (range tables), repeatable")->allow_extra_args(false);
    co->add_flag("--no-dac", o.no_dac, "Exclude DAC energy");
    co->add_option("--rows", o.rows, "Rows of a synthetic array (no table)");
    co->add_option("--cols", o.cols, "Columns of a synthetic array (no table)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*cal) cmd_calibrate(o);
        else if (*comp) cmd_compile(o);
        else if (*sw) cmd_sweep(o);
        else if (*se) cmd_search(o);
        else if (*cl) cmd_classify(o);
        else if (*co) cmd_cost(o);
    } catch (const failure& f) {
        std::cerr << "error (" << acam_status_name(f.status) << "): " << f.message << "\n";
        return exit_code(f.status);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.message << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
