#include "acam/compiler.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    fs::path dir;

    void SetUp() override {
        auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / ("acam_cli_" + std::string(info->name()) + "_" +
                                           std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    fs::path write(const std::string& name, const std::string& body) {
        fs::path p = dir / name;
        std::ofstream(p, std::ios::binary) << body;
        return p;
    }

    Result run(const std::string& args, const std::string& env = "") {
        fs::path err = dir / "stderr.txt";
        std::string cmd = env + " \"" + ACAM_CLI_PATH + "\" " + args + " 2>\"" + err.string() + "\"";
        Result r;
        FILE* f = ::popen(cmd.c_str(), "r");
        if (!f) return r;
        char buf[4096];
        std::size_t n;
        while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
        int st = ::pclose(f);
        r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
        r.err = slurp(err);
        return r;
    }

    std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }
};

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

const char* kRange = R"({"lo": 385, "hi": 58630, "width_bits": 16, "label": "r"})"
                     "\n";

const char* kTree = R"({
  "features": [{"name": "x", "min": 0, "max": 1}, {"name": "y", "min": 0, "max": 1}],
  "root": {"feature": 0, "threshold": 0.5,
           "left": {"feature": 1, "threshold": 0.3, "left": {"label": "a"}, "right": {"label": "b"}},
           "right": {"label": "c"}}})";

json band_of(const std::string& bands, int row = 0) { return json::parse(bands).at(row); }

} // namespace

TEST_F(Cli, CompileTernaryAndDigit) {
    auto rules = write("rules.jsonl", kRange);
    Result t = run("compile --ternary --out " + q(dir / "t") + " " + q(rules));
    ASSERT_EQ(t.code, 0) << t.err;
    auto tj = json::parse(slurp(dir / "t" / "table.json"));
    EXPECT_EQ(tj["rows"].size(), 20u);
    EXPECT_EQ(count_lines(slurp(dir / "t" / "grid.txt")), count_lines(t.out));
    Result d = run("compile --bits 4 " + q(rules));
    ASSERT_EQ(d.code, 0) << d.err;
    Result d2 = run("compile --bits 4 --out " + q(dir / "d") + " " + q(rules));
    EXPECT_EQ(json::parse(slurp(dir / "d" / "table.json"))["rows"].size(), 6u);
    EXPECT_EQ(d.out, d2.out);
}

TEST_F(Cli, CompileEmptyRuleFile) {
    auto rules = write("empty.jsonl", "");
    Result r = run("compile --bits 4 --out " + q(dir / "o") + " " + q(rules));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(json::parse(slurp(dir / "o" / "table.json"))["rows"].empty());
}

TEST_F(Cli, SweepSingleCellAndWideRow) {
    auto one = write("one.json", R"({"rows": 1, "cols": 1, "uniform": {"g_m1_uS": 40, "g_m2_uS": 80}})");
    auto wide = write("wide.json", R"({"rows": 1, "cols": 64, "uniform": {"g_m1_uS": 40, "g_m2_uS": 80}})");
    Result a = run("sweep --out " + q(dir / "a") + " " + q(one));
    ASSERT_EQ(a.code, 0) << a.err;
    json b1 = band_of(slurp(dir / "a" / "bands.json"));
    EXPECT_NEAR(b1["lo_V"].get<double>(), 0.37, 0.01);
    EXPECT_NEAR(b1["hi_V"].get<double>(), 0.42, 0.01);
    std::string csv = slurp(dir / "a" / "sweep.csv");
    EXPECT_EQ(csv.rfind("v_dl,row,v_ml,matched\n", 0), 0u);
    EXPECT_EQ(count_lines(csv), 1 + 1001);

    Result w = run("sweep --column 63 --out " + q(dir / "w") + " " + q(wide));
    ASSERT_EQ(w.code, 0) << w.err;
    json b64 = band_of(slurp(dir / "w" / "bands.json"));
    EXPECT_LE(std::abs(b64["lo_V"].get<double>() - b1["lo_V"].get<double>()), 0.020);
    EXPECT_LE(std::abs(b64["hi_V"].get<double>() - b1["hi_V"].get<double>()), 0.020);
}

TEST_F(Cli, CoarseSweepWarnsAndReportsEmptyBand) {
    auto one = write("one.json", R"({"rows": 1, "cols": 1, "uniform": {"g_m1_uS": 40, "g_m2_uS": 80}})");
    Result r = run("sweep --step 300 --out " + q(dir / "o") + " " + q(one));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    EXPECT_TRUE(band_of(slurp(dir / "o" / "bands.json"))["empty"].get<bool>());
}

TEST_F(Cli, CostWithAndWithoutDac) {
    Result a = run("cost --rows 86 --cols 12 --out " + q(dir / "a"));
    ASSERT_EQ(a.code, 0) << a.err;
    auto j = json::parse(slurp(dir / "a" / "cost.json"));
    EXPECT_NEAR(j["total_fJ"].get<double>(), 539.9, 0.1);
    Result b = run("cost --rows 86 --cols 12 --no-dac --out " + q(dir / "b"));
    auto k = json::parse(slurp(dir / "b" / "cost.json"));
    EXPECT_NEAR(k["total_fJ"].get<double>(), 487.8, 0.1);
    for (const auto& c : k["energy"])
        if (c["name"] == "DAC") EXPECT_EQ(c["fJ"].get<double>(), 0.0);
    Result n = run("cost");
    EXPECT_NE(n.code, 0);
}

TEST_F(Cli, CostOfCompiledRange) {
    auto rules = write("rules.jsonl", kRange);
    ASSERT_EQ(run("compile --bits 4 --out " + q(dir / "t") + " " + q(rules)).code, 0);
    Result c = run("cost --out " + q(dir / "c") + " --bits 3 --bits 4 --bits 8 " + q(dir / "t" / "table.json"));
    ASSERT_EQ(c.code, 0) << c.err;
    auto j = json::parse(slurp(dir / "c" / "cost.json"));
    std::vector<long> cells;
    for (const auto& i : j["implementations"]) cells.push_back(i["cells"].get<long>());
    EXPECT_EQ(cells, (std::vector<long>{320, 54, 24, 6}));
}

TEST_F(Cli, ClassifyMatchesTraversal) {
    auto tree_file = write("tree.json", kTree);
    ASSERT_EQ(run("compile --out " + q(dir / "t") + " " + q(tree_file)).code, 0);
    acam::DecisionTree tree;
    {
        // independent reference: the tree as written, walked directly
        tree.features = {{"x", 0, 1}, {"y", 0, 1}};
        tree.nodes = {{false, 0, 0.5, 1, 4, ""}, {false, 1, 0.3, 2, 3, ""}, {true, 0, 0, -1, -1, "a"},
                      {true, 0, 0, -1, -1, "b"}, {true, 0, 0, -1, -1, "c"}};
    }
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    std::ostringstream in;
    std::vector<std::string> expected;
    in << "x,y\n";
    while (expected.size() < 200) {
        double x = u(rng), y = u(rng);
        if (std::abs(x - 0.5) < 0.05 || std::abs(y - 0.3) < 0.05) continue;
        in << x << ',' << y << '\n';
        expected.push_back(acam::traverse(tree, {x, y}));
    }
    in << "1.5,0.2\n";
    auto inputs = write("in.csv", in.str());
    Result r = run("classify --out " + q(dir / "o") + " " + q(dir / "t" / "table.json") + " " + q(inputs));
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(slurp(dir / "o" / "labels.csv"));
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "index,label");
    for (std::size_t i = 0; i < expected.size(); ++i) {
        ASSERT_TRUE(std::getline(lines, line));
        EXPECT_EQ(line, std::to_string(i) + "," + expected[i]);
    }
    ASSERT_TRUE(std::getline(lines, line));
    EXPECT_EQ(line, "200,error:domain");

    auto empty = write("empty.csv", "");
    Result e = run("classify " + q(dir / "t" / "table.json") + " " + q(empty));
    EXPECT_EQ(e.code, 0);
    EXPECT_TRUE(e.out.empty());
}

TEST_F(Cli, ClassifyIntegerKeys) {
    auto rules = write("rules.jsonl", kRange);
    ASSERT_EQ(run("compile --bits 4 --out " + q(dir / "t") + " " + q(rules)).code, 0);
    auto keys = write("keys.csv", "384\n385\n58630\n58631\n");
    Result r = run("classify " + q(dir / "t" / "table.json") + " " + q(keys));
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string h, l0, l1, l2, l3;
    std::getline(lines, h);
    std::getline(lines, l0);
    std::getline(lines, l1);
    std::getline(lines, l2);
    std::getline(lines, l3);
    EXPECT_EQ(l1, "1,r");
    EXPECT_EQ(l2, "2,r");
    EXPECT_NE(l0, "0,r");
    EXPECT_NE(l3, "3,r");
}

TEST_F(Cli, ExitCodes) {
    auto bad = write("bad.json", "{\n  \"rows\": 1,\n  \"cols\": ,\n}");
    Result p = run("sweep " + q(bad));
    EXPECT_EQ(p.code, 2);
    EXPECT_NE(p.err.find("line 3"), std::string::npos) << p.err;

    auto one = write("one.json", R"([{"g_m1_uS": 40, "g_m2_uS": 80, "lo_V": 0.37, "hi_V": 0.42}])");
    EXPECT_EQ(run("calibrate " + q(one)).code, 3);

    auto far = write("far.json", R"([{"g_m1_uS": 40, "g_m2_uS": 80, "lo_V": 0.37, "hi_V": 0.42},
                                    {"g_m1_uS": 20, "g_m2_uS": 80, "lo_V": 0.33, "hi_V": 0.70}])");
    Result c = run("calibrate " + q(far));
    EXPECT_EQ(c.code, 4) << c.err;

    EXPECT_EQ(run("compile " + q(dir / "missing.jsonl")).code, 1);
    EXPECT_NE(run("frobnicate").code, 0);
}

TEST_F(Cli, ProgrammedRunsAreDeterministic) {
    auto rules = write("rules.jsonl", kRange);
    ASSERT_EQ(run("compile --bits 4 --out " + q(dir / "t") + " " + q(rules)).code, 0);
    std::string table = q(dir / "t" / "table.json");
    auto go = [&](const std::string& sub, int seed) {
        Result r = run("sweep --program --seed " + std::to_string(seed) + " --column 2 --out " + q(dir / sub) +
                    " " + table);
        EXPECT_EQ(r.code, 0) << r.err;
        return slurp(dir / sub / "sweep.csv") + slurp(dir / sub / "bands.json");
    };
    std::string a = go("a", 7), b = go("b", 7), c = go("c", 8);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST_F(Cli, CalibrateRoundTripsAndConfigFallback) {
    Result a = run("calibrate --out " + q(dir / "a"));
    ASSERT_EQ(a.code, 0) << a.err;
    auto rep = json::parse(slurp(dir / "a" / "calibration_report.json"));
    EXPECT_LE(rep["max_residual_mV"].get<double>(), 10.0);
    std::string cfg = slurp(dir / "a" / "device_params.json");
    Result b = run("calibrate --config " + q(dir / "a" / "device_params.json") + " --out " + q(dir / "b"));
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(slurp(dir / "b" / "device_params.json"), cfg);

    // ACAM_CONFIG is used when --config is absent
    auto c = write("c.json", R"({"array": {"t_sense_ps": 200}})");
    auto one = write("one.json", R"({"rows": 1, "cols": 1, "uniform": {"g_m1_uS": 40, "g_m2_uS": 80}})");
    auto q1 = write("q.csv", "0.40\n0.10\n");
    Result d = run("search " + q(one) + " " + q(q1));
    Result e = run("search " + q(one) + " " + q(q1), "ACAM_CONFIG=" + q(c));
    ASSERT_EQ(d.code, 0);
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_NE(d.out, e.out);
    Result f = run("search --config " + q(c) + " " + q(one) + " " + q(q1));
    EXPECT_EQ(e.out, f.out);
}

TEST_F(Cli, SearchCsv) {
    auto one = write("one.json", R"({"rows": 2, "cols": 1, "cells": [[{"g_m1_uS": 40, "g_m2_uS": 80}], [{"g_m1_uS": 20, "g_m2_uS": 80}]]})");
    auto q1 = write("q.csv", "v0\n0.40\n0.35\n");
    Result r = run("search " + q(one) + " " + q(q1));
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string h;
    std::getline(lines, h);
    EXPECT_EQ(h, "query,row,v_ml,matched,latency_ps");
    EXPECT_EQ(count_lines(r.out), 5);
    std::vector<int> matched;
    std::string line;
    while (std::getline(lines, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
        matched.push_back(std::stoi(f[3]));
    }
    EXPECT_EQ(matched, (std::vector<int>{1, 1, 0, 1}));
}
