#pragma once

#include "acam/array.hpp"
#include "acam/cell.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace acam {

struct RangeRule {
    std::uint64_t lo = 0, hi = 0;
    int width_bits = 0;
    std::string label;
    void validate() const;
};

/// Symbols '0', '1', 'X', most significant bit first.
struct TernaryWord {
    std::string symbols;
    bool matches(std::uint64_t x) const;
};

enum class digit_kind { exact, wildcard, subrange };

struct DigitSpec {
    digit_kind kind = digit_kind::wildcard;
    int n = 0, m = 0;  // exact uses n; subrange is n..m inclusive
    bool matches(int d) const;
};

/// Digits most significant first, base 2^bits_per_cell.
struct DigitWord {
    std::vector<DigitSpec> digits;
    bool matches(std::uint64_t x, int bits_per_cell) const;
};

/// One feature's constraint in a tree row, in feature units.
struct FeatureInterval {
    bool wildcard = true;
    double lo = 0, hi = 0;
    bool lo_closed = true, hi_closed = true;
    bool contains(double x) const;
};

struct IntervalWord {
    std::vector<FeatureInterval> features;
};

struct FeatureEncoding {
    std::string name;
    double min = 0, max = 1;
};

struct LevelFamily {
    int n_levels = 0;
    VoltageInterval window;
    double guard = 0;
};

enum class table_kind { ternary, digit, interval };

struct CamRow {
    TernaryWord ternary;
    DigitWord digit;
    IntervalWord interval;
    std::string label;
};

struct CamTable {
    table_kind kind = table_kind::digit;
    int bits_per_cell = 1;
    int width_bits = 0;
    std::vector<CamRow> rows;
    std::vector<RangeRule> rules;          // source rules of ternary/digit tables
    std::vector<FeatureEncoding> features; // interval tables
    double edge_guard = 4e-3;              // interval tables, volts
    int cols() const;
};

struct TreeNode {
    bool leaf = true;
    int feature = 0;
    double threshold = 0;
    int left = -1, right = -1;  // left: x < threshold, right: x >= threshold
    std::string label;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::vector<FeatureEncoding> features;
    void validate() const;
};

std::vector<TernaryWord> range_to_ternary(const RangeRule& r);
std::vector<DigitWord> range_to_digits(const RangeRule& r, int bits_per_cell);

/// bits_per_cell == 0 selects the ternary (TCAM) encoding.
CamTable compile_rules(const std::vector<RangeRule>& rules, int bits_per_cell);

CamTable tree_to_cam(const DecisionTree& t);
std::string traverse(const DecisionTree& t, const std::vector<double>& x);

/// Level family used when lowering k-bit digits: 2^k levels over the achievable
/// window inset by 5 mV, guard min(10 mV, 0.4 pitch).
LevelFamily default_level_family(int bits_per_cell, const DeviceParams& p);
/// Voltage window trees are encoded into (leaves room for the edge guard).
VoltageInterval tree_voltage_window(const CamTable& t, const DeviceParams& p);

/// Row-major rows x cols conductance pairs.
std::vector<CellConfig> lower_to_conductances(const CamTable& t, const DeviceParams& p);
std::vector<CellConfig> lower_to_conductances(const CamTable& t, const DeviceParams& p,
                                              const LevelFamily& levels);

/// DL voltages for an integer key (ternary/digit tables).
std::vector<double> encode_key(const CamTable& t, std::uint64_t x, const DeviceParams& p);
std::vector<double> encode_key(const CamTable& t, std::uint64_t x, const LevelFamily& levels);
/// DL voltages for a feature vector (interval tables).
std::vector<double> encode_features(const CamTable& t, const std::vector<double>& x,
                                    const DeviceParams& p);

/// A table lowered onto an array, ready to search.
struct CompiledArray {
    CamTable table;
    ArraySpec array;
    DeviceParams params;
    LevelFamily levels;
    VoltageInterval feature_window;
};

CompiledArray build_array(const CamTable& t, const DeviceParams& p, const ArraySpec& electrical = {});

std::vector<int> matching_rows(const CompiledArray& c, const std::vector<double>& dl);
/// Label of the unique matching row; zero or several matches raise an ambiguity error.
std::string classify(const CompiledArray& c, const std::vector<double>& features);
std::string classify_key(const CompiledArray& c, std::uint64_t x);

/// Aligned text grid, one line per row.
std::string table_grid(const CamTable& t);
std::string to_string(const DigitSpec& d);

} // namespace acam
