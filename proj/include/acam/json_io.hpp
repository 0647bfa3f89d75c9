#pragma once

#include "acam/array.hpp"
#include "acam/cell.hpp"
#include "acam/compiler.hpp"
#include "acam/cost.hpp"
#include "acam/device.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace acam {

using json = nlohmann::ordered_json;

/// Everything a config document can carry; unspecified fields keep their defaults.
struct Config {
    DeviceParams device = calibrated_defaults();
    TsDeviceParams ts;
    ArraySpec electrical;  // rows/cols/cells unused
    EnergyParams energy;
    AreaParams area;
};

/// Parses text, turning syntax errors into parse errors that name the line.
json parse_json(const std::string& text, const std::string& what = "input");

Config config_from_json(const json& j, const Config& base = {});
json to_json(const Config& c);

DeviceParams device_from_json(const json& j, const DeviceParams& base);
json to_json(const DeviceParams& p);

std::vector<Anchor> anchors_from_json(const json& j);
json to_json(const CalibrationResult& r);

ArraySpec array_from_json(const json& j, const ArraySpec& electrical);
json to_json(const ArraySpec& a);

std::vector<RangeRule> rules_from_jsonl(const std::string& text);
DecisionTree tree_from_json(const json& j);
json to_json(const DecisionTree& t);

CamTable table_from_json(const json& j);
json to_json(const CamTable& t);

json to_json(const CostReport& r);

} // namespace acam
