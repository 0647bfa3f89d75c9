#pragma once

#include "acam/compiler.hpp"

#include <optional>
#include <string>
#include <vector>

namespace acam {

enum class scaling { per_cell, per_row, per_column, fixed };

struct EnergyComponent {
    std::string name;
    double fJ = 0;  // at the reference array
    scaling mode = scaling::fixed;
};

/// Energy per search of the reference 86x12 array, split by supply.
struct EnergyParams {
    std::vector<EnergyComponent> components{
        {"ML precharging", 102.9, scaling::per_cell},
        {"SLhi driver", 298.5, scaling::per_cell},
        {"Others", 86.4, scaling::fixed},
        {"DAC", 52.1, scaling::per_column},
    };
    int ref_rows = 86;
    int ref_cols = 12;
    double e_per_cell_fJ = 0.52;  // published average per analog cell
    double sram_tcam_fJ_per_bit = 0.165;
    double memristor_tcam_fJ_per_bit = 0.17;
    void validate() const;
};

struct AreaParams {
    double area_acam_cell = 0.52;  // um^2
    double area_tcam_cell = 0.70;  // um^2
    int transistors_per_acam_cell = 6;
    int transistors_per_sram_tcam_cell = 16;
    void validate() const;
};

struct ImplementationCost {
    std::string name;
    int bits_per_cell = 0;  // 0: ternary
    int rows = 0, digits = 0;
    long cells = 0, transistors = 0;
    double area_um2 = 0;
    double energy_fJ = 0;
    double cell_reduction = 1, transistor_reduction = 1, area_reduction = 1;
    std::optional<double> fJ_per_tcam_bit;
};

struct BaselineRatio {
    std::string name;
    double fJ_per_bit = 0;
    std::optional<double> ratio;  // baseline / ours; empty when our per-bit figure is missing
};

struct CostReport {
    int rows = 0, cols = 0;
    std::vector<EnergyComponent> energy;  // scaled to rows x cols
    double total_fJ = 0;
    double per_cell_fJ = 0;
    std::optional<double> fJ_per_tcam_bit;
    std::vector<ImplementationCost> implementations;  // first entry is the ternary baseline
    std::vector<BaselineRatio> baselines;
    std::vector<std::string> assumptions;
};

CostReport energy_per_search(int rows, int cols, const EnergyParams& ep, bool dac = true);

CostReport compare_range_implementations(const RangeRule& r, const std::vector<int>& bits_per_cell_options,
                                         const AreaParams& ap, const EnergyParams& ep);

CostReport baseline_comparison(CostReport report, const EnergyParams& ep = {});

std::string report_text(const CostReport& r);
const char* to_string(scaling s);

} // namespace acam
