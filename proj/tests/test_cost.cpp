#include "acam/cost.hpp"
#include "acam/error.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace acam;

namespace {

double sum(const CostReport& r) {
    double s = 0;
    for (const auto& c : r.energy) s += c.fJ;
    return s;
}

const RangeRule kRange{385, 58630, 16, "r"};

} // namespace

TEST(Energy, ReferenceArrayBreakdown) {
    CostReport r = energy_per_search(86, 12, {});
    EXPECT_NEAR(r.total_fJ, 539.9, 0.1);
    EXPECT_NEAR(r.per_cell_fJ, 0.523, 0.01);
    ASSERT_EQ(r.energy.size(), 4u);
    EXPECT_DOUBLE_EQ(r.energy[0].fJ, 102.9);
    EXPECT_DOUBLE_EQ(r.energy[1].fJ, 298.5);
    EXPECT_DOUBLE_EQ(r.energy[2].fJ, 86.4);
    EXPECT_DOUBLE_EQ(r.energy[3].fJ, 52.1);
    EXPECT_NEAR(r.energy[3].fJ / r.total_fJ, 0.0965, 1e-3);
}

TEST(Energy, WithoutDac) {
    CostReport r = energy_per_search(86, 12, {}, false);
    EXPECT_NEAR(r.total_fJ, 487.8, 1e-9);
    EXPECT_DOUBLE_EQ(r.energy[3].fJ, 0.0);
}

TEST(Energy, TotalsAreSumOfParts) {
    for (auto [rows, cols] : {std::pair{1, 1}, {6, 4}, {512, 12}, {86, 72}}) {
        CostReport r = energy_per_search(rows, cols, {});
        EXPECT_DOUBLE_EQ(r.total_fJ, sum(r));
        EXPECT_DOUBLE_EQ(r.per_cell_fJ, r.total_fJ / (rows * cols));
    }
}

TEST(Energy, ScalingModes) {
    EnergyParams ep;
    ep.components = {{"a", 10, scaling::per_row}, {"b", 10, scaling::per_column},
                     {"c", 10, scaling::per_cell}, {"d", 10, scaling::fixed}};
    CostReport r = energy_per_search(172, 6, ep);
    EXPECT_DOUBLE_EQ(r.energy[0].fJ, 20);
    EXPECT_DOUBLE_EQ(r.energy[1].fJ, 5);
    EXPECT_DOUBLE_EQ(r.energy[2].fJ, 10);
    EXPECT_DOUBLE_EQ(r.energy[3].fJ, 10);
    EXPECT_FALSE(r.assumptions.empty());
}

TEST(Energy, Validation) {
    EXPECT_THROW(energy_per_search(0, 12, {}), error);
    EnergyParams ep;
    ep.components[0].fJ = -1;
    EXPECT_THROW(energy_per_search(1, 1, ep), error);
    AreaParams ap;
    ap.area_acam_cell = 0;
    EXPECT_THROW(compare_range_implementations(kRange, {4}, ap, {}), error);
}

TEST(RangeCost, CountsFollowTheCompiler) {
    CostReport r = compare_range_implementations(kRange, {3, 4, 8}, {}, {});
    ASSERT_EQ(r.implementations.size(), 4u);
    const auto& tcam = r.implementations[0];
    EXPECT_EQ(tcam.rows, static_cast<int>(range_to_ternary(kRange).size()));
    EXPECT_EQ(tcam.cells, tcam.rows * 16L);
    EXPECT_EQ(tcam.transistors, tcam.cells * 16);
    EXPECT_EQ(r.implementations[1].cells, 54);
    const auto& four = r.implementations[2];
    EXPECT_EQ(four.cells, 24);
    EXPECT_EQ(four.transistors, 144);
    EXPECT_NEAR(four.area_um2, 12.48, 1e-9);
    EXPECT_NEAR(four.energy_fJ, 12.48, 1e-9);
    EXPECT_EQ(r.implementations[3].cells, 6);
}

TEST(RangeCost, RatiosByConstruction) {
    CostReport r = compare_range_implementations(kRange, {4}, {}, {});
    const auto& t = r.implementations[0];
    const auto& a = r.implementations[1];
    EXPECT_DOUBLE_EQ(a.area_reduction, (t.cells * 0.70) / (a.cells * 0.52));
    EXPECT_DOUBLE_EQ(a.cell_reduction, double(t.cells) / a.cells);
    EXPECT_DOUBLE_EQ(a.transistor_reduction, double(t.transistors) / a.transistors);
    ASSERT_TRUE(a.fJ_per_tcam_bit.has_value());
    EXPECT_DOUBLE_EQ(*a.fJ_per_tcam_bit, a.energy_fJ / t.cells);
}

TEST(Baselines, RatiosAndMissingFigure) {
    CostReport r;
    r.fJ_per_tcam_bit = 0.037;
    r = baseline_comparison(r);
    ASSERT_EQ(r.baselines.size(), 2u);
    EXPECT_NEAR(*r.baselines[0].ratio, 4.46, 0.01);
    EnergyParams same;
    same.sram_tcam_fJ_per_bit = 0.037;
    EXPECT_DOUBLE_EQ(*baseline_comparison(r, same).baselines[0].ratio, 1.0);
    CostReport none = baseline_comparison(CostReport{});
    EXPECT_FALSE(none.baselines[0].ratio.has_value());
    EXPECT_NE(report_text(none).find("n/a"), std::string::npos);
}

TEST(Report, TextListsComponentsAndAssumptions) {
    std::string s = report_text(baseline_comparison(energy_per_search(86, 12, {})));
    EXPECT_NE(s.find("ML precharging"), std::string::npos);
    EXPECT_NE(s.find("539.90 fJ"), std::string::npos);
    EXPECT_NE(s.find("# DAC scales per-column"), std::string::npos);
}
