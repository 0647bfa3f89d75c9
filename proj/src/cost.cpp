#include "acam/cost.hpp"
#include "acam/error.hpp"

#include <cstdio>
#include <sstream>

namespace acam {

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

} // namespace

void EnergyParams::validate() const {
    for (const auto& c : components)
        if (c.fJ < 0) throw domain_error("energy component " + c.name + " must be >= 0");
    if (ref_rows < 1 || ref_cols < 1) throw domain_error("energy reference array must be >= 1x1");
    if (e_per_cell_fJ < 0) throw domain_error("e_per_cell_fJ must be >= 0");
}

void AreaParams::validate() const {
    if (!(area_acam_cell > 0 && area_tcam_cell > 0) || transistors_per_acam_cell < 1 ||
        transistors_per_sram_tcam_cell < 1)
        throw domain_error("area parameters must be > 0");
}

const char* to_string(scaling s) {
    switch (s) {
    case scaling::per_cell: return "per-cell";
    case scaling::per_row: return "per-row";
    case scaling::per_column: return "per-column";
    case scaling::fixed: return "fixed";
    }
    return "?";
}

CostReport energy_per_search(int rows, int cols, const EnergyParams& ep, bool dac) {
    if (rows < 1 || cols < 1) throw domain_error("energy_per_search: rows and cols must be >= 1");
    ep.validate();
    CostReport r;
    r.rows = rows;
    r.cols = cols;
    for (const auto& c : ep.components) {
        double f = 1;
        switch (c.mode) {
        case scaling::per_cell: f = double(rows) * cols / (double(ep.ref_rows) * ep.ref_cols); break;
        case scaling::per_row: f = double(rows) / ep.ref_rows; break;
        case scaling::per_column: f = double(cols) / ep.ref_cols; break;
        case scaling::fixed: break;
        }
        EnergyComponent s{c.name, c.fJ * f, c.mode};
        if (!dac && c.name == "DAC") s.fJ = 0;
        r.energy.push_back(s);
        r.total_fJ += s.fJ;
        r.assumptions.push_back(c.name + " scales " + to_string(c.mode) + " from " +
                                std::to_string(ep.ref_rows) + "x" + std::to_string(ep.ref_cols));
    }
    r.per_cell_fJ = r.total_fJ / (double(rows) * cols);
    if (!dac) r.assumptions.push_back("analog inputs: DAC energy excluded");
    return r;
}

CostReport compare_range_implementations(const RangeRule& rule, const std::vector<int>& options,
                                         const AreaParams& ap, const EnergyParams& ep) {
    ap.validate();
    ep.validate();
    CostReport rep;
    ImplementationCost tc;
    tc.name = "TCAM";
    tc.rows = static_cast<int>(range_to_ternary(rule).size());
    tc.digits = rule.width_bits;
    tc.cells = long(tc.rows) * tc.digits;
    tc.transistors = tc.cells * ap.transistors_per_sram_tcam_cell;
    tc.area_um2 = tc.cells * ap.area_tcam_cell;
    rep.implementations.push_back(tc);

    for (int k : options) {
        ImplementationCost c;
        c.name = std::to_string(k) + "-bit aCAM";
        c.bits_per_cell = k;
        auto words = range_to_digits(rule, k);
        c.rows = static_cast<int>(words.size());
        c.digits = words.empty() ? 0 : static_cast<int>(words[0].digits.size());
        c.cells = long(c.rows) * c.digits;
        c.transistors = c.cells * ap.transistors_per_acam_cell;
        c.area_um2 = c.cells * ap.area_acam_cell;
        c.energy_fJ = c.cells * ep.e_per_cell_fJ;
        c.cell_reduction = double(tc.cells) / c.cells;
        c.transistor_reduction = double(tc.transistors) / c.transistors;
        c.area_reduction = tc.area_um2 / c.area_um2;
        c.fJ_per_tcam_bit = c.energy_fJ / tc.cells;
        rep.implementations.push_back(c);
    }
    if (rep.implementations.size() > 1) {
        const auto& first = rep.implementations[1];
        rep.rows = first.rows;
        rep.cols = first.digits;
        rep.total_fJ = first.energy_fJ;
        rep.per_cell_fJ = ep.e_per_cell_fJ;
        rep.fJ_per_tcam_bit = first.fJ_per_tcam_bit;
        rep.assumptions.push_back("summary and baseline ratios use the first listed width (" + first.name + ")");
    }
    rep.assumptions.push_back("aCAM energy = cells x " + fmt("%g", ep.e_per_cell_fJ) + " fJ");
    return rep;
}

CostReport baseline_comparison(CostReport report, const EnergyParams& ep) {
    report.baselines.clear();
    for (auto [name, v] : {std::pair<const char*, double>{"SRAM TCAM", ep.sram_tcam_fJ_per_bit},
                           {"memristor TCAM", ep.memristor_tcam_fJ_per_bit}}) {
        BaselineRatio b{name, v, std::nullopt};
        if (report.fJ_per_tcam_bit && *report.fJ_per_tcam_bit > 0) b.ratio = v / *report.fJ_per_tcam_bit;
        report.baselines.push_back(b);
    }
    return report;
}


std::string report_text(const CostReport& r) {
    std::ostringstream os;
    if (!r.energy.empty()) {
        os << "energy per search, " << r.rows << "x" << r.cols << " array\n";
        for (const auto& c : r.energy)
            os << "  " << c.name << std::string(16 - std::min<std::size_t>(15, c.name.size()), ' ')
               << fmt("%10.2f fJ", c.fJ) << "  (" << to_string(c.mode) << ")\n";
        os << "  Total           " << fmt("%10.2f fJ", r.total_fJ) << "\n";
        os << "  per cell        " << fmt("%10.4f fJ", r.per_cell_fJ) << "\n";
    }
    if (!r.implementations.empty()) {
        os << "implementation     rows  digits  cells  transistors   area_um2  energy_fJ  cells_x  trans_x  area_x  fJ/TCAM_bit\n";
        for (const auto& c : r.implementations) {
            char buf[256];
            std::snprintf(buf, sizeof buf, "%-16s %6d %7d %6ld %12ld %10.2f %10.3f %8.2f %8.2f %7.2f  %s\n",
                          c.name.c_str(), c.rows, c.digits, c.cells, c.transistors, c.area_um2,
                          c.energy_fJ, c.cell_reduction, c.transistor_reduction, c.area_reduction,
                          c.fJ_per_tcam_bit ? fmt("%.4f", *c.fJ_per_tcam_bit).c_str() : "n/a");
            os << buf;
        }
    }
    for (const auto& b : r.baselines)
        os << "baseline " << b.name << ": " << fmt("%.3f fJ/bit", b.fJ_per_bit) << ", ratio "
           << (b.ratio ? fmt("%.2fx", *b.ratio) : std::string("n/a")) << "\n";
    for (const auto& a : r.assumptions) os << "# " << a << "\n";
    return os.str();
}

} // namespace acam
