#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vofc/io.hpp"
#include "vofc/laplace_inversion.hpp"
#include "vofc/solver.hpp"
#include "vofc/weights.hpp"

namespace vofc {

struct TableSet {
    double alpha1, alpha2, c;
    std::map<std::string, double> params;  // lambda / a, mu
    std::vector<double> y0;

    std::string label() const;
};

enum class ErrorNorm { max_abs, euclidean };

struct TableSpec {
    std::string name;
    std::string preset;
    double T = 0.0;
    std::vector<int> h_exponents;  // h = 2^-k
    // Exponent of the self-reference step; empty means the Laplace-inversion
    // reference (relaxation only).
    std::optional<int> ref_exponent;
    ErrorNorm norm = ErrorNorm::max_abs;
    std::vector<TableSet> sets;
};

struct TableColumn {
    TableSet set;
    std::vector<double> reference;  // final-time reference state
    std::vector<double> errors;     // one per h
    std::vector<double> eocs;       // one per h, first entry NaN
};

struct TableResult {
    TableSpec spec;
    std::vector<double> hs;
    std::vector<TableColumn> columns;
    double seconds = 0.0;
};

/// Built-in ladders for tables 1-3.
TableSpec default_table(int which);

TableResult run_table(const TableSpec& spec, const StepSolverOptions& sopts = {},
                      const WeightOptions& wopts = {}, const ContourSpec& contour = {});

/// Columns: h, then error_i, eoc_i per parameter set.
io::Table table_layout(const TableResult& result);

struct Artifact {
    std::string file;
    std::string content;
};

struct FigureConfig {
    double alpha1 = 0.6, alpha2 = 0.8, c = 2.0;
    double lam = 1.0;
    double y0 = 1.0;
    double h = 0.015625;  // 2^-6
    // Brusselator regimes (fig6)
    double a = 1.0;
    double mu_cycle = 4.0, mu_stable = 2.0;
    std::vector<double> y0_cycle{0.9, 2.1}, y0_stable{0.5, 2.5};
    double T_cycle = 120.0, T_stable = 50.0;
    // Singularity scan (fig3): one (alpha1, alpha2, c) triple per panel.
    std::vector<std::vector<double>> panels{{0.6, 0.8, 2.0}, {0.5, 0.9, 1.0}, {0.9, 0.6, 1.0}, {0.8, 0.6, 2.0}};
    double lam_min = 0.01, lam_max = 5.0, lam_ratio = 1.2;
    ContourSpec contour;
};

struct FigureResult {
    std::vector<Artifact> files;
    std::vector<std::pair<std::string, double>> metrics;
};

FigureResult run_figure(int which, const FigureConfig& cfg);

}  // namespace vofc
