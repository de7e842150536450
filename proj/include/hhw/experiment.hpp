#pragma once

// Benchmark grid runner: prices a maturity x strike grid with any subset of
// the pricing methods, optionally sweeping one model parameter, and writes
// the results as CSV (values) plus a timing sidecar (wall clock).

#include <array>
#include <string>
#include <vector>

#include "hhw/mc.hpp"
#include "hhw/model.hpp"

namespace hhw {

enum class Method { exp = 0, expchf = 1, chf = 2, mc = 3 };
constexpr int kMethodCount = 4;

std::string method_name(Method m);
Method method_from_name(const std::string& name);

enum class SweepVar { none, gamma, eta_d, eta_f };

std::string sweep_name(SweepVar v);
SweepVar sweep_from_name(const std::string& name);

struct ExperimentSpec {
    std::vector<double> maturities = {1.0, 3.0, 5.0, 7.0, 10.0};
    std::vector<double> deltas = {-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5};
    std::vector<Method> methods = {Method::exp, Method::expchf, Method::chf,
                                   Method::mc};
    OptionKind kind = OptionKind::put;
    SweepVar sweep = SweepVar::none;
    std::vector<double> sweep_values;
    McConfig mc;
    std::string out_path = "results.csv";
    std::string path_stats_out; // empty: no path-stats dump
};

struct CellResult {
    double sweep_value = 0.0; // NaN when no sweep
    double maturity = 0.0;
    double strike = 0.0;
    Method method = Method::exp;
    double price = 0.0;       // NaN on failure
    double implied_vol = 0.0; // NaN on failure
    double iv_diff_vs_mc_bp = 0.0; // NaN when MC is absent or failed
    double mc_se = 0.0;            // NaN for non-MC rows
    std::string note;              // failure description, empty on success
    bool failed = false;
};

struct ExperimentResult {
    std::vector<CellResult> rows;
    std::array<double, kMethodCount> method_ms{};  // total wall milliseconds
    std::array<int, kMethodCount> method_cells{};  // options priced
    int failures = 0;
    std::string path_stats_csv; // filled when path stats were requested
};

// Strikes K_i = F0 * exp(0.1 * delta_i * sqrt(T)).
std::vector<double> strike_grid(double F0, double T,
                                const std::vector<double>& deltas);

// The standard demonstration setup: flat zero curves, eta_d = 0.7%,
// eta_f = 1.2%, v0 = theta_v = 5%, gamma = 30%, k_v = 3, spot 100.
FxModel benchmark_model();

ExperimentResult run_experiment(const FxModel& base, const ExperimentSpec& spec);

// Main CSV is fully deterministic; wall times go to <out>_timing.csv.
void write_csv(const ExperimentResult& result, const ExperimentSpec& spec);
std::string timing_path_for(const std::string& out_path);

ExperimentSpec experiment_from_json_text(const std::string& text);
ExperimentSpec load_experiment(const std::string& path);

} // namespace hhw
