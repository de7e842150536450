#pragma once

// Monte Carlo pricer for the Heston-Hull-White FX model: quadratic-exponential
// variance stepping with martingale correction, exact Ornstein-Uhlenbeck
// updates for both short-rate factors (including the quanto drift on the
// foreign leg), and trapezoidal discounting along each path.

#include <cstdint>
#include <vector>

#include "hhw/model.hpp"

namespace hhw {

struct McConfig {
    std::size_t n_paths = 100000;
    double dt = 0.05;          // target step; maturity must be a whole
                               // number of steps
    std::uint64_t seed = 1;
    int n_batches = 1;         // contiguous path blocks, one thread each
    bool antithetic = false;   // mirrored pairs; n_paths must be even
};

struct McEstimate {
    double price = 0.0;
    double se = 0.0;           // standard error of the price estimate
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    double elapsed = 0.0;      // wall seconds for the whole sweep
};

// Cross-path means per grid time, for debugging drift/term-structure issues.
struct PathStats {
    std::vector<double> time;
    std::vector<double> mean_v;
    std::vector<double> mean_rd;
    std::vector<double> mean_rf;
};

// Price several strikes of the same maturity off one set of paths.
std::vector<McEstimate> simulate_hhw_strikes(const FxModel& m, double maturity,
                                             OptionKind kind,
                                             const std::vector<double>& strikes,
                                             const McConfig& cfg,
                                             PathStats* stats = nullptr);

McEstimate simulate_hhw(const FxModel& m, const OptionSpec& opt,
                        const McConfig& cfg, PathStats* stats = nullptr);

// Same engine with both rate volatilities forced to zero.
McEstimate simulate_heston(const FxModel& m, const OptionSpec& opt,
                           const McConfig& cfg);

} // namespace hhw
