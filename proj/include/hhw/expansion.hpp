#pragma once

// Vol-of-vol expansion pricers for FX options under Heston variance with
// Hull-White rates on both currencies, plus the control-variate hybrid that
// corrects the expansion with the exact Heston Fourier price:
//
//   price_hhw_exp      second-order expansion, stochastic rates included
//   price_heston_exp   same expansion with the rate adjustment switched off
//   price_hybrid_expchf  exact Heston price + (hhw - heston) expansion gap
//
// All three require v0 == theta_v and zero variance-rate correlations.

#include "hhw/model.hpp"

namespace hhw {

// Term-by-term decomposition of an expansion price.  `term_xxy` carries both
// integrals that multiply the d^3/dx^2 dy sensitivity.
struct ExpansionBreakdown {
    double bs_base = 0.0;
    double term_xy = 0.0;
    double term_xxy = 0.0;
    double term_yy = 0.0;
    double term_xxyy = 0.0;
    double term_y = 0.0;
    double total = 0.0;
};

struct PriceResult {
    double price = 0.0;
    double x0 = 0.0; // log forward
    double y0 = 0.0; // integrated forward variance used by the kernel
    ExpansionBreakdown breakdown;
};

PriceResult price_heston_exp(const FxModel& m, const OptionSpec& opt);
PriceResult price_hhw_exp(const FxModel& m, const OptionSpec& opt);
PriceResult price_hybrid_expchf(const FxModel& m, const OptionSpec& opt);

// Stochastic-rate premium: price_hhw_exp - price_heston_exp.
double delta_stochastic_rates(const FxModel& m, const OptionSpec& opt);

} // namespace hhw
