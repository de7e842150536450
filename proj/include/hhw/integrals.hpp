#pragma once

// Time integrals used by the vol-of-vol expansion pricers.
//
// Every integrand is built from a "coefficient function"
//     c(t) = c0 + cd * exp(k_d * t) + cf * exp(k_f * t),
// an exponential sum produced by the stochastic-rate adjustment of the
// variance process.  All integrals have closed forms in terms of expm1;
// near-singular parameter draws (mean-reversion speeds colliding with the
// variance speed) fall back to adaptive nested quadrature.  The *_quad
// functions run that quadrature unconditionally and serve as oracles.

#include <vector>

#include "hhw/model.hpp"

namespace hhw {

// Exponential-sum coefficients plus the cached rates and horizon they bind to.
struct ExpCoeffs {
    double c0 = 0.0;
    double cd = 0.0;
    double cf = 0.0;
    double kd = 0.0;  // domestic mean-reversion speed
    double kf = 0.0;  // foreign mean-reversion speed
    double kv = 0.0;  // variance mean-reversion speed
    double T = 0.0;   // integration horizon

    // c(t) evaluated directly.
    double operator()(double t) const;
};

// Bundle rates/horizon from the model with explicit (c0, cd, cf).
ExpCoeffs make_exp_coeffs(const FxModel& m, double T,
                          double c0, double cd, double cf);

// The rate adjustment alpha(t) entering the expansion, and 1 + alpha(t).
// alpha(T) == 0 by construction.
struct RateAdjustment {
    ExpCoeffs alpha;
    ExpCoeffs one_plus_alpha;
};

RateAdjustment alpha_coeffs(const FxModel& m, double T);

// Closed-form integrals (quadrature fallback near singular rate gaps):
//   I1(c)      = int_0^T e^{kv t} int_t^T e^{-kv u} c(u) du dt
//   I1_2k(c)   = same with kv replaced by 2 kv
//   I2(c)      = int_0^T e^{kv t} int_t^T int_u^T e^{-kv s} c(s) ds du dt
//   I3(c1,c2)  = int_0^T e^{2 kv t} [int_t^T e^{-kv u} c1(u) du]
//                                   [int_t^T e^{-kv s} c2(s) ds] dt,
//                evaluated as the symmetric product when c1 == c2
//   I4(c)      = int_0^T e^{kv t} int_t^T e^{kv u} int_u^T e^{-2 kv s} c(s) ds du dt
double I1(const ExpCoeffs& c);
double I1_2k(const ExpCoeffs& c);
double I2(const ExpCoeffs& c);
double I3(const ExpCoeffs& c);                        // symmetric c1 == c2
double I3(const ExpCoeffs& c1, const ExpCoeffs& c2);  // general
double I4(const ExpCoeffs& c);

// Quadrature oracles: always integrate numerically, never use closed forms.
double I1_quad(const ExpCoeffs& c);
double I1_2k_quad(const ExpCoeffs& c);
double I2_quad(const ExpCoeffs& c);
double I3_quad(const ExpCoeffs& c1, const ExpCoeffs& c2);
double I4_quad(const ExpCoeffs& c);

// Integrated variance of the forward under deterministic-volatility rates:
// y0 = int_0^T sigma_F^2(t) dt with
// sigma_F^2 = v0 + eta_d^2 B_d^2 + eta_f^2 B_f^2
//             - 2 sqrt(v0) rho_sd eta_d B_d + 2 sqrt(v0) rho_sf eta_f B_f
//             - 2 rho_df eta_d eta_f B_d B_f,
// B_k(t) = (e^{-k (T - t)} - 1) / k.
double y0_hhw(const FxModel& m, double T);
double y0_quad(const FxModel& m, double T);

} // namespace hhw
