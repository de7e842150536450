#pragma once

// Characteristic function of log F_T/F_0 under the Heston model and the
// matching Fourier pricer for European puts/calls on the forward.

#include <complex>

namespace hhw {

struct ChfParams {
    double k_v = 0.0;     // variance mean-reversion speed
    double theta_v = 0.0; // long-run variance
    double gamma = 0.0;   // vol of vol
    double rho_sv = 0.0;  // spot-variance correlation, |rho_sv| < 1
    double v0 = 0.0;      // initial variance
    double F0 = 0.0;      // forward at time 0
    double T = 0.0;       // maturity
    double Dd = 1.0;      // domestic discount factor to T
};

void validate_chf_params(const ChfParams& p);

// E[exp(i u log(F_T/F_0))] evaluated with the branch-stable parametrization;
// accepts complex u (the pricer needs u - i/2).
std::complex<double> charfn(std::complex<double> u, const ChfParams& p);

// Undiscounted-forward put/call prices via a single real Fourier integral.
// Put-call parity holds exactly: call - put == Dd * (F0 - K).
double price_put_chf(const ChfParams& p, double strike);
double price_call_chf(const ChfParams& p, double strike);

} // namespace hhw
