#include "hhw/heston_chf.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hhw/quadrature.hpp"

namespace hhw {

namespace {

using cd_t = std::complex<double>;

// log(1 + z) stable for small |z|.
cd_t clog1p(cd_t z) {
    const cd_t w = 1.0 + z;
    if (w == cd_t(1.0, 0.0))
        return z;
    return std::log(w) * z / (w - 1.0);
}

} // namespace

void validate_chf_params(const ChfParams& p) {
    if (!(p.v0 > 0.0))
        throw std::invalid_argument("charfn: v0 must be positive");
    if (!(p.theta_v > 0.0))
        throw std::invalid_argument("charfn: theta_v must be positive");
    if (!(p.k_v > 0.0))
        throw std::invalid_argument("charfn: k_v must be positive");
    if (!(p.gamma >= 0.0))
        throw std::invalid_argument("charfn: gamma must be nonnegative");
    if (!(std::fabs(p.rho_sv) < 1.0))
        throw std::invalid_argument("charfn: |rho_sv| must be below 1");
    if (!(p.F0 > 0.0))
        throw std::invalid_argument("charfn: F0 must be positive");
    if (!(p.T > 0.0))
        throw std::invalid_argument("charfn: T must be positive");
    if (!(p.Dd > 0.0))
        throw std::invalid_argument("charfn: Dd must be positive");
}

std::complex<double> charfn(std::complex<double> u, const ChfParams& p) {
    const cd_t iu(- u.imag(), u.real()); // i * u
    const cd_t A = u * u + iu;

    if (p.gamma < 1e-14) {
        // Deterministic variance: log-forward is Gaussian with variance
        // int_0^T E[v_t] dt.
        const double iv =
            p.theta_v * p.T +
            (p.v0 - p.theta_v) * (1.0 - std::exp(-p.k_v * p.T)) / p.k_v;
        return std::exp(-0.5 * A * iv);
    }

    const double g2 = p.gamma * p.gamma;
    const cd_t xi = p.k_v - cd_t(0.0, 1.0) * p.rho_sv * p.gamma * u;
    const cd_t d = std::sqrt(xi * xi + g2 * A);
    const cd_t g = -g2 * A / ((xi + d) * (xi + d));
    const cd_t edT = std::exp(-d * p.T);
    const cd_t D = -A / (xi + d) * (1.0 - edT) / (1.0 - g * edT);
    const cd_t C =
        p.k_v * p.theta_v *
        (-A * p.T / (xi + d) - (2.0 / g2) * (clog1p(-g * edT) - clog1p(-g)));
    return std::exp(C + D * p.v0);
}

namespace {

// Shared Fourier integral:
//   I = (Dd sqrt(F0 K) / pi) int_0^U Re[e^{i u X} phi(u - i/2)] / (u^2 + 1/4) du
// with X = log(F0/K).  Then put = Dd K - I and call = Dd F0 - I.
double fourier_integral(const ChfParams& p, double strike) {
    validate_chf_params(p);
    if (!(strike > 0.0))
        throw std::invalid_argument("price_put_chf: strike must be positive");
    const double X = std::log(p.F0 / strike);
    auto integrand = [&](double u) {
        const cd_t phi = charfn(cd_t(u, -0.5), p);
        const cd_t osc = std::exp(cd_t(0.0, u * X));
        return (osc * phi).real() / (u * u + 0.25);
    };
    // Grow the truncation point until the integrand envelope is negligible.
    const double scale = 1.0; // integrand is O(1) at u = 0 (phi(-i/2) ~ 1)
    double U = 50.0;
    const double cutoff = 1e-15 * scale;
    while (U < 2e4) {
        const double env = std::abs(charfn(cd_t(U, -0.5), p)) / (U * U + 0.25);
        if (env < cutoff)
            break;
        U *= 1.6;
    }
    QuadOptions opt;
    opt.tol_rel = 1e-11;
    opt.tol_abs = 1e-13;
    const double integral = quad(integrand, 0.0, U, opt);
    return p.Dd * std::sqrt(p.F0 * strike) / M_PI * integral;
}

} // namespace

double price_put_chf(const ChfParams& p, double strike) {
    return p.Dd * strike - fourier_integral(p, strike);
}

double price_call_chf(const ChfParams& p, double strike) {
    return p.Dd * p.F0 - fourier_integral(p, strike);
}

} // namespace hhw
