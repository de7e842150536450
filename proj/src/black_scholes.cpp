#include "hhw/black_scholes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hhw {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

struct D12 {
    double d1, d2, sqy;
};

D12 d_values(const BsPoint& p) {
    const double sqy = std::sqrt(p.y);
    const double d1 = (p.x - std::log(p.K) + 0.5 * p.y) / sqy;
    return {d1, d1 - sqy, sqy};
}

void check_point(const BsPoint& p) {
    if (!(p.y > 0.0))
        throw std::domain_error("bs_put: total variance must be positive");
    if (!(p.K > 0.0))
        throw std::domain_error("bs_put: strike must be positive");
    if (!(p.Dd > 0.0 && p.Dd <= 1.0))
        throw std::domain_error("bs_put: discount factor must lie in (0, 1]");
}

} // namespace

double norm_cdf(double z) {
    return 0.5 * std::erfc(-z * kInvSqrt2);
}

double norm_pdf(double z) {
    return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

double norm_cdf_inv(double p) {
    // Wichura's PPND16 rational approximation, accurate to ~1e-16 relative.
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("norm_cdf_inv: argument must lie in (0, 1)");
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                       6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                     1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                   1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return num / den;
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        x = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        x = num / den;
    }
    return (q < 0.0) ? -x : x;
}

double bs_put(const BsPoint& p) {
    check_point(p);
    const D12 d = d_values(p);
    return p.Dd * (p.K * norm_cdf(-d.d2) - std::exp(p.x) * norm_cdf(-d.d1));
}

double bs_call(const BsPoint& p) {
    return bs_put(p) + p.Dd * (std::exp(p.x) - p.K);
}

double bs_partial(const BsPoint& p, int ix, int iy) {
    check_point(p);
    const D12 d = d_values(p);
    const double d1 = d.d1, d2 = d.d2, y = p.y, sqy = d.sqy;

    // d/dx of the put itself does not carry the Gaussian-density factor.
    const auto dx_put = [&] { return -p.Dd * std::exp(p.x) * norm_cdf(-d1); };

    if (ix == 1 && iy == 0)
        return dx_put();

    // Every remaining supported partial is proportional to Dd*K*pdf(d2),
    // which underflows to an exact 0 in the far tails.
    const bool tail = std::fabs(d2) > 37.0;
    const double core = tail ? 0.0 : p.Dd * p.K * norm_pdf(d2);

    const auto part = [&](int i, int j) -> double {
        if (i == 0 && j == 1)
            return core / (2.0 * sqy);
        if (i == 1 && j == 1)
            return -core * d2 / (2.0 * y);
        if (i == 0 && j == 2)
            return core * (d1 * d2 - 1.0) / (4.0 * y * sqy);
        if (i == 2 && j == 1)
            return core * (d2 * d2 - 1.0) / (2.0 * y * sqy);
        if (i == 2 && j == 2)
            return core * (d1 * d2 * d2 * d2 - 3.0 * (d1 * d2 + d2 * d2 - 1.0)) /
                   (4.0 * y * y * sqy);
        throw std::invalid_argument("bs_partial: unsupported derivative order (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
    };

    // Pure-x orders through the reduction d_y = (d_x^2 - d_x)/2:
    //   d_x^2 = 2 d_y + d_x,   d_x^4 = 2 d_x^2 d_y + 2 d_x d_y + 2 d_y + d_x.
    if (ix == 2 && iy == 0)
        return 2.0 * part(0, 1) + dx_put();
    if (ix == 4 && iy == 0)
        return 2.0 * part(2, 1) + 2.0 * part(1, 1) + 2.0 * part(0, 1) + dx_put();
    return part(ix, iy);
}

double implied_vol_put(double price, double F0, double K, double T, double Dd) {
    if (!(F0 > 0.0 && K > 0.0 && T > 0.0 && Dd > 0.0))
        throw std::invalid_argument("implied_vol_put: F0, K, T, Dd must be positive");
    const double lower = std::max(0.0, Dd * (K - F0));
    const double upper = Dd * K;
    if (!(price > lower))
        throw std::invalid_argument("implied_vol_put: price at or below intrinsic bound");
    if (!(price < upper))
        throw std::invalid_argument("implied_vol_put: price at or above discounted strike");

    const double x = std::log(F0);
    double lo = 1e-6, hi = 5.0;
    const auto f = [&](double sigma) {
        return bs_put({x, sigma * sigma * T, K, Dd}) - price;
    };
    double flo = f(lo);
    double fhi = f(hi);
    constexpr double tol = 1e-10;
    if (flo >= 0.0) {
        if (flo <= tol)
            return lo;
        throw std::invalid_argument("implied_vol_put: price below the sigma=1e-6 floor");
    }
    if (fhi <= 0.0) {
        if (-fhi <= tol)
            return hi;
        throw std::invalid_argument("implied_vol_put: price above the sigma=5 cap");
    }

    double sigma = 0.25;
    for (int it = 0; it < 100; ++it) {
        const double fs = f(sigma);
        if (std::fabs(fs) <= tol)
            return sigma;
        if (fs < 0.0)
            lo = sigma;
        else
            hi = sigma;
        const double vega = bs_partial({x, sigma * sigma * T, K, Dd}, 0, 1) *
                            2.0 * sigma * T;
        double next = (vega > 0.0) ? sigma - fs / vega : sigma;
        // Reject Newton steps that leave the bracket, and interleave plain
        // bisections so the bracket provably collapses even when vega is flat.
        if (!(next > lo && next < hi) || it % 3 == 2)
            next = 0.5 * (lo + hi);
        if (std::fabs(next - sigma) < 1e-16 * std::max(1.0, sigma) && hi - lo < 1e-12)
            return next;
        sigma = next;
    }
    throw std::runtime_error("implied_vol_put: no convergence after 100 iterations");
}

} // namespace hhw
