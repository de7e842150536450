#pragma once

namespace hhw {

/**
 * Evaluation point of the Black-Scholes put kernel in log-forward / total
 * variance coordinates: x = log F, y = total variance (sigma^2 * T analog),
 * K = strike, Dd = domestic discount factor to maturity.
 */
struct BsPoint {
    double x;   // log forward
    double y;   // total variance, must be > 0
    double K;   // strike, must be > 0
    double Dd;  // discount factor in (0, 1]
};

/** Standard normal CDF, evaluated through the erfc tail form (no 1-Phi cancellation). */
double norm_cdf(double z);

/** Standard normal density. */
double norm_pdf(double z);

/** Inverse standard normal CDF (rational minimax approximation, |err| ~ 1e-15). */
double norm_cdf_inv(double p);

/** Put price Dd * (K Phi(-d2) - e^x Phi(-d1)); throws on y <= 0. */
double bs_put(const BsPoint& p);

/** Call price via parity: bs_put + Dd (e^x - K). */
double bs_call(const BsPoint& p);

/**
 * Analytic partial derivative d^{ix+iy} BS / dx^{ix} dy^{iy} of the put kernel.
 *
 * Supported orders: the cross/variance family (0,1), (1,1), (0,2), (2,1),
 * (2,2) in closed form, plus (1,0), (2,0), (4,0) obtained through the
 * reduction d_y = (d_x^2 - d_x)/2.  When |d2| > 37 the density-scaled family
 * underflows and returns exactly 0.  Unsupported orders throw.
 */
double bs_partial(const BsPoint& p, int ix, int iy);

/**
 * Implied volatility of a put: finds sigma in [1e-6, 5] with
 * bs_put(x=log F0, y=sigma^2 T) = price to 1e-10 absolute.
 * Safeguarded Newton within a maintained bisection bracket; throws if the
 * price sits outside the static no-arbitrage band (Dd*(K-F0))^+ .. Dd*K or
 * if 100 iterations do not converge.
 */
double implied_vol_put(double price, double F0, double K, double T, double Dd);

} // namespace hhw
