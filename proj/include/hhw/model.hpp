#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace hhw {

/**
 * Piecewise curve of continuously-compounded zero rates keyed by tenor.
 * Between knots the implied instantaneous forward rate is flat (bootstrapped
 * so that discount factors reproduce each knot's zero rate exactly); beyond
 * the last knot the forward extrapolates flat.
 */
class ZeroCurve {
public:
    ZeroCurve() = default;  // flat 0%
    explicit ZeroCurve(std::vector<std::pair<double, double>> knots);

    static ZeroCurve flat(double rate);

    double forward_rate(double t) const;   // instantaneous forward f(0, t)
    double rate_integral(double t) const;  // int_0^t f(0,s) ds = -log discount(t)
    double discount(double t) const;       // exp(-rate_integral(t))
    double zero_rate(double t) const;      // rate_integral(t) / t  (t > 0)

    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

private:
    std::vector<std::pair<double, double>> knots_;   // (tenor, zero rate)
    std::vector<double> fwd_;                        // forward per segment
    std::vector<double> cum_;                        // rate_integral at each knot
};

struct HestonParams {
    double v0;       // initial variance
    double theta_v;  // long-run variance
    double k_v;      // mean-reversion speed
    double gamma;    // vol-of-vol
};

struct HullWhiteParams {
    double k;         // mean-reversion speed
    double eta;       // absolute short-rate volatility
    ZeroCurve curve;  // initial zero curve of this currency
};

/** Pairwise correlations over the factor ordering (S, v, d, f). */
struct Correlations {
    double sv, sd, sf, vd, vf, df;
};

struct FxModel {
    HestonParams heston;
    HullWhiteParams dom;  // domestic currency
    HullWhiteParams fgn;  // foreign currency
    Correlations corr;
    double spot;          // S0, domestic units per foreign unit
};

enum class OptionKind { put, call };

struct OptionSpec {
    OptionKind kind = OptionKind::put;
    double strike = 0.0;    // K > 0
    double maturity = 0.0;  // T > 0, years
};

/** 4x4 correlation matrix over (S, v, d, f) built from the pairwise entries. */
std::array<std::array<double, 4>, 4> corr_matrix(const Correlations& c);

/**
 * Cholesky factor of a symmetric PSD matrix; pivots below -1e-12 fail.
 * Returns the lower-triangular factor L with A = L L^T.
 */
std::array<std::array<double, 4>, 4>
cholesky4(const std::array<std::array<double, 4>, 4>& a);

/**
 * Validates all hard invariants (positivity, correlation bounds and positive
 * semidefiniteness, curve sanity); throws std::invalid_argument with a
 * distinct message per violated invariant.  Returns soft warnings (currently:
 * the Feller condition 2 k_v theta_v >= gamma^2 when violated).
 */
std::vector<std::string> validate_model(const FxModel& m);

/**
 * Additional preconditions of the expansion pricers: v0 == theta_v within
 * 1e-12 relative, and zero correlation between variance and either rate.
 */
void require_expansion_ready(const FxModel& m);

/** Whether the Feller condition 2 k_v theta_v >= gamma^2 holds. */
bool feller_satisfied(const HestonParams& h);

/** FX forward F0 = S0 * P_f(0,T) / P_d(0,T). */
double forward_rate_fx(double S0, const ZeroCurve& dom, const ZeroCurve& fgn, double T);

/** Model loading from JSON:
 *  {heston:{v0,theta_v,k_v,gamma}, hw_dom:{k,eta,curve:[[t,r],...]},
 *   hw_for:{...}, corr:{sv,sd,sf,vd,vf,df}, spot}.
 */
FxModel load_model(const std::string& path);
FxModel model_from_json_text(const std::string& text);

} // namespace hhw
