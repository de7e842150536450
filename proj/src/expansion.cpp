#include "hhw/expansion.hpp"

#include <cmath>
#include <stdexcept>

#include "hhw/black_scholes.hpp"
#include "hhw/heston_chf.hpp"
#include "hhw/integrals.hpp"

namespace hhw {

namespace {

ExpansionBreakdown expansion_kernel(const BsPoint& pt, double v0, double gamma,
                                    double rho, double i1, double i2,
                                    double i3, double i4, double i1_2k) {
    const double g2 = gamma * gamma;
    ExpansionBreakdown b;
    b.bs_base = bs_put(pt);
    b.term_xy = rho * v0 * gamma * bs_partial(pt, 1, 1) * i1;
    b.term_xxy = rho * rho * v0 * g2 * bs_partial(pt, 2, 1) * (i2 - 0.5 * i4);
    b.term_yy = v0 * g2 * bs_partial(pt, 0, 2) * i3;
    b.term_xxyy =
        0.5 * rho * rho * v0 * v0 * g2 * bs_partial(pt, 2, 2) * i1 * i1;
    b.term_y = -0.25 * g2 * bs_partial(pt, 0, 1) * i1_2k;
    b.total = b.bs_base + b.term_xy + b.term_xxy + b.term_yy + b.term_xxyy +
              b.term_y;
    return b;
}

struct Setup {
    double F0 = 0.0;
    double Dd = 0.0;
};

Setup prepare(const FxModel& m, const OptionSpec& opt) {
    validate_model(m);
    require_expansion_ready(m);
    if (!(opt.maturity > 0.0))
        throw std::invalid_argument("expansion pricer: maturity must be positive");
    if (!(opt.strike > 0.0))
        throw std::invalid_argument("expansion pricer: strike must be positive");
    Setup s;
    s.F0 = forward_rate_fx(m.spot, m.dom.curve, m.fgn.curve, opt.maturity);
    s.Dd = m.dom.curve.discount(opt.maturity);
    return s;
}

PriceResult assemble(const FxModel& m, const OptionSpec& opt, const Setup& s,
                     double y0, const ExpCoeffs& one_plus_alpha,
                     const ExpCoeffs& alpha) {
    const BsPoint pt{std::log(s.F0), y0, opt.strike, s.Dd};
    const double i1 = I1(one_plus_alpha);
    const double i2 = I2(one_plus_alpha);
    // The second-order variance term integrates over ordered inner times,
    // which is half of the symmetric product integral I3.
    const double i3 = 0.5 * I3(one_plus_alpha);
    const double i4 = I4(alpha);
    const double i1_2k = I1_2k(alpha);
    ExpansionBreakdown b =
        expansion_kernel(pt, m.heston.v0, m.heston.gamma, m.corr.sv, i1, i2,
                         i3, i4, i1_2k);
    if (opt.kind == OptionKind::call) {
        const double parity = s.Dd * (s.F0 - opt.strike);
        b.bs_base += parity;
        b.total += parity;
    }
    return {b.total, pt.x, y0, b};
}

} // namespace

PriceResult price_heston_exp(const FxModel& m, const OptionSpec& opt) {
    const Setup s = prepare(m, opt);
    const ExpCoeffs one = make_exp_coeffs(m, opt.maturity, 1.0, 0.0, 0.0);
    const ExpCoeffs zero = make_exp_coeffs(m, opt.maturity, 0.0, 0.0, 0.0);
    return assemble(m, opt, s, m.heston.v0 * opt.maturity, one, zero);
}

PriceResult price_hhw_exp(const FxModel& m, const OptionSpec& opt) {
    const Setup s = prepare(m, opt);
    const RateAdjustment adj = alpha_coeffs(m, opt.maturity);
    return assemble(m, opt, s, y0_hhw(m, opt.maturity), adj.one_plus_alpha,
                    adj.alpha);
}

PriceResult price_hybrid_expchf(const FxModel& m, const OptionSpec& opt) {
    const PriceResult hhw = price_hhw_exp(m, opt);
    const PriceResult hes = price_heston_exp(m, opt);
    const Setup s = prepare(m, opt);
    ChfParams cp;
    cp.k_v = m.heston.k_v;
    cp.theta_v = m.heston.theta_v;
    cp.gamma = m.heston.gamma;
    cp.rho_sv = m.corr.sv;
    cp.v0 = m.heston.v0;
    cp.F0 = s.F0;
    cp.T = opt.maturity;
    cp.Dd = s.Dd;
    const double p_chf = (opt.kind == OptionKind::put)
                             ? price_put_chf(cp, opt.strike)
                             : price_call_chf(cp, opt.strike);
    ExpansionBreakdown b;
    b.bs_base = p_chf + (hhw.breakdown.bs_base - hes.breakdown.bs_base);
    b.term_xy = hhw.breakdown.term_xy - hes.breakdown.term_xy;
    b.term_xxy = hhw.breakdown.term_xxy - hes.breakdown.term_xxy;
    b.term_yy = hhw.breakdown.term_yy - hes.breakdown.term_yy;
    b.term_xxyy = hhw.breakdown.term_xxyy - hes.breakdown.term_xxyy;
    b.term_y = hhw.breakdown.term_y - hes.breakdown.term_y;
    b.total = b.bs_base + b.term_xy + b.term_xxy + b.term_yy + b.term_xxyy +
              b.term_y;
    return {b.total, hhw.x0, hhw.y0, b};
}

double delta_stochastic_rates(const FxModel& m, const OptionSpec& opt) {
    return price_hhw_exp(m, opt).price - price_heston_exp(m, opt).price;
}

} // namespace hhw
