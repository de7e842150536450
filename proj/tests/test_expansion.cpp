#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hhw/black_scholes.hpp"
#include "hhw/expansion.hpp"
#include "hhw/experiment.hpp"
#include "hhw/heston_chf.hpp"
#include "hhw/integrals.hpp"

using namespace hhw;

namespace {

OptionSpec put_at(double K, double T) { return OptionSpec{OptionKind::put, K, T}; }

void check_breakdown_additivity(const PriceResult& r) {
    const ExpansionBreakdown& b = r.breakdown;
    const double sum =
        b.bs_base + b.term_xy + b.term_xxy + b.term_yy + b.term_xxyy + b.term_y;
    CHECK(std::abs(b.total - sum) <= 1e-13 * std::max(1.0, std::abs(b.total)));
    CHECK(r.price == b.total);
}

} // namespace

TEST_CASE("pinned prices at the demonstration parameters, T=1 ATM") {
    const FxModel m = benchmark_model();
    const OptionSpec atm = put_at(100.0, 1.0);
    const PriceResult hes = price_heston_exp(m, atm);
    const PriceResult hhw = price_hhw_exp(m, atm);
    const PriceResult hyb = price_hybrid_expchf(m, atm);
    CHECK(hes.price == doctest::Approx(8.7132948370820849).epsilon(1e-12));
    CHECK(hhw.price == doctest::Approx(8.7319557579859524).epsilon(1e-12));
    CHECK(hyb.price == doctest::Approx(8.7386771559598042).epsilon(1e-12));
    CHECK(delta_stochastic_rates(m, atm) ==
          doctest::Approx(0.018660920903867506).epsilon(1e-12));
    check_breakdown_additivity(hes);
    check_breakdown_additivity(hhw);
    check_breakdown_additivity(hyb);
    // Coordinates the kernel actually used.
    CHECK(hhw.x0 == doctest::Approx(std::log(100.0)).epsilon(1e-15));
    CHECK(hhw.y0 == doctest::Approx(y0_hhw(m, 1.0)).epsilon(1e-15));
    CHECK(hes.y0 == doctest::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("pinned term-by-term decomposition of the rate-adjusted expansion") {
    const FxModel m = benchmark_model();
    const ExpansionBreakdown b = price_hhw_exp(m, put_at(100.0, 1.0)).breakdown;
    CHECK(b.bs_base == doctest::Approx(8.9207227499546917).epsilon(1e-12));
    CHECK(b.term_xy == doctest::Approx(-0.060521136175775689).epsilon(1e-12));
    CHECK(b.term_xxy == doctest::Approx(-0.057980583653006797).epsilon(1e-12));
    CHECK(b.term_yy == doctest::Approx(-0.11914395185109072).epsilon(1e-12));
    CHECK(b.term_xxyy == doctest::Approx(0.049267992897848244).epsilon(1e-12));
    CHECK(b.term_y == doctest::Approx(-0.00038931318671283808).epsilon(1e-12));
}

TEST_CASE("pinned longer-maturity ATM prices") {
    const FxModel m = benchmark_model();
    CHECK(price_hhw_exp(m, put_at(100.0, 5.0)).price ==
          doctest::Approx(19.799735961115474).epsilon(1e-12));
    CHECK(price_hhw_exp(m, put_at(100.0, 10.0)).price ==
          doctest::Approx(28.572099341975981).epsilon(1e-12));
}

TEST_CASE("deterministic rates collapse the rate-adjusted pricers onto pure Heston") {
    FxModel m = benchmark_model();
    m.dom.eta = 0.0;
    m.fgn.eta = 0.0;
    for (double T : {1.0, 5.0}) {
        for (double K : {85.0, 100.0, 118.0}) {
            const OptionSpec opt = put_at(K, T);
            const double hes = price_heston_exp(m, opt).price;
            const double hhw = price_hhw_exp(m, opt).price;
            CHECK(std::abs(hhw - hes) <= 1e-14 * hes);
            const double dp = delta_stochastic_rates(m, opt);
            CHECK(dp == 0.0);
            // Hybrid reduces to the plain Fourier price.
            ChfParams cp;
            cp.k_v = m.heston.k_v;
            cp.theta_v = m.heston.theta_v;
            cp.gamma = m.heston.gamma;
            cp.rho_sv = m.corr.sv;
            cp.v0 = m.heston.v0;
            cp.F0 = 100.0;
            cp.T = T;
            cp.Dd = 1.0;
            CHECK(std::abs(price_hybrid_expchf(m, opt).price - price_put_chf(cp, K)) <=
                  1e-12 * hes);
        }
    }
}

TEST_CASE("zero vol-of-vol reduces to Black-Scholes at the adjusted variance") {
    FxModel m = benchmark_model();
    m.heston.gamma = 0.0;
    for (double T : {1.0, 10.0}) {
        const PriceResult r = price_hhw_exp(m, put_at(95.0, T));
        const double bs = bs_put(BsPoint{r.x0, y0_hhw(m, T), 95.0, 1.0});
        CHECK(r.price == doctest::Approx(bs).epsilon(1e-14));
        CHECK(r.breakdown.term_xy == 0.0);
        CHECK(r.breakdown.term_yy == 0.0);
        // The hybrid lands on the same value through the Fourier route.
        CHECK(price_hybrid_expchf(m, put_at(95.0, T)).price ==
              doctest::Approx(bs).epsilon(1e-8));
    }
}

TEST_CASE("zero spot-variance correlation kills exactly the cross terms") {
    FxModel m = benchmark_model();
    m.corr.sv = 0.0;
    const ExpansionBreakdown hhw = price_hhw_exp(m, put_at(100.0, 1.0)).breakdown;
    CHECK(hhw.term_xy == 0.0);
    CHECK(hhw.term_xxy == 0.0);
    CHECK(hhw.term_xxyy == 0.0);
    CHECK(hhw.term_yy != 0.0);
    CHECK(hhw.term_y != 0.0); // pure rate-adjustment term survives
    const ExpansionBreakdown hes = price_heston_exp(m, put_at(100.0, 1.0)).breakdown;
    CHECK(hes.term_xy == 0.0);
    CHECK(hes.term_xxy == 0.0);
    CHECK(hes.term_xxyy == 0.0);
    CHECK(hes.term_yy != 0.0);
    CHECK(hes.term_y == 0.0); // no stochastic-rate term in the pure Heston expansion
}

TEST_CASE("calls price through exact parity") {
    const FxModel m = benchmark_model();
    for (double T : {1.0, 5.0}) {
        for (double K : {80.0, 100.0, 121.0}) {
            const OptionSpec put = put_at(K, T);
            const OptionSpec call{OptionKind::call, K, T};
            const double F0 = 100.0; // flat curves
            CHECK(price_hhw_exp(m, call).price - price_hhw_exp(m, put).price ==
                  doctest::Approx(F0 - K).epsilon(1e-12));
            CHECK(price_heston_exp(m, call).price - price_heston_exp(m, put).price ==
                  doctest::Approx(F0 - K).epsilon(1e-12));
            CHECK(price_hybrid_expchf(m, call).price - price_hybrid_expchf(m, put).price ==
                  doctest::Approx(F0 - K).epsilon(1e-12));
        }
    }
}

TEST_CASE("ATM price responds positively to a joint variance bump") {
    FxModel m = benchmark_model();
    const double base = price_hhw_exp(m, put_at(100.0, 1.0)).price;
    m.heston.v0 += 1e-4;
    m.heston.theta_v += 1e-4;
    CHECK(price_hhw_exp(m, put_at(100.0, 1.0)).price > base);
}

TEST_CASE("prices respect the static put lower bound across the strike grid") {
    FxModel m = benchmark_model();
    for (double gamma : {0.1, 0.3, 0.6}) {
        m.heston.gamma = gamma;
        for (double T : {1.0, 5.0}) {
            for (double K : strike_grid(100.0, T, {-1.5, -0.5, 0.0, 0.5, 1.5})) {
                const double floor = std::max(K - 100.0, 0.0);
                CHECK(price_hhw_exp(m, put_at(K, T)).price >= floor - 1e-9);
                CHECK(price_hybrid_expchf(m, put_at(K, T)).price >= floor - 1e-9);
            }
        }
    }
}

TEST_CASE("expansion preconditions are enforced") {
    FxModel split = benchmark_model();
    split.heston.theta_v = 0.06;
    CHECK_THROWS_AS(price_hhw_exp(split, put_at(100.0, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(price_heston_exp(split, put_at(100.0, 1.0)), std::invalid_argument);
    FxModel coupled = benchmark_model();
    coupled.corr.vf = 0.2;
    CHECK_THROWS_AS(price_hhw_exp(coupled, put_at(100.0, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(price_hhw_exp(benchmark_model(), put_at(-5.0, 1.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(price_hhw_exp(benchmark_model(), put_at(100.0, 0.0)),
                    std::invalid_argument);
}
