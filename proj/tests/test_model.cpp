#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "hhw/experiment.hpp" // benchmark_model()
#include "hhw/model.hpp"

using namespace hhw;

namespace {

const char* kModelJson = R"({
  "heston": {"v0": 0.05, "theta_v": 0.05, "k_v": 3.0, "gamma": 0.3},
  "hw_dom": {"k": 0.01, "eta": 0.007, "curve": [[1.0, 0.02], [5.0, 0.025]]},
  "hw_for": {"k": 0.05, "eta": 0.012, "curve": [[1.0, 0.0]]},
  "corr": {"sv": -0.4, "sd": -0.15, "sf": -0.15, "vd": 0.0, "vf": 0.0, "df": 0.25},
  "spot": 100.0
})";

} // namespace

TEST_CASE("default zero curve is flat 0%") {
    const ZeroCurve c;
    CHECK(c.discount(0.0) == 1.0);
    CHECK(c.discount(7.5) == 1.0);
    CHECK(c.forward_rate(3.0) == 0.0);
    CHECK(c.rate_integral(10.0) == 0.0);
}

TEST_CASE("flat curve reproduces its rate everywhere") {
    const ZeroCurve c = ZeroCurve::flat(0.02);
    CHECK(c.discount(0.0) == 1.0);
    CHECK(c.discount(1.0) == doctest::Approx(std::exp(-0.02)).epsilon(1e-15));
    CHECK(c.zero_rate(4.0) == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(c.forward_rate(9.0) == doctest::Approx(0.02).epsilon(1e-14));
}

TEST_CASE("knot curve reproduces zero rates exactly and bootstraps forwards") {
    const ZeroCurve c({{1.0, 0.02}, {5.0, 0.025}});
    CHECK(c.discount(1.0) == doctest::Approx(std::exp(-0.02)).epsilon(1e-15));
    CHECK(c.discount(5.0) == doctest::Approx(std::exp(-0.125)).epsilon(1e-15));
    // Piecewise-flat forward on (1, 5]: (0.025*5 - 0.02*1) / 4.
    CHECK(c.forward_rate(3.0) == doctest::Approx(0.02625).epsilon(1e-14));
    CHECK(c.forward_rate(0.5) == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(c.forward_rate(8.0) == doctest::Approx(0.02625).epsilon(1e-14)); // flat extrapolation
    CHECK(c.zero_rate(1.0) == doctest::Approx(0.02).epsilon(1e-14));
    // Discounts are nonincreasing for nonnegative rates.
    double prev = 1.0;
    for (double t = 0.25; t <= 10.0; t += 0.25) {
        const double d = c.discount(t);
        CHECK(d <= prev + 1e-15);
        CHECK(d > 0.0);
        prev = d;
    }
}

TEST_CASE("zero curve rejects malformed knots") {
    CHECK_THROWS_AS(ZeroCurve({{1.0, 0.02}, {1.0, 0.03}}), std::invalid_argument);
    CHECK_THROWS_AS(ZeroCurve({{2.0, 0.02}, {1.0, 0.03}}), std::invalid_argument);
    CHECK_THROWS_AS(ZeroCurve({{0.0, 0.02}}), std::invalid_argument);
    CHECK_THROWS_AS(ZeroCurve({{1.0, std::nan("")}}), std::invalid_argument);
    CHECK_THROWS_AS(ZeroCurve::flat(0.0).discount(-1.0), std::invalid_argument);
}

TEST_CASE("FX forward from the curve ratio") {
    const ZeroCurve flat0;
    CHECK(forward_rate_fx(100.0, flat0, flat0, 5.0) == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(forward_rate_fx(100.0, ZeroCurve::flat(0.02), flat0, 1.0) ==
          doctest::Approx(102.02013400267558).epsilon(1e-14));
    CHECK(forward_rate_fx(100.0, ZeroCurve::flat(0.02), flat0, 0.0) == 100.0);
}

TEST_CASE("forward is monotone in the two rates") {
    const ZeroCurve flat0;
    const double base = forward_rate_fx(100.0, ZeroCurve::flat(0.01), ZeroCurve::flat(0.01), 2.0);
    CHECK(forward_rate_fx(100.0, ZeroCurve::flat(0.02), ZeroCurve::flat(0.01), 2.0) > base);
    CHECK(forward_rate_fx(100.0, ZeroCurve::flat(0.01), ZeroCurve::flat(0.02), 2.0) < base);
}

TEST_CASE("cholesky factor reproduces the correlation matrix") {
    const FxModel m = benchmark_model();
    const auto a = corr_matrix(m.corr);
    const auto L = cholesky4(a);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k)
                s += L[i][k] * L[j][k];
            CHECK(std::abs(s - a[i][j]) <= 1e-12);
        }
    }
    // Strictly upper part of L is zero.
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            CHECK(L[i][j] == 0.0);
}

TEST_CASE("cholesky rejects an indefinite correlation matrix") {
    Correlations c{0.95, 0.95, 0.0, -0.5, 0.0, 0.0};
    CHECK_THROWS_AS(cholesky4(corr_matrix(c)), std::invalid_argument);
}

TEST_CASE("benchmark model validates cleanly with no warnings") {
    const FxModel m = benchmark_model();
    CHECK(validate_model(m).empty());
    CHECK(feller_satisfied(m.heston));
    CHECK_NOTHROW(require_expansion_ready(m));
}

TEST_CASE("each violated invariant raises its own message") {
    const auto message_of = [](const FxModel& m) -> std::string {
        try {
            validate_model(m);
        } catch (const std::invalid_argument& e) {
            return e.what();
        }
        return {};
    };
    FxModel bad_rho = benchmark_model();
    bad_rho.corr.sv = 1.2;
    FxModel bad_v0 = benchmark_model();
    bad_v0.heston.v0 = 0.0;
    FxModel bad_kv = benchmark_model();
    bad_kv.heston.k_v = -1.0;
    FxModel bad_eta = benchmark_model();
    bad_eta.fgn.eta = -0.01;
    FxModel bad_spot = benchmark_model();
    bad_spot.spot = 0.0;

    const std::string m_rho = message_of(bad_rho);
    const std::string m_v0 = message_of(bad_v0);
    const std::string m_kv = message_of(bad_kv);
    const std::string m_eta = message_of(bad_eta);
    const std::string m_spot = message_of(bad_spot);
    CHECK(m_rho.find("correlation") != std::string::npos);
    CHECK(m_v0.find("v0") != std::string::npos);
    CHECK(m_kv.find("k_v") != std::string::npos);
    CHECK(m_eta.find("eta") != std::string::npos);
    CHECK(m_spot.find("spot") != std::string::npos);
    // Distinctness: four different invariants, four different diagnostics.
    CHECK(m_rho != m_v0);
    CHECK(m_v0 != m_kv);
    CHECK(m_kv != m_eta);
    CHECK(m_eta != m_spot);
}

TEST_CASE("Feller violation is a warning, not an error") {
    FxModel m = benchmark_model();
    m.heston.gamma = 0.6; // gamma^2 = 0.36 > 2 k_v theta_v = 0.3
    CHECK_FALSE(feller_satisfied(m.heston));
    const auto warnings = validate_model(m);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("Feller") != std::string::npos);
}

TEST_CASE("expansion preconditions: v0 == theta_v and zero variance-rate correlation") {
    FxModel split = benchmark_model();
    split.heston.theta_v = 0.06;
    CHECK_THROWS_AS(require_expansion_ready(split), std::invalid_argument);
    FxModel coupled = benchmark_model();
    coupled.corr.vd = 0.1;
    CHECK(validate_model(coupled).empty()); // valid model in general...
    CHECK_THROWS_AS(require_expansion_ready(coupled), std::invalid_argument); // ...but not expandable
}

TEST_CASE("model JSON parsing round-trips the fields") {
    const FxModel m = model_from_json_text(kModelJson);
    CHECK(m.heston.v0 == 0.05);
    CHECK(m.heston.gamma == 0.3);
    CHECK(m.dom.k == 0.01);
    CHECK(m.dom.eta == 0.007);
    CHECK(m.dom.curve.discount(1.0) == doctest::Approx(std::exp(-0.02)).epsilon(1e-15));
    CHECK(m.fgn.curve.discount(2.0) == 1.0);
    CHECK(m.corr.sv == -0.4);
    CHECK(m.corr.df == 0.25);
    CHECK(m.spot == 100.0);
    CHECK(validate_model(m).empty());
}

TEST_CASE("model JSON loading from a file and failure modes") {
    const std::string path = "test_model_tmp.json";
    {
        std::ofstream out(path);
        out << kModelJson;
    }
    const FxModel m = load_model(path);
    CHECK(m.spot == 100.0);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_model("does_not_exist_anywhere.json"), std::runtime_error);
    CHECK_THROWS_AS(model_from_json_text("{ not json"), std::invalid_argument);
    CHECK_THROWS_AS(model_from_json_text(R"({"heston":{"v0":-1,"theta_v":1,"k_v":1,"gamma":0},
        "hw_dom":{"k":1,"eta":0,"curve":[]},"hw_for":{"k":1,"eta":0,"curve":[]},
        "corr":{"sv":0,"sd":0,"sf":0,"vd":0,"vf":0,"df":0},"spot":100})"),
                    std::invalid_argument); // validated on load
    CHECK_THROWS_AS(model_from_json_text(R"({"heston":{"v0":1}})"),
                    std::invalid_argument); // missing keys reported the same way
}
