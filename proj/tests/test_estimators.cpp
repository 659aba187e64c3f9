#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "catsim/estimators.hpp"

using namespace catsim;

namespace {

// Hand-rolled spectrum container for synthetic-model tests.
ConfinedSpectrum fake_spectrum(Scheme scheme, std::vector<double> spacings,
                               std::vector<double> overlaps) {
    ConfinedSpectrum s;
    s.scheme = scheme;
    const int n = static_cast<int>(spacings.size());
    s.spacings = Eigen::Map<Eigen::VectorXd>(spacings.data(), n);
    s.overlaps = Eigen::Map<Eigen::VectorXd>(overlaps.data(), n);
    s.eigenvalues_even = Eigen::VectorXd::Zero(n + 1);
    s.eigenvalues_odd = Eigen::VectorXd::Zero(n + 1);
    return s;
}

Trajectory synthetic_flip(double gamma_rate, double t_max, int n) {
    Trajectory tr;
    tr.times.resize(n);
    tr.px.resize(n);
    tr.pz = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        const double t = t_max * i / (n - 1);
        tr.times(i) = t;
        tr.px(i) = 0.5 * (1.0 - std::exp(-2.0 * gamma_rate * t));
    }
    return tr;
}

}  // namespace

TEST_CASE("sinc is continuous through the series/ratio switchover") {
    CHECK(sinc(0.0) == 1.0);
    CHECK(std::abs(sinc(M_PI)) < 1e-15);
    CHECK(sinc(-0.5) == sinc(0.5));
    // switchover at |x| = 1e-4: both evaluations must agree far below tolerance
    for (double x : {0.99e-4, 1.0e-4, 1.01e-4}) {
        CHECK(sinc(x) == doctest::Approx(std::sin(x) / x).epsilon(1e-14));
    }
    // series branch against the exact Taylor value
    const double x = 1e-5;
    CHECK(std::abs(sinc(x) - (1.0 - x * x / 6.0)) < 1e-18);
}

TEST_CASE("short-time bit-flip probability vanishes quadratically at t = 0") {
    const auto s = fake_spectrum(Scheme::kerr, {1.0, 3.0}, {0.1, 0.01});
    CHECK(kerr_bitflip_probability(0.0, 1e-5, s) == 0.0);
    const double p1 = kerr_bitflip_probability(1e-3, 1e-5, s);
    const double p2 = kerr_bitflip_probability(2e-3, 1e-5, s);
    CHECK(p2 / p1 == doctest::Approx(8.0).epsilon(1e-4));  // ~ t^3 overall at short t
    // saturated regime: brackets -> 1, probability -> kappa_l t sum(lambda)
    const double psat = kerr_bitflip_probability(1e6, 1e-5, s);
    CHECK(psat == doctest::Approx(1e-5 * 1e6 * 0.11).epsilon(1e-3));
}

TEST_CASE("combined rates reduce to the dissipative floor when spacings close") {
    const double kl = 1e-5, alpha2 = 4.0, kconf = 16.0;
    const auto closed = fake_spectrum(Scheme::kerr, {0.0, 0.0}, {0.1, 0.05});
    CHECK(combined_kerr_rate(kl, alpha2, kconf, closed) ==
          doctest::Approx(kl * std::exp(-2.0 * alpha2)).epsilon(1e-12));
    // a tiny overlap below the cutoff contributes nothing
    const auto tiny = fake_spectrum(Scheme::kerr, {5.0}, {1e-13});
    CHECK(combined_kerr_rate(kl, alpha2, kconf, tiny) ==
          doctest::Approx(kl * std::exp(-2.0 * alpha2)).epsilon(1e-12));
}

TEST_CASE("tpe rate counts both branches of each excited pair") {
    const double kl = 1e-5, alpha2 = 4.0, kconf = 16.0;
    // same spacing/overlap data tagged as the two schemes
    const auto kerr = fake_spectrum(Scheme::kerr, {2.0, 4.0}, {0.05, 0.01});
    const auto tpe = fake_spectrum(Scheme::tpe, {2.0, 4.0}, {0.05, 0.01});
    const double floor = kl * std::exp(-2.0 * alpha2);
    const double from_kerr = combined_kerr_rate(kl, alpha2, kconf, kerr) - floor;
    const double from_tpe = combined_tpe_rate(kl, alpha2, kconf, tpe) - floor;
    CHECK(from_tpe == doctest::Approx(2.0 * from_kerr).epsilon(1e-12));
    // ham_rate rescales the sinc argument
    const double scaled = combined_kerr_rate(kl, alpha2, 2.0 * kconf, kerr, 2.0) - floor;
    CHECK(scaled == doctest::Approx(from_kerr).epsilon(1e-12));
}

TEST_CASE("exponential fit recovers a synthetic telegraph rate") {
    const double rate = 3.7e-6;
    const Trajectory tr = synthetic_flip(rate, 2e5, 200);
    const RateFit f = fit_exponential_window(tr, 0.0);
    CHECK(f.rate == doctest::Approx(rate).epsilon(1e-10));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    // the kappa_conf protocol drops the transient window t < 5/kappa_conf
    const RateFit g = fit_exponential_rate(tr, 1e-4);
    CHECK(g.t_min == doctest::Approx(5e4));
    CHECK(g.rate == doctest::Approx(rate).epsilon(1e-10));
    CHECK_THROWS_AS((void)fit_exponential_rate(tr, 0.0), FitError);
}

TEST_CASE("exponential fit rejects non-exponential data when min_r2 is set") {
    Trajectory tr = synthetic_flip(1e-5, 1e5, 100);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> jitter(0.0, 0.05);
    for (int i = 0; i < tr.px.size(); ++i) {
        tr.px(i) = std::min(0.49, std::max(0.0, tr.px(i) + std::abs(jitter(rng)) * tr.px(i) +
                                                    0.1 * tr.px(i) * std::sin(0.3 * i)));
    }
    CHECK_NOTHROW((void)fit_exponential_window(tr, 0.0));
    CHECK_THROWS_AS((void)fit_exponential_window(tr, 0.0, 0.99999), FitError);
}

TEST_CASE("gamma fit reproduces exact exponentials to 1e-8") {
    const double gamma = 1.873, c0 = -9.2;
    std::map<double, double> rates;
    for (double a2 : {2.0, 4.0, 6.0, 8.0}) rates[a2] = std::exp(-gamma * a2 + c0);
    const GammaFit f = fit_gamma(rates);
    CHECK(std::abs(f.gamma - gamma) < 1e-8);
    CHECK(std::abs(f.c0 - c0) < 1e-8);
    CHECK(f.residual < 1e-10);
    CHECK(f.alpha2_min == 2.0);
    CHECK(f.alpha2_max == 8.0);
}

TEST_CASE("gamma fit guards its domain") {
    std::map<double, double> two{{2.0, 1e-6}, {4.0, 1e-8}};
    CHECK_THROWS_AS((void)fit_gamma(two), FitError);
    std::map<double, double> bad{{2.0, 1e-6}, {4.0, 0.0}, {6.0, 1e-10}};
    CHECK_THROWS_AS((void)fit_gamma(bad), FitError);
}
