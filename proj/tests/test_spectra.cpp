#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "catsim/spectra.hpp"

using namespace catsim;

TEST_CASE("kerr hamiltonian annihilates both coherent pointer states") {
    const OscillatorSpace sp = make_space(Complex(std::sqrt(3.0), 0.0));
    const CMat h = CMat(kerr_hamiltonian(sp));
    CHECK((h - h.adjoint()).norm() < 1e-12);
    for (double sign : {1.0, -1.0}) {
        const CVec c = coherent_state(sp, sign * sp.alpha);
        CHECK((h * c).norm() < 1e-6);  // truncation tail only
    }
    // positive semidefinite by construction (L†L)
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    CHECK(es.eigenvalues()(0) > -1e-10);
}

TEST_CASE("kerr spectrum has a parity-degenerate kernel and a ~4|alpha|^2 gap") {
    const double alpha2 = 8.0;
    const OscillatorSpace sp = make_space(Complex(std::sqrt(alpha2), 0.0));
    const ConfinedSpectrum s = kerr_spectrum(sp, 4);
    CHECK(std::abs(s.eigenvalues_even(0)) < 1e-8);
    CHECK(std::abs(s.eigenvalues_odd(0)) < 1e-8);
    // first excited level approximates the 4|alpha|^2 gap
    CHECK(s.eigenvalues_even(1) == doctest::Approx(4.0 * alpha2).epsilon(0.15));
    // ascending order and positive spacings data layout
    for (int n = 1; n < s.eigenvalues_even.size(); ++n) {
        CHECK(s.eigenvalues_even(n) > s.eigenvalues_even(n - 1));
        CHECK(s.eigenvalues_odd(n) > s.eigenvalues_odd(n - 1));
    }
    for (int n = 0; n < s.spacings.size(); ++n) {
        CHECK(s.spacings(n) ==
              doctest::Approx(s.eigenvalues_odd(n + 1) - s.eigenvalues_even(n + 1))
                  .epsilon(1e-12));
    }
    // kernel eigenvectors are the parity cats
    const CVec even_cat = cat_state(sp, Parity::even);
    CHECK(std::norm(even_cat.dot(s.eigenvectors_even.col(0))) ==
          doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("tpe spectrum is the square root of the kerr spectrum") {
    const double alpha2 = 8.0;
    const OscillatorSpace sp = make_space(Complex(std::sqrt(alpha2), 0.0));
    const ConfinedSpectrum kerr = kerr_spectrum(sp, 4);
    const ConfinedSpectrum tpe = tpe_spectrum(sp, 4);
    for (int n = 1; n <= 4; ++n) {
        CHECK(tpe.eigenvalues_even(n) ==
              doctest::Approx(std::sqrt(kerr.eigenvalues_even(n))).epsilon(1e-6));
        CHECK(tpe.eigenvalues_odd(n) ==
              doctest::Approx(std::sqrt(kerr.eigenvalues_odd(n))).epsilon(1e-6));
    }
    // gap ~ 2|alpha| and the zero mode is cat ⊗ ground buffer
    CHECK(tpe.eigenvalues_even(1) == doctest::Approx(2.0 * std::sqrt(alpha2)).epsilon(0.15));
    CVec eg(2);
    eg << 1.0, 0.0;
    const CVec zero = kron_vec(cat_state(sp, Parity::odd), eg);
    CHECK(std::norm(zero.dot(tpe.eigenvectors_odd.col(0))) ==
          doctest::Approx(1.0).epsilon(1e-10));
    // TPE overlaps are half the Kerr ones
    for (int n = 0; n < 4; ++n) {
        CHECK(tpe.overlaps(n) == doctest::Approx(0.5 * kerr.overlaps(n)).epsilon(1e-6));
    }
}

TEST_CASE("tpe hamiltonian is hermitian with a symmetric spectrum") {
    const OscillatorSpace sp = make_space(Complex(std::sqrt(4.0), 0.0));
    const CMat h = CMat(tpe_hamiltonian(sp, 2));
    CHECK((h - h.adjoint()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    const Eigen::VectorXd ev = es.eigenvalues();
    // E and -E pair up: the sorted spectrum is antisymmetric
    const int d = static_cast<int>(ev.size());
    for (int i = 0; i < d / 2; ++i) {
        CHECK(ev(i) == doctest::Approx(-ev(d - 1 - i)).epsilon(1e-8));
    }
    CHECK_THROWS_AS((void)tpe_hamiltonian(sp, 1), InvalidSpaceError);
}

TEST_CASE("leakage overlaps nearly exhaust the first displaced fock state") {
    const OscillatorSpace sp = make_space(Complex(std::sqrt(6.0), 0.0));
    const ConfinedSpectrum s = kerr_spectrum(sp, 8);
    double total = 0.0;
    for (int n = 0; n < s.overlaps.size(); ++n) {
        CHECK(s.overlaps(n) >= 0.0);
        total += s.overlaps(n);
    }
    // each lambda_n averages the two parity branches, so the excited pairs
    // jointly carry half of the unit-norm displaced state
    CHECK(total <= 0.5 + 1e-9);
    CHECK(total > 0.45);  // first pairs dominate the deformed-cat decomposition
}

TEST_CASE("fix_phases makes the dominant amplitude real positive") {
    CMat v(3, 2);
    v << Complex(0.1, 0.0), Complex(0.0, 0.8), Complex(0.0, -0.9), Complex(0.3, 0.1),
        Complex(0.2, 0.2), Complex(0.1, 0.0);
    fix_phases(v);
    for (int c = 0; c < 2; ++c) {
        int imax = 0;
        v.col(c).cwiseAbs().maxCoeff(&imax);
        CHECK(std::abs(std::imag(v(imax, c))) < 1e-14);
        CHECK(std::real(v(imax, c)) > 0.0);
    }
}

TEST_CASE("spectrum requests beyond the parity block are rejected") {
    const OscillatorSpace sp{10, Complex(1.0, 0.0)};
    CHECK_THROWS_AS((void)kerr_spectrum(sp, 9), InvalidSpaceError);
}
