#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "catsim/fock.hpp"

using namespace catsim;

namespace {

double poisson_amp(double alpha2, int n) {
    return std::exp(-alpha2 / 2.0 + 0.5 * n * std::log(alpha2) - 0.5 * ln_factorial(n));
}

}  // namespace

TEST_CASE("ladder operators satisfy the canonical commutator below the edge") {
    const OscillatorSpace sp{12, Complex(1.0, 0.0)};
    const CMat a = CMat(annihilation(sp));
    const CMat comm = a * a.adjoint() - a.adjoint() * a;
    for (int n = 0; n < sp.dim - 1; ++n) {
        CHECK(std::abs(comm(n, n) - 1.0) < 1e-14);
    }
    // the truncated corner absorbs -(dim-1)
    CHECK(std::abs(comm(sp.dim - 1, sp.dim - 1) + Complex(sp.dim - 1, 0.0)) < 1e-12);
    CHECK(CMat(number_operator(sp)).isApprox(a.adjoint() * a, 1e-14));
}

TEST_CASE("coherent state has Poisson amplitudes and is an approximate a-eigenstate") {
    const OscillatorSpace sp = make_space(Complex(1.5, 0.0));
    const CVec c = coherent_state(sp, sp.alpha);
    CHECK(std::abs(c.norm() - 1.0) < 1e-12);
    for (int n = 0; n < 8; ++n) {
        CHECK(std::abs(c(n)) == doctest::Approx(poisson_amp(sp.alpha2(), n)).epsilon(1e-10));
    }
    const CVec residual = CMat(annihilation(sp)) * c - sp.alpha * c;
    CHECK(residual.norm() < 1e-5);  // truncation tail only
}

TEST_CASE("fock states are an orthonormal ladder") {
    const OscillatorSpace sp{8, Complex(0.0, 0.0)};
    for (int n = 0; n < 4; ++n) {
        const CVec fn = fock_state(sp, n);
        CHECK(std::abs(fn.norm() - 1.0) < 1e-15);
        for (int m = 0; m < n; ++m) {
            CHECK(std::abs(fock_state(sp, m).dot(fn)) < 1e-15);
        }
        if (n > 0) {
            const CVec up = CMat(creation(sp)) * fock_state(sp, n - 1);
            CHECK((up / std::sqrt(double(n)) - fn).norm() < 1e-14);
        }
    }
    CHECK_THROWS_AS((void)fock_state(sp, 8), InvalidSpaceError);
}

TEST_CASE("cat states carry a single photon-number parity") {
    const OscillatorSpace sp = make_space(Complex(std::sqrt(2.0), 0.0));
    const CVec even = cat_state(sp, Parity::even);
    const CVec odd = cat_state(sp, Parity::odd);
    CHECK(std::abs(even.norm() - 1.0) < 1e-12);
    CHECK(std::abs(odd.norm() - 1.0) < 1e-12);
    for (int n = 0; n < sp.dim; ++n) {
        if (n % 2 == 1) CHECK(std::abs(even(n)) == 0.0);
        if (n % 2 == 0) CHECK(std::abs(odd(n)) == 0.0);
    }
    // parity expectation via the observable route
    const SpMat jx = jx_observable(sp);
    CHECK(std::real(even.dot(CMat(jx) * even)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::real(odd.dot(CMat(jx) * odd)) == doctest::Approx(-1.0).epsilon(1e-12));
    // cats recombine into the coherent pair
    const double np = std::sqrt(2.0 * (1.0 + std::exp(-2.0 * sp.alpha2())));
    const double nm = std::sqrt(2.0 * (1.0 - std::exp(-2.0 * sp.alpha2())));
    const CVec plus = (even * np + odd * nm) / 2.0;
    CHECK((plus - coherent_state(sp, sp.alpha)).norm() < 1e-10);
}

TEST_CASE("displacement operator is unitary and generates coherent states") {
    const OscillatorSpace sp = make_space(Complex(1.2, 0.4));
    const Complex beta(0.7, -0.3);
    const CMat d = displacement_operator(sp, beta);
    CHECK((d * d.adjoint() - CMat::Identity(sp.dim, sp.dim)).norm() < 1e-9);
    const CVec from_d = d * fock_state(sp, 0);
    CHECK((from_d - coherent_state(sp, beta)).norm() < 1e-9);

    const CVec d0 = displaced_fock_state(sp, beta, 0);
    const CVec d1 = displaced_fock_state(sp, beta, 1);
    CHECK(std::abs(d0.dot(d1)) < 1e-9);
    CHECK(std::abs(d1.norm() - 1.0) < 1e-12);
}

TEST_CASE("jz observable separates the two coherent pointer states") {
    for (double alpha2 : {2.0, 4.0}) {
        const OscillatorSpace sp = make_space(Complex(std::sqrt(alpha2), 0.0));
        const CMat jz = jz_observable(sp);
        CHECK((jz - jz.adjoint()).norm() < 1e-10);
        const CVec p = coherent_state(sp, sp.alpha);
        const CVec m = coherent_state(sp, -sp.alpha);
        const double up = std::real(p.dot(jz * p));
        const double dn = std::real(m.dot(jz * m));
        CHECK(up == doctest::Approx(1.0).epsilon(2e-2));
        CHECK(dn == doctest::Approx(-1.0).epsilon(2e-2));
        // J_z swaps photon-number parity, so it anticommutes with J_x
        const CMat jx = CMat(jx_observable(sp));
        CHECK((jx * jz + jz * jx).norm() < 1e-10);
    }
}

TEST_CASE("kron and embeddings agree with dense Kronecker products") {
    const OscillatorSpace s3{3, Complex(0.0, 0.0)};
    const OscillatorSpace s2{2, Complex(0.0, 0.0)};
    const SpMat a = annihilation(s3);
    const SpMat b = creation(s2);
    const CMat ka = CMat(kron(a, b));
    CHECK(ka.rows() == 6);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    CHECK(std::abs(ka(i * 2 + k, j * 2 + l) -
                                   CMat(a)(i, j) * CMat(b)(k, l)) < 1e-15);
                }
            }
        }
    }
    const std::vector<int> dims{3, 2};
    CHECK((CMat(tensor_embed({a, b}, dims)) - ka).norm() < 1e-15);
    CHECK((CMat(tensor_embed({a, SpMat()}, dims)) - CMat(kron(a, identity_op(2)))).norm() <
          1e-15);
    CHECK((CMat(embed_at(b, 1, dims)) - CMat(kron(identity_op(3), b))).norm() < 1e-15);

    CVec u(3);
    u << Complex(0.8, 0.1), Complex(0.5, -0.2), Complex(0.1, 0.3);
    CVec g(2);
    g << 1.0, 0.0;
    const CVec kv = kron_vec(u, g);
    CHECK(kv.size() == 6);
    CHECK(std::abs(kv(0) - u(0)) < 1e-15);
    CHECK(std::abs(kv(1)) < 1e-15);
    CHECK(std::abs(kv(2) - u(1)) < 1e-15);
}

TEST_CASE("truncation rule keeps the coherent tail below the invariant") {
    const Complex alpha(2.0, 0.0);  // |alpha|^2 = 4
    CHECK(default_dim(alpha) == 32);  // ceil(4 + 16 + 12)
    const OscillatorSpace sp = make_space(alpha);
    CHECK(sp.dim == 32);
    CHECK(coherent_tail_mass(sp.dim, alpha) < 1e-10);
    CHECK(coherent_tail_mass(sp.dim, -alpha) < 1e-10);
    // overrides are honored but a too-small space is rejected
    CHECK(make_space(alpha, 26).dim == 26);
    CHECK_THROWS_AS((void)make_space(alpha, 8), TruncationError);
    // tail mass grows monotonically as the space shrinks
    CHECK(coherent_tail_mass(20, alpha) > coherent_tail_mass(30, alpha));
}

TEST_CASE("log factorials match lgamma and the double-factorial recursion") {
    for (int n : {0, 1, 2, 5, 20, 100}) {
        CHECK(ln_factorial(n) == doctest::Approx(std::lgamma(n + 1.0)).epsilon(1e-13));
    }
    CHECK(ln_double_factorial(-1) == 0.0);  // (-1)!! = 1
    CHECK(ln_double_factorial(0) == 0.0);
    CHECK(ln_double_factorial(5) == doctest::Approx(std::log(15.0)).epsilon(1e-13));
    CHECK(ln_double_factorial(6) == doctest::Approx(std::log(48.0)).epsilon(1e-13));
}
