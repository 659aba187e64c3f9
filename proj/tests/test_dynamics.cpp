#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "catsim/lindblad.hpp"

using namespace catsim;

namespace {

CMat random_hermitian_density(int dim, unsigned seed) {
    std::srand(seed);
    CMat m = CMat::Random(dim, dim);
    CMat rho = m * m.adjoint();
    rho /= rho.trace().real();
    return rho;
}

}  // namespace

TEST_CASE("amplitude damping reproduces the closed-form coherent decay") {
    const OscillatorSpace sp{20, Complex(0.0, 0.0)};
    const double kappa = 0.37;
    Liouvillian gen = make_liouvillian({sp.dim});
    gen.add_jump(SpMat(std::sqrt(kappa) * annihilation(sp)));

    const Complex beta(1.1, -0.4);
    const CVec c = coherent_state(sp, beta);
    const CMat rho0 = c * c.adjoint();
    const std::vector<double> times = linspace(0.0, 4.0, 9);
    const EvolveRecord rec =
        evolve_observables(gen, rho0, times, {annihilation(sp), number_operator(sp)});

    for (int i = 0; i < rec.times.size(); ++i) {
        const double t = rec.times(i);
        const Complex a_exact = beta * std::exp(-kappa * t / 2.0);
        const double n_exact = std::norm(beta) * std::exp(-kappa * t);
        CHECK(std::abs(rec.expectations(i, 0) - a_exact) < 1e-7);
        CHECK(std::abs(rec.expectations(i, 1).real() - n_exact) < 1e-7);
    }
    CHECK(rec.max_trace_error < 1e-9);
    CHECK(rec.positivity_floor > -1e-9);
}

TEST_CASE("thermal bath drives the mode to mean occupation n_th") {
    const OscillatorSpace sp{16, Complex(0.0, 0.0)};
    NoiseConfig noise;
    noise.kappa1 = 1.0;
    noise.n_th = 0.4;
    Liouvillian gen = make_liouvillian({sp.dim});
    gen.add_jump(SpMat(std::sqrt(noise.kappa_minus()) * annihilation(sp)));
    gen.add_jump(SpMat(std::sqrt(noise.kappa_plus()) * creation(sp)));

    const CVec vac = fock_state(sp, 0);
    const EvolveRecord rec = evolve_observables(gen, vac * vac.adjoint(), {0.0, 30.0},
                                                {number_operator(sp)});
    CHECK(rec.expectations(1, 0).real() == doctest::Approx(noise.n_th).epsilon(1e-6));
}

TEST_CASE("pure dephasing damps coherences at the closed-form rate") {
    const OscillatorSpace sp{18, Complex(0.0, 0.0)};
    const double kphi = 0.21;
    Liouvillian gen = make_liouvillian({sp.dim});
    gen.add_jump(SpMat(std::sqrt(kphi) * number_operator(sp)));
    const CVec c = coherent_state(sp, Complex(1.0, 0.0));
    const EvolveRecord rec =
        evolve_observables(gen, c * c.adjoint(), {0.0, 1.5}, {annihilation(sp)});
    // <n|rho|m> decays as exp(-kphi (n-m)^2 t / 2) => <a> = beta exp(-kphi t/2)
    CHECK(std::abs(rec.expectations(1, 0) - std::exp(-kphi * 1.5 / 2.0)) < 1e-7);
}

TEST_CASE("parity is conserved by the noiseless confined generator") {
    const OscillatorSpace sp = make_space(Complex(std::sqrt(2.0), 0.0));
    ConfinementConfig conf;
    conf.kappa2 = 1.0;
    conf.kerr = 0.5;
    const Liouvillian gen = build_generator(sp, conf, {});
    const CVec even = cat_state(sp, Parity::even);
    Trajectory tr = record_error_probabilities(gen, sp, even * even.adjoint(),
                                               linspace(0.0, 3.0, 7), {});
    for (int i = 0; i < tr.times.size(); ++i) {
        CHECK(std::abs(tr.pz(i)) < 1e-8);  // p_Z = (1 - <J_x>)/2 stays pinned
    }
    CHECK(tr.trace_error < 1e-8);
    CHECK(tr.positivity_floor > -1e-8);
}

TEST_CASE("serial and openmp kernels produce identical right-hand sides") {
    const OscillatorSpace sp = make_space(Complex(std::sqrt(2.0), 0.0));
    ConfinementConfig conf;
    conf.kappa2 = 1.0;
    conf.g2 = 4.0;
    NoiseConfig noise;
    noise.kappa1 = 1e-3;
    noise.n_th = 1e-2;
    noise.kappa_phi = 1e-5;
    const Liouvillian gen = build_generator(sp, conf, noise);
    const CMat rho = random_hermitian_density(gen.dim, 42);
    CMat d_serial(gen.dim, gen.dim), d_omp(gen.dim, gen.dim);
    apply_rhs(gen, 0.0, rho, d_serial, Kernel::serial);
    apply_rhs(gen, 0.0, rho, d_omp, Kernel::openmp);
    CHECK((d_serial - d_omp).norm() < 1e-13 * d_serial.norm());
    // derivative of a density matrix is traceless and Hermitian
    CHECK(std::abs(d_serial.trace()) < 1e-12);
    CHECK((d_serial - d_serial.adjoint()).norm() < 1e-12);
}

TEST_CASE("drives and time-dependent jumps match their static equivalents") {
    const OscillatorSpace sp{12, Complex(1.0, 0.0)};
    const SpMat a = annihilation(sp);
    const Complex amp(0.3, 0.1);
    const CMat rho = random_hermitian_density(sp.dim, 3);
    CMat d1(sp.dim, sp.dim), d2(sp.dim, sp.dim);

    // constant drive == Hamiltonian amp*op + h.c.
    Liouvillian g1 = make_liouvillian({sp.dim});
    g1.add_drive(a, [amp](double) { return amp; });
    Liouvillian g2 = make_liouvillian({sp.dim});
    SpMat h = SpMat(amp * a);
    g2.add_hamiltonian(SpMat(h + SpMat(h.adjoint())));
    apply_rhs(g1, 0.7, rho, d1);
    apply_rhs(g2, 0.7, rho, d2);
    CHECK((d1 - d2).norm() < 1e-13);

    // constant-coefficient td jump == static jump A + cB
    const Complex c(0.5, -0.2);
    Liouvillian g3 = make_liouvillian({sp.dim});
    g3.add_td_jump(a, SpMat(creation(sp)), [c](double) { return c; });
    Liouvillian g4 = make_liouvillian({sp.dim});
    g4.add_jump(SpMat(a + SpMat(c * creation(sp))));
    apply_rhs(g3, 0.2, rho, d1);
    apply_rhs(g4, 0.2, rho, d2);
    CHECK((d1 - d2).norm() < 1e-13);
}

TEST_CASE("idle run starts in the codespace with near-zero error probabilities") {
    const OscillatorSpace sp = make_space(Complex(std::sqrt(4.0), 0.0));
    ConfinementConfig conf;
    conf.kappa2 = 1.0;
    NoiseConfig noise;
    noise.kappa_phi = 1e-5;
    const Trajectory tr = idle_error_probabilities(sp, conf, noise, 1.0, 5);
    CHECK(tr.times.size() == 5);
    CHECK(tr.px(0) < 1e-3);        // J_z readout of |alpha> is ~ +1
    // |alpha> is an equal parity superposition up to <Jx> = e^{-2 alpha2}
    CHECK(std::abs(tr.pz(0) - 0.5) < std::exp(-2.0 * sp.alpha2()));
    CHECK(tr.px(4) >= tr.px(0));   // monotone error accumulation
}

TEST_CASE("monte carlo unfolding agrees with the density-matrix evolution") {
    const OscillatorSpace sp{10, Complex(0.0, 0.0)};
    const double kappa = 0.8;
    Liouvillian gen = make_liouvillian({sp.dim});
    gen.add_jump(SpMat(std::sqrt(kappa) * annihilation(sp)));
    const CVec psi0 = fock_state(sp, 3);
    const std::vector<double> times = linspace(0.0, 2.0, 5);
    const std::vector<SpMat> obs{number_operator(sp)};

    const McwfRecord mc = evolve_mcwf(gen, psi0, times, obs, 400, 12345);
    const EvolveRecord ex = evolve_observables(gen, psi0 * psi0.adjoint(), times, obs);
    for (int i = 1; i < 5; ++i) {
        const double err = std::max(3.0 * mc.std_errors(i, 0).real(), 1e-3);
        CHECK(std::abs(mc.expectations(i, 0).real() - ex.expectations(i, 0).real()) < err);
    }
}

TEST_CASE("seeded monte carlo runs are reproducible") {
    const OscillatorSpace sp{8, Complex(0.0, 0.0)};
    Liouvillian gen = make_liouvillian({sp.dim});
    gen.add_jump(SpMat(std::sqrt(0.5) * annihilation(sp)));
    const CVec psi0 = fock_state(sp, 3);
    const std::vector<double> times{0.0, 1.0, 2.0};
    const std::vector<SpMat> obs{number_operator(sp)};
    const McwfRecord r1 = evolve_mcwf(gen, psi0, times, obs, 25, 99);
    const McwfRecord r2 = evolve_mcwf(gen, psi0, times, obs, 25, 99);
    const McwfRecord r3 = evolve_mcwf(gen, psi0, times, obs, 25, 100);
    CHECK((r1.expectations - r2.expectations).norm() == 0.0);
    CHECK((r1.expectations - r3.expectations).norm() > 0.0);
}

TEST_CASE("integrator surfaces failures instead of silently truncating") {
    const OscillatorSpace sp{6, Complex(0.0, 0.0)};
    Liouvillian gen = make_liouvillian({sp.dim});
    gen.add_jump(SpMat(std::sqrt(2.0) * annihilation(sp)));
    EvolveOptions opts;
    opts.max_steps = 3;
    const CVec c = fock_state(sp, 2);
    CHECK_THROWS_AS(
        (void)evolve_observables(gen, c * c.adjoint(), {0.0, 50.0}, {}, opts),
        IntegrationError);
}
