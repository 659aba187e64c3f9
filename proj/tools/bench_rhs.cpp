// Times the Lindblad right-hand side with the serial and the OpenMP kernel on
// a representative idle generator and reports the speedup.
#include <chrono>
#include <cstdio>

#include "catsim/lindblad.hpp"

using namespace catsim;

namespace {

double time_rhs(const Liouvillian& gen, const CMat& rho, Kernel kernel, int reps) {
    CMat drho(rho.rows(), rho.cols());
    apply_rhs(gen, 0.0, rho, drho, kernel);  // warm-up
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) apply_rhs(gen, 0.0, rho, drho, kernel);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return dt / reps;
}

}  // namespace

int main(int argc, char** argv) {
    const double alpha2 = argc > 1 ? std::atof(argv[1]) : 8.0;
    const int reps = argc > 2 ? std::atoi(argv[2]) : 50;

    const OscillatorSpace space = make_space(Complex(std::sqrt(alpha2), 0.0));
    ConfinementConfig conf;
    conf.kappa2 = 1.0;
    conf.g2 = 10.0;
    NoiseConfig noise;
    noise.kappa1 = 1e-3;
    noise.n_th = 1e-2;
    noise.kappa_phi = 1e-5;

    const Liouvillian gen = build_generator(space, conf, noise);
    const CVec psi = kron_vec(coherent_state(space, space.alpha), CVec::Unit(2, 0));
    const CMat rho = psi * psi.adjoint();

    std::printf("alpha2 = %g, composite dim = %d, reps = %d\n", alpha2, gen.dim, reps);
    const double t_serial = time_rhs(gen, rho, Kernel::serial, reps);
    std::printf("serial  kernel: %10.3f us/rhs\n", 1e6 * t_serial);
#ifdef _OPENMP
    const double t_omp = time_rhs(gen, rho, Kernel::openmp, reps);
    std::printf("openmp  kernel: %10.3f us/rhs  (speedup %.2fx)\n", 1e6 * t_omp,
                t_serial / t_omp);
#else
    std::printf("openmp  kernel: not built (compiler lacks OpenMP)\n");
#endif
    return 0;
}
