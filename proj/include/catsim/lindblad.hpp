#ifndef CATSIM_LINDBLAD_HPP
#define CATSIM_LINDBLAD_HPP

#include <cstdint>
#include <functional>

#include "catsim/fock.hpp"
#include "catsim/spectra.hpp"

namespace catsim {

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double t) : std::runtime_error(what), time(t) {}
    double time;
};

// Noise rates in units of kappa2 (or whichever rate the caller fixes to 1).
struct NoiseConfig {
    double kappa1 = 0.0;
    double n_th = 0.0;
    double kappa_phi = 0.0;

    double kappa_minus() const { return kappa1 * (1.0 + n_th); }
    double kappa_plus() const { return kappa1 * n_th; }
    double kappa_l(double alpha2) const { return kappa1 * n_th + alpha2 * kappa_phi; }
    void check() const;
};

struct ConfinementConfig {
    double kappa2 = 0.0;
    double kerr = 0.0;  // K
    double g2 = 0.0;

    double kappa_conf(double alpha2) const { return 4.0 * alpha2 * kappa2; }
    bool any() const { return kappa2 > 0 || kerr > 0 || g2 > 0; }
    void check() const;
};

enum class Kernel { serial, openmp };

// out = s * d, optionally column-parallel.
void spmm(const SpMat& s, const CMat& d, CMat& out, Kernel kernel);

// Lindblad generator dρ/dt = -i[H,ρ] + Σ D[L]ρ with optional time-dependent
// pieces: drives contribute amp(t)·op + h.c. to H, time-dependent jumps have
// the form L(t) = A + c(t)·B.
struct Liouvillian {
    std::vector<int> dims;
    int dim = 0;
    SpMat G;  // -iH - 1/2 Σ L†L over all static parts

    std::vector<SpMat> jumps;
    std::vector<SpMat> jump_adjoints;  // cached L† matching jumps

    struct TimeDepJump {
        SpMat A, B;
        std::function<Complex(double)> c;
        SpMat AdA, AdB, BdA, BdB;  // products cached at registration
    };
    std::vector<TimeDepJump> td_jumps;

    struct Drive {
        SpMat op;
        std::function<Complex(double)> amp;
    };
    std::vector<Drive> drives;

    void add_hamiltonian(const SpMat& h);
    void add_jump(const SpMat& l);  // rate absorbed into l
    void add_drive(const SpMat& op, std::function<Complex(double)> amp);
    void add_td_jump(const SpMat& a, const SpMat& b, std::function<Complex(double)> c);
    bool time_dependent() const { return !td_jumps.empty() || !drives.empty(); }
};

Liouvillian make_liouvillian(const std::vector<int>& dims);

// Time-independent single-mode (or mode ⊗ buffer for TPE) idle generator:
// H = -K·H_Kerr + g2·H_TPE, dissipators sqrt(kappa2)(a²-α²), sqrt(κ-)a,
// sqrt(κ+)a†, sqrt(kappa_phi) a†a.
Liouvillian build_generator(const OscillatorSpace& space, const ConfinementConfig& confinement,
                            const NoiseConfig& noise);

// tr(O ρ) over the sparse pattern of O.
Complex expectation(const SpMat& obs, const CMat& rho);

// dρ/dt at time t; requires rho Hermitian.
void apply_rhs(const Liouvillian& gen, double t, const CMat& rho, CMat& drho,
               Kernel kernel = Kernel::serial);

struct EvolveOptions {
    double rtol = 1e-8;
    double atol = 1e-9;
    Kernel kernel = Kernel::serial;
    std::int64_t max_steps = 200000000;
    double initial_dt = 0.0;  // 0 = auto
};

struct EvolveRecord {
    Eigen::VectorXd times;
    CMat expectations;  // times × observables, tr(O ρ)
    CMat final_state;
    double max_trace_error = 0.0;
    double positivity_floor = 0.0;  // min eigenvalue of the final state
    std::int64_t n_steps = 0;
};

// Dormand–Prince RK45 with adaptive steps hitting every requested time exactly.
EvolveRecord evolve_observables(const Liouvillian& gen, const CMat& rho0,
                                const std::vector<double>& times, const std::vector<SpMat>& obs,
                                const EvolveOptions& opts = {});

struct Trajectory {
    Eigen::VectorXd times;
    Eigen::VectorXd px;
    Eigen::VectorXd pz;
    double trace_error = 0.0;
    double positivity_floor = 0.0;
};

// Evolve under `gen` recording p_X = (1 - <J_z>)/2 and p_Z = (1 - <J_x>)/2,
// with the observables embedded in slot 0 of gen.dims.
Trajectory record_error_probabilities(const Liouvillian& gen, const OscillatorSpace& space,
                                      const CMat& rho0, const std::vector<double>& times,
                                      const EvolveOptions& opts = {});

// Idle run from |0_L> ≈ |alpha> (buffer in |g> for TPE) over [0, T_idle].
Trajectory idle_error_probabilities(const OscillatorSpace& space,
                                    const ConfinementConfig& confinement, const NoiseConfig& noise,
                                    double T_idle, int n_out = 121, const EvolveOptions& opts = {});

std::vector<double> linspace(double a, double b, int n);

// Monte Carlo wave function unfolding of the same generator. Observables are
// averaged over `n_traj` trajectories with per-trajectory seeds derived from
// `seed`; the relative standard error of each mean is reported.
struct McwfRecord {
    Eigen::VectorXd times;
    CMat expectations;
    CMat std_errors;
    int n_traj = 0;
};

McwfRecord evolve_mcwf(const Liouvillian& gen, const CVec& psi0, const std::vector<double>& times,
                       const std::vector<SpMat>& obs, int n_traj, std::uint64_t seed,
                       const EvolveOptions& opts = {});

}  // namespace catsim

#endif
