#ifndef CATSIM_GATES_HPP
#define CATSIM_GATES_HPP

#include "catsim/estimators.hpp"
#include "catsim/lindblad.hpp"

namespace catsim {

enum class GateScheme { dissipative, combined_kerr, combined_tpe };

enum class DriveShape { constant, superadiabatic };

struct ZGateConfig {
    double theta = 3.14159265358979323846;
    double T_gate = 1.0;
    DriveShape drive_shape = DriveShape::constant;
    ConfinementConfig confinement;
    NoiseConfig noise;
};

// High-Q buffer imperfections for the TPE scheme (two-level buffer unless
// levels > 2, in which case it is an anharmonic oscillator -chi_hh b†²b²).
struct BufferConfig {
    int levels = 2;
    double chi_hh = 0.0;
    double kappa_bh = 0.0;
    double n_th_h = 0.0;
    double kappa_phi_h = 0.0;
};

struct GateErrorReport {
    double p_z = 0.0;       // Z gate: single phase-flip probability
    double p_zc = 0.0;      // CNOT breakdown
    double p_zt = 0.0;
    double p_zczt = 0.0;
    double p_x = 0.0;       // total bit-flip probability (when requested)
    double trace_error = 0.0;
    double positivity_floor = 0.0;
};

// Z(θ) with readout p_Z = (1 + <J_x>)/2 at T (ideal Z(π) maps |C+> to |C->;
// meaningful when the accumulated rotation is π).
GateErrorReport zgate_simulate(const OscillatorSpace& space, const ZGateConfig& config,
                               const EvolveOptions& opts = {});

// Same with an imperfect TPE buffer (requires confinement.g2 > 0).
GateErrorReport zgate_simulate_buffer(const OscillatorSpace& space, const ZGateConfig& config,
                                      const BufferConfig& buffer, const EvolveOptions& opts = {});

// Bit-flip probability p_X(T_gate) from |0_L> during the driven gate.
double zgate_bitflip(const OscillatorSpace& space, const ZGateConfig& config,
                     const EvolveOptions& opts = {});
double zgate_bitflip_buffer(const OscillatorSpace& space, const ZGateConfig& config,
                            const BufferConfig& buffer, const EvolveOptions& opts = {});

// Eq. 9 (Kerr/dissipative: ham_rate = K) and Eq. 10 (TPE: ham_rate = g2).
double zgate_na_model(GateScheme scheme, double alpha2, double theta, double T, double kappa2,
                      double ham_rate);

// Eq. 8: kappa1 |alpha|^2 T + p_Z^NA.
double zgate_total_model(GateScheme scheme, double alpha2, double theta, double T, double kappa2,
                         double ham_rate, double kappa1);

struct Optimum {
    double T_star = 0.0;
    double p_star = 0.0;
};

// Golden-section minimum of p(T) over [T_lo, T_hi] (log-spaced search).
Optimum minimize_over_T(const std::function<double(double)>& p_of_T, double T_lo, double T_hi);

// Superadiabatic amplitude eps_Z(t) = A [Ω_G(t) + Ω̈_G(t)/E1²] with Ω_G a
// squared offset Gaussian of width T/6 vanishing with its derivative at 0, T;
// A normalizes ∫ 4 Re(alpha) eps_Z dt = theta.
struct SuperadiabaticDrive {
    double amplitude = 0.0;  // A
    double T = 0.0;
    double E1 = 0.0;  // confinement gap
    double operator()(double t) const;
    double gaussian(double t) const;  // Ω_G alone
};
SuperadiabaticDrive superadiabatic_drive(double theta, double T, double re_alpha, double E1);

// Appendix-D reduced model: qubit ⊗ gauge mode with omega_K = 4 alpha2 K,
// kappa_c = 4 alpha2 kappa2 and drive eps_Z σ_z(a + a†). Returns the
// integrated reduced-model p_Z and the quasi-static estimate
// ∫ kappa_c eps_Z² / (omega_K² + kappa_c²/4) dt.
struct SfbResult {
    double p_z = 0.0;
    double p_z_quasistatic = 0.0;
};
SfbResult sfb_zgate_reduced(double alpha2, double kerr, double kappa2, double theta, double T,
                            int gauge_dim = 20, const EvolveOptions& opts = {});

struct CnotConfig {
    GateScheme scheme = GateScheme::dissipative;
    double T_gate = 1.0;
    ConfinementConfig confinement;  // kappa2 always; kerr or g2 per scheme
    NoiseConfig noise;              // applied to both qubits
};

// Feedforward Hamiltonian Eq. 13 on control ⊗ (buffer) ⊗ target, control in
// slot 0 and target in the last slot of dims.
SpMat cnot_feedforward(const OscillatorSpace& space, const std::vector<int>& dims, double eps_cx);

// Phase errors from |C+>|C+> via joint parities; p_x additionally from
// |0_L>|0_L> via J_z observables when with_bitflip is set.
GateErrorReport cnot_simulate(const OscillatorSpace& space, const CnotConfig& config,
                              bool with_bitflip = false, const EvolveOptions& opts = {});

// Eqs. 16-18 (ham_rate = K or g2 per scheme).
double cnot_na_model(GateScheme scheme, double alpha2, double T, double kappa2, double ham_rate);

// §V loss model: p_Zc = kappa1 alpha2 T + p_Z^NA, p_Zt = p_ZcZt = kappa1 alpha2 T / 2.
struct CnotBreakdown {
    double p_zc = 0.0;
    double p_zt = 0.0;
    double p_zczt = 0.0;
};
CnotBreakdown cnot_loss_model(GateScheme scheme, double alpha2, double T, double kappa2,
                              double ham_rate, double kappa1);

}  // namespace catsim

#endif
