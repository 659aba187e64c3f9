#ifndef CATSIM_CIRCUIT_HPP
#define CATSIM_CIRCUIT_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace catsim {

class NearResonanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ATS implementation parameters; energies and rates in the same frequency unit.
struct CircuitParams {
    double E_J = 0.0;
    double eta = 0.0;  // junction asymmetry
    double phi_a = 0.0, phi_h = 0.0, phi_l = 0.0;
    double eps1 = 0.0, eps2 = 0.0;  // RF pump amplitudes
    double omega_a = 0.0, omega_h = 0.0, omega_l = 0.0;
    double kappa_a = 0.0, kappa_bh = 0.0, kappa_bl = 0.0;
    // Optional AC-Stark-shifted frequencies used for pump placement; zero
    // falls back to the bare frequencies.
    double omega_a_shifted = 0.0, omega_h_shifted = 0.0, omega_l_shifted = 0.0;

    void check() const;
    double pump1() const;  // omega_p,1 = 2 w~_a - w~_h
    double pump2() const;  // omega_p,2 = 2 w~_a - w~_l
};

struct EffectiveCouplings {
    std::complex<double> g2h, g2l;
    double chi_aa = 0.0, chi_hh = 0.0, chi_ll = 0.0;
    double chi_ah = 0.0, chi_al = 0.0, chi_lh = 0.0;
    std::complex<double> s1, s2;  // pump-induced displacement sums
    std::complex<double> zeta_h, zeta_l;
    double kappa2_eff = 0.0;
};

// Appendix-F couplings: g_{2,x} = E_J φ_a² φ_x (ε_k/2 - η s_k),
// χ_xx = η E_J φ_x⁴/2, χ_xy = η E_J φ_x² φ_y². zeta_x = -alpha2 g_{2,x}.
EffectiveCouplings coupling_strengths(const CircuitParams& params, double alpha2 = 0.0);

// kappa2 = 4 g2l² / kappa_bl; warns (returns flag) above g2l/kappa_bl = 0.3.
double effective_two_photon_rate(double g2l, double kappa_bl, bool* validity_warning = nullptr);

struct HierarchyReport {
    double margin_small_vs_g2 = 0.0;  // min(g2) / max(chi_ah, chi_aa, chi_al)
    double margin_g2_vs_chihh = 0.0;  // chi_hh / max(g2)
    bool pass_small_vs_g2 = false;
    bool pass_g2_vs_chihh = false;
    double achieved_ratio = 0.0;  // g2h / kappa2_eff
    std::vector<std::string> recommendations;
};

// §VI inequality chain chi_ah, chi_aa, chi_al << g2h, g2l << chi_hh with
// margin factors; a chain passes when its margin is >= min_margin.
HierarchyReport hierarchy_check(const EffectiveCouplings& couplings, double target_ratio,
                                double min_margin = 10.0);

}  // namespace catsim

#endif
