#include "catsim/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace catsim {

void CircuitParams::check() const {
    if (E_J < 0) throw std::invalid_argument("E_J must be nonnegative");
    if (phi_a <= 0 || phi_h <= 0 || phi_l <= 0) {
        throw std::invalid_argument("participation ratios must be positive");
    }
    if (std::abs(eps1) >= 1.0 || std::abs(eps2) >= 1.0) {
        throw std::invalid_argument("pump amplitudes must satisfy |eps| << 1");
    }
    if (kappa_a < 0 || kappa_bh < 0 || kappa_bl < 0) {
        throw std::invalid_argument("decay rates must be nonnegative");
    }
}

double CircuitParams::pump1() const {
    const double wa = omega_a_shifted > 0 ? omega_a_shifted : omega_a;
    const double wh = omega_h_shifted > 0 ? omega_h_shifted : omega_h;
    return 2.0 * wa - wh;
}

double CircuitParams::pump2() const {
    const double wa = omega_a_shifted > 0 ? omega_a_shifted : omega_a;
    const double wl = omega_l_shifted > 0 ? omega_l_shifted : omega_l;
    return 2.0 * wa - wl;
}

namespace {

// s_k = Σ_x i E_J ε_k φ_x² / (i(ω_x - ω_p,k) + κ_x/2)
std::complex<double> displacement_sum(const CircuitParams& p, double eps_k, double omega_p) {
    const double omegas[3] = {p.omega_a, p.omega_h, p.omega_l};
    const double phis[3] = {p.phi_a, p.phi_h, p.phi_l};
    const double kappas[3] = {p.kappa_a, p.kappa_bh, p.kappa_bl};
    std::complex<double> s = 0.0;
    for (int x = 0; x < 3; ++x) {
        const double detuning = omegas[x] - omega_p;
        if (std::abs(detuning) < 10.0 * kappas[x]) {
            throw NearResonanceError("pump within 10 linewidths of a mode frequency");
        }
        const std::complex<double> denom(0.5 * kappas[x], detuning);
        s += std::complex<double>(0.0, p.E_J * eps_k * phis[x] * phis[x]) / denom;
    }
    return s;
}

}  // namespace

EffectiveCouplings coupling_strengths(const CircuitParams& p, double alpha2) {
    p.check();
    EffectiveCouplings c;
    c.s1 = displacement_sum(p, p.eps1, p.pump1());
    c.s2 = displacement_sum(p, p.eps2, p.pump2());
    c.g2h = p.E_J * p.phi_a * p.phi_a * p.phi_h * (p.eps1 / 2.0 - p.eta * c.s1);
    c.g2l = p.E_J * p.phi_a * p.phi_a * p.phi_l * (p.eps2 / 2.0 - p.eta * c.s2);
    c.chi_aa = p.eta * p.E_J * std::pow(p.phi_a, 4) / 2.0;
    c.chi_hh = p.eta * p.E_J * std::pow(p.phi_h, 4) / 2.0;
    c.chi_ll = p.eta * p.E_J * std::pow(p.phi_l, 4) / 2.0;
    c.chi_ah = p.eta * p.E_J * p.phi_a * p.phi_a * p.phi_h * p.phi_h;
    c.chi_al = p.eta * p.E_J * p.phi_a * p.phi_a * p.phi_l * p.phi_l;
    c.chi_lh = p.eta * p.E_J * p.phi_l * p.phi_l * p.phi_h * p.phi_h;
    c.zeta_h = -alpha2 * c.g2h;
    c.zeta_l = -alpha2 * c.g2l;
    c.kappa2_eff = effective_two_photon_rate(std::abs(c.g2l), p.kappa_bl);
    return c;
}

double effective_two_photon_rate(double g2l, double kappa_bl, bool* validity_warning) {
    if (kappa_bl <= 0) throw std::invalid_argument("kappa_bl must be positive");
    if (validity_warning) *validity_warning = (g2l / kappa_bl > 0.3);
    return 4.0 * g2l * g2l / kappa_bl;
}

HierarchyReport hierarchy_check(const EffectiveCouplings& c, double target_ratio,
                                double min_margin) {
    HierarchyReport r;
    const double g2_min = std::min(std::abs(c.g2h), std::abs(c.g2l));
    const double g2_max = std::max(std::abs(c.g2h), std::abs(c.g2l));
    const double chi_small = std::max({c.chi_ah, c.chi_aa, c.chi_al});

    r.margin_small_vs_g2 = (chi_small > 0) ? g2_min / chi_small
                                           : std::numeric_limits<double>::infinity();
    r.margin_g2_vs_chihh = (g2_max > 0) ? c.chi_hh / g2_max : 0.0;
    r.pass_small_vs_g2 = r.margin_small_vs_g2 >= min_margin;
    r.pass_g2_vs_chihh = r.margin_g2_vs_chihh >= min_margin;
    r.achieved_ratio = (c.kappa2_eff > 0) ? std::abs(c.g2h) / c.kappa2_eff : 0.0;

    if (!r.pass_g2_vs_chihh) {
        r.recommendations.push_back(
            "increase junction asymmetry eta or participation phi_h to raise chi_hh");
    }
    if (!r.pass_small_vs_g2) {
        r.recommendations.push_back(
            "reduce eta or spurious participations (phi_a, phi_l) to suppress cross-Kerr terms");
    }
    if (target_ratio > 0 && r.achieved_ratio > 0) {
        const double rel = r.achieved_ratio / target_ratio;
        if (rel < 0.5 || rel > 2.0) {
            r.recommendations.push_back(
                "retune pump amplitudes eps1/eps2 to reach the requested g2/kappa2 ratio");
        }
    }
    return r;
}

}  // namespace catsim
