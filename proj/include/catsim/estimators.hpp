#ifndef CATSIM_ESTIMATORS_HPP
#define CATSIM_ESTIMATORS_HPP

#include <map>

#include "catsim/lindblad.hpp"
#include "catsim/spectra.hpp"

namespace catsim {

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// sin(x)/x, series-evaluated below |x| < 1e-4.
double sinc(double x);

// Short-time bit-flip probability kappa_l * t * Σ_{n>0} lambda_n [1 - sinc(delta_n t)].
// Spectrum spacings are in units of the Hamiltonian rate; `ham_rate` converts
// them to the units of t. Terms with lambda_n < 1e-12 are dropped.
double kerr_bitflip_probability(double t, double kappa_l, const ConfinedSpectrum& spectrum,
                                double ham_rate = 1.0);

// Combined-scheme rate: kappa_l e^{-2 alpha2} + kappa_l Σ lambda_n [1 - sinc(delta_n/kappa_conf)].
double combined_kerr_rate(double kappa_l, double alpha2, double kappa_conf,
                          const ConfinedSpectrum& spectrum, double ham_rate = 1.0);

// Same with the symmetric TPE spectrum: Σ_{n≠0} Lambda_n terms, i.e. both
// branches of each pair.
double combined_tpe_rate(double kappa_l, double alpha2, double kappa_conf,
                         const ConfinedSpectrum& spectrum, double ham_rate = 1.0);

struct RateFit {
    double rate = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double t_min = 0.0;
    int n_points = 0;
};

// Least squares of ln(1 - 2 p_X) vs t on the window t >= t_min.
RateFit fit_exponential_window(const Trajectory& traj, double t_min, double min_r2 = 0.0);

// Window t * kappa_conf >= 5 per the single-exponential-regime protocol.
RateFit fit_exponential_rate(const Trajectory& traj, double kappa_conf, double min_r2 = 0.0);

struct GammaFit {
    double gamma = 0.0;
    double c0 = 0.0;
    double residual = 0.0;  // RMS of ln-rate residuals
    double alpha2_min = 0.0;
    double alpha2_max = 0.0;
};

// Least squares of ln Gamma = -gamma |alpha|^2 + c0 over the given grid.
// Requires at least 3 points (desk-scale grids use {2,4,6}).
GammaFit fit_gamma(const std::map<double, double>& rates);

}  // namespace catsim

#endif
