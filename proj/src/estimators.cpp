#include "catsim/estimators.hpp"

#include <cmath>

namespace catsim {

double sinc(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
    }
    return std::sin(x) / x;
}

namespace {

constexpr double kOverlapCutoff = 1e-12;

// Σ w_n [1 - sinc(spacing_n * scale)], w doubled for the symmetric TPE pairs.
double bracket_sum(const ConfinedSpectrum& spectrum, double scale, double ham_rate) {
    const double branch_weight = (spectrum.scheme == Scheme::tpe) ? 2.0 : 1.0;
    double total = 0.0;
    for (int n = 0; n < spectrum.overlaps.size(); ++n) {
        const double w = branch_weight * spectrum.overlaps(n);
        if (w < kOverlapCutoff) continue;
        total += w * (1.0 - sinc(ham_rate * spectrum.spacings(n) * scale));
    }
    return total;
}

}  // namespace

double kerr_bitflip_probability(double t, double kappa_l, const ConfinedSpectrum& spectrum,
                                double ham_rate) {
    return kappa_l * t * bracket_sum(spectrum, t, ham_rate);
}

double combined_kerr_rate(double kappa_l, double alpha2, double kappa_conf,
                          const ConfinedSpectrum& spectrum, double ham_rate) {
    return kappa_l * std::exp(-2.0 * alpha2) +
           kappa_l * bracket_sum(spectrum, 1.0 / kappa_conf, ham_rate);
}

double combined_tpe_rate(double kappa_l, double alpha2, double kappa_conf,
                         const ConfinedSpectrum& spectrum, double ham_rate) {
    return combined_kerr_rate(kappa_l, alpha2, kappa_conf, spectrum, ham_rate);
}

RateFit fit_exponential_window(const Trajectory& traj, double t_min, double min_r2) {
    // Linear LSQ of y = ln(1 - 2 p_X) against t. Saturation at p_X = 1/2
    // means p_X(t) = (1 - e^{-2 Gamma t})/2, so the flip rate is -slope/2.
    std::vector<double> ts, ys;
    for (int i = 0; i < traj.times.size(); ++i) {
        if (traj.times(i) < t_min) continue;
        const double arg = -2.0 * traj.px(i);
        if (arg <= -1.0) continue;  // p_X >= 1/2, saturated
        ts.push_back(traj.times(i));
        ys.push_back(std::log1p(arg));
    }
    const int n = static_cast<int>(ts.size());
    if (n < 4) throw FitError("exponential fit window too short");

    double st = 0, sy = 0, stt = 0, sty = 0;
    for (int i = 0; i < n; ++i) {
        st += ts[i];
        sy += ys[i];
        stt += ts[i] * ts[i];
        sty += ts[i] * ys[i];
    }
    const double denom = n * stt - st * st;
    const double slope = (n * sty - st * sy) / denom;
    const double icept = (sy - slope * st) / n;

    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (int i = 0; i < n; ++i) {
        const double fit = slope * ts[i] + icept;
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
    }
    RateFit out;
    out.rate = -0.5 * slope;
    out.intercept = icept;
    out.r_squared = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
    out.t_min = t_min;
    out.n_points = n;
    if (min_r2 > 0 && out.r_squared < min_r2) {
        throw FitError("non-exponential residual: R^2 = " + std::to_string(out.r_squared));
    }
    return out;
}

RateFit fit_exponential_rate(const Trajectory& traj, double kappa_conf, double min_r2) {
    if (kappa_conf <= 0) throw FitError("kappa_conf must be positive; use fit_exponential_window");
    return fit_exponential_window(traj, 5.0 / kappa_conf, min_r2);
}

GammaFit fit_gamma(const std::map<double, double>& rates) {
    const int n = static_cast<int>(rates.size());
    if (n < 3) throw FitError("gamma fit needs at least 3 |alpha|^2 points");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [a2, rate] : rates) {
        if (rate <= 0) throw FitError("gamma fit requires positive rates");
        const double y = std::log(rate);
        sx += a2;
        sy += y;
        sxx += a2 * a2;
        sxy += a2 * y;
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double icept = (sy - slope * sx) / n;

    GammaFit out;
    out.gamma = -slope;
    out.c0 = icept;
    out.alpha2_min = rates.begin()->first;
    out.alpha2_max = rates.rbegin()->first;
    double ss = 0;
    for (const auto& [a2, rate] : rates) {
        const double r = std::log(rate) - (slope * a2 + icept);
        ss += r * r;
    }
    out.residual = std::sqrt(ss / n);
    return out;
}

}  // namespace catsim
