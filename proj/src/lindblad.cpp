#include "catsim/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace catsim {

void NoiseConfig::check() const {
    if (kappa1 < 0 || n_th < 0 || kappa_phi < 0) {
        throw InvalidSpaceError("noise rates must be nonnegative");
    }
}

void ConfinementConfig::check() const {
    if (kappa2 < 0 || kerr < 0 || g2 < 0) {
        throw InvalidSpaceError("confinement rates must be nonnegative");
    }
}

void spmm(const SpMat& s, const CMat& d, CMat& out, Kernel kernel) {
    out.resize(d.rows(), d.cols());
    if (kernel == Kernel::serial) {
        out.noalias() = s * d;
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
        out.col(j).noalias() = s * d.col(j);
    }
#else
    out.noalias() = s * d;
#endif
}

Liouvillian make_liouvillian(const std::vector<int>& dims) {
    Liouvillian gen;
    gen.dims = dims;
    gen.dim = 1;
    for (int d : dims) gen.dim *= d;
    gen.G = SpMat(gen.dim, gen.dim);
    return gen;
}

void Liouvillian::add_hamiltonian(const SpMat& h) {
    G = SpMat(G - Complex(0.0, 1.0) * h);
}

void Liouvillian::add_jump(const SpMat& l) {
    jumps.push_back(l);
    jump_adjoints.push_back(SpMat(l.adjoint()));
    G = SpMat(G - 0.5 * SpMat(SpMat(l.adjoint()) * l));
}

void Liouvillian::add_drive(const SpMat& op, std::function<Complex(double)> amp) {
    drives.push_back({op, std::move(amp)});
}

void Liouvillian::add_td_jump(const SpMat& a, const SpMat& b, std::function<Complex(double)> c) {
    TimeDepJump j;
    j.A = a;
    j.B = b;
    j.c = std::move(c);
    const SpMat ad = a.adjoint();
    const SpMat bd = b.adjoint();
    j.AdA = SpMat(ad * a);
    j.AdB = SpMat(ad * b);
    j.BdA = SpMat(bd * a);
    j.BdB = SpMat(bd * b);
    td_jumps.push_back(std::move(j));
}

Liouvillian build_generator(const OscillatorSpace& space, const ConfinementConfig& confinement,
                            const NoiseConfig& noise) {
    confinement.check();
    noise.check();

    const bool has_buffer = confinement.g2 > 0;
    std::vector<int> dims = {space.dim};
    if (has_buffer) dims.push_back(2);
    Liouvillian gen = make_liouvillian(dims);

    const SpMat a = annihilation(space);
    auto osc = [&](const SpMat& op) { return embed_at(op, 0, dims); };

    if (confinement.kerr > 0) {
        gen.add_hamiltonian(osc(SpMat(-confinement.kerr * kerr_hamiltonian(space))));
    }
    if (has_buffer) {
        gen.add_hamiltonian(SpMat(confinement.g2 * tpe_hamiltonian(space, 2)));
    }
    if (confinement.kappa2 > 0) {
        SpMat l2 = SpMat(a * a);
        l2 -= (space.alpha * space.alpha) * identity_op(space.dim);
        gen.add_jump(osc(SpMat(std::sqrt(confinement.kappa2) * l2)));
    }
    if (noise.kappa_minus() > 0) gen.add_jump(osc(SpMat(std::sqrt(noise.kappa_minus()) * a)));
    if (noise.kappa_plus() > 0) {
        gen.add_jump(osc(SpMat(std::sqrt(noise.kappa_plus()) * SpMat(a.adjoint()))));
    }
    if (noise.kappa_phi > 0) {
        gen.add_jump(osc(SpMat(std::sqrt(noise.kappa_phi) * number_operator(space))));
    }
    return gen;
}

namespace {

struct RhsWorkspace {
    CMat m, x, y;
    SpMat geff, lt, ltd;
};

void rhs(const Liouvillian& gen, double t, const CMat& rho, CMat& drho, Kernel kernel,
         RhsWorkspace& w) {
    const SpMat* g = &gen.G;
    if (gen.time_dependent()) {
        w.geff = gen.G;
        const Complex mi(0.0, -1.0);
        for (const auto& d : gen.drives) {
            const Complex a = d.amp(t);
            w.geff += SpMat(mi * a * d.op);
            w.geff += SpMat(mi * std::conj(a) * SpMat(d.op.adjoint()));
        }
        for (const auto& j : gen.td_jumps) {
            const Complex c = j.c(t);
            w.geff += SpMat(-0.5 * j.AdA);
            w.geff += SpMat(-0.5 * c * j.AdB);
            w.geff += SpMat(-0.5 * std::conj(c) * j.BdA);
            w.geff += SpMat(-0.5 * std::norm(c) * j.BdB);
        }
        g = &w.geff;
    }

    spmm(*g, rho, w.m, kernel);
    drho = w.m;
    drho += w.m.adjoint();

    // L rho L† as (L rho) L†: one sparse-dense and one dense-sparse product,
    // no dense transposes.
    auto add_sandwich = [&](const SpMat& l, const SpMat& ld) {
        spmm(l, rho, w.x, kernel);
        drho.noalias() += w.x * ld;
    };
    for (size_t i = 0; i < gen.jumps.size(); ++i) {
        add_sandwich(gen.jumps[i], gen.jump_adjoints[i]);
    }
    for (const auto& j : gen.td_jumps) {
        w.lt = j.A;
        w.lt += SpMat(j.c(t) * j.B);
        w.ltd = w.lt.adjoint();
        add_sandwich(w.lt, w.ltd);
    }
}

// Dormand–Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_ratio(const CMat& err, const CMat& y0, const CMat& y1, double atol, double rtol) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < err.cols(); ++j) {
        for (Eigen::Index i = 0; i < err.rows(); ++i) {
            const double sc =
                atol + rtol * std::max(std::abs(y0(i, j)), std::abs(y1(i, j)));
            worst = std::max(worst, std::abs(err(i, j)) / sc);
        }
    }
    return worst;
}

}  // namespace

void apply_rhs(const Liouvillian& gen, double t, const CMat& rho, CMat& drho, Kernel kernel) {
    RhsWorkspace w;
    rhs(gen, t, rho, drho, kernel, w);
}

Complex expectation(const SpMat& obs, const CMat& rho) {
    Complex tr = 0.0;
    for (int k = 0; k < obs.outerSize(); ++k) {
        for (SpMat::InnerIterator it(obs, k); it; ++it) {
            tr += it.value() * rho(it.col(), it.row());
        }
    }
    return tr;
}

EvolveRecord evolve_observables(const Liouvillian& gen, const CMat& rho0,
                                const std::vector<double>& times, const std::vector<SpMat>& obs,
                                const EvolveOptions& opts) {
    if (times.empty()) throw InvalidSpaceError("evolve: empty time grid");
    for (size_t i = 1; i < times.size(); ++i) {
        if (times[i] <= times[i - 1]) throw InvalidSpaceError("evolve: times must increase");
    }
    if (rho0.rows() != gen.dim || rho0.cols() != gen.dim) {
        throw InvalidSpaceError("evolve: state dimension mismatch");
    }

    EvolveRecord rec;
    rec.times = Eigen::Map<const Eigen::VectorXd>(times.data(),
                                                  static_cast<Eigen::Index>(times.size()));
    rec.expectations.resize(static_cast<Eigen::Index>(times.size()),
                            static_cast<Eigen::Index>(obs.size()));

    RhsWorkspace w;
    CMat y = rho0, ynew, ytmp, err;
    CMat k1, k2, k3, k4, k5, k6, k7;
    const double tr0 = rho0.real().trace();

    double t = times[0];
    size_t iout = 0;
    auto record = [&]() {
        for (size_t j = 0; j < obs.size(); ++j) {
            rec.expectations(static_cast<Eigen::Index>(iout), static_cast<Eigen::Index>(j)) =
                expectation(obs[j], y);
        }
        ++iout;
    };
    record();

    if (times.size() > 1) {
        rhs(gen, t, y, k1, opts.kernel, w);
        double dt = opts.initial_dt;
        if (dt <= 0) {
            const double fy = std::max(k1.cwiseAbs().maxCoeff(), 1e-300);
            const double yy = std::max(y.cwiseAbs().maxCoeff(), 1e-16);
            dt = std::min(0.01 * yy / fy, (times.back() - t) / 10.0);
        }

        while (iout < times.size()) {
            const double t_target = times[iout];
            bool clipped = false;
            double h = dt;
            if (t + h >= t_target) {
                h = t_target - t;
                clipped = true;
            }
            if (h < 1e-14 * std::max(1.0, std::abs(t))) {
                throw IntegrationError("step size underflow (stiffness?)", t);
            }
            if (++rec.n_steps > opts.max_steps) {
                throw IntegrationError("max step count exceeded", t);
            }

            ytmp = y + (h * a21) * k1;
            rhs(gen, t + c2 * h, ytmp, k2, opts.kernel, w);
            ytmp = y + (h * a31) * k1 + (h * a32) * k2;
            rhs(gen, t + c3 * h, ytmp, k3, opts.kernel, w);
            ytmp = y + (h * a41) * k1 + (h * a42) * k2 + (h * a43) * k3;
            rhs(gen, t + c4 * h, ytmp, k4, opts.kernel, w);
            ytmp = y + (h * a51) * k1 + (h * a52) * k2 + (h * a53) * k3 + (h * a54) * k4;
            rhs(gen, t + c5 * h, ytmp, k5, opts.kernel, w);
            ytmp = y + (h * a61) * k1 + (h * a62) * k2 + (h * a63) * k3 + (h * a64) * k4 +
                   (h * a65) * k5;
            rhs(gen, t + h, ytmp, k6, opts.kernel, w);
            ynew = y + (h * b1) * k1 + (h * b3) * k3 + (h * b4) * k4 + (h * b5) * k5 +
                   (h * b6) * k6;
            rhs(gen, t + h, ynew, k7, opts.kernel, w);
            err = (h * e1) * k1 + (h * e3) * k3 + (h * e4) * k4 + (h * e5) * k5 + (h * e6) * k6 +
                  (h * e7) * k7;

            const double ratio = error_ratio(err, y, ynew, opts.atol, opts.rtol);
            if (ratio <= 1.0) {
                t += h;
                y = 0.5 * (ynew + ynew.adjoint().eval());
                k1 = k7;  // FSAL
                rec.max_trace_error =
                    std::max(rec.max_trace_error, std::abs(y.real().trace() - tr0));
                if (clipped && std::abs(t - t_target) < 1e-12 * std::max(1.0, t_target)) {
                    record();
                }
            }
            const double fac = std::clamp(
                0.9 * std::pow(std::max(ratio, 1e-10), -0.2), 0.2, 5.0);
            dt = (clipped && ratio <= 1.0) ? std::max(dt, h * fac) : h * fac;
        }
    }

    rec.final_state = y;
    if (gen.dim <= 600) {
        Eigen::SelfAdjointEigenSolver<CMat> es(y, Eigen::EigenvaluesOnly);
        rec.positivity_floor = es.eigenvalues().minCoeff();
    } else {
        rec.positivity_floor = y.real().diagonal().minCoeff();
    }
    return rec;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> t(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) t[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1.0);
    return t;
}

Trajectory record_error_probabilities(const Liouvillian& gen, const OscillatorSpace& space,
                                      const CMat& rho0, const std::vector<double>& times,
                                      const EvolveOptions& opts) {
    std::vector<SpMat> obs = {
        embed_at(SpMat(jz_observable(space).sparseView(1.0, 1e-14)), 0, gen.dims),
        embed_at(jx_observable(space), 0, gen.dims),
    };
    EvolveRecord rec = evolve_observables(gen, rho0, times, obs, opts);

    Trajectory traj;
    traj.times = rec.times;
    traj.px = 0.5 * (1.0 - rec.expectations.col(0).real().array());
    traj.pz = 0.5 * (1.0 - rec.expectations.col(1).real().array());
    traj.trace_error = rec.max_trace_error;
    traj.positivity_floor = rec.positivity_floor;
    return traj;
}

Trajectory idle_error_probabilities(const OscillatorSpace& space,
                                    const ConfinementConfig& confinement, const NoiseConfig& noise,
                                    double T_idle, int n_out, const EvolveOptions& opts) {
    Liouvillian gen = build_generator(space, confinement, noise);
    CVec psi = coherent_state(space, space.alpha);
    if (gen.dims.size() > 1) {
        CVec ground(2);
        ground << 1.0, 0.0;
        psi = kron_vec(psi, ground);
    }
    CMat rho0 = psi * psi.adjoint();
    return record_error_probabilities(gen, space, rho0, linspace(0.0, T_idle, n_out), opts);
}

// ---------------------------------------------------------------------------
// Monte Carlo wave function backend.

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Non-Hermitian drift dpsi/dt = G_eff psi (G already contains -iH - 1/2 Σ L†L).
void mcwf_rhs(const Liouvillian& gen, double t, const CVec& psi, CVec& dpsi) {
    dpsi.noalias() = gen.G * psi;
    const Complex mi(0.0, -1.0);
    for (const auto& d : gen.drives) {
        const Complex a = d.amp(t);
        dpsi.noalias() += (mi * a) * (d.op * psi);
        dpsi.noalias() += (mi * std::conj(a)) * (SpMat(d.op.adjoint()) * psi);
    }
    for (const auto& j : gen.td_jumps) {
        const Complex c = j.c(t);
        dpsi.noalias() += -0.5 * (j.AdA * psi);
        dpsi.noalias() += (-0.5 * c) * (j.AdB * psi);
        dpsi.noalias() += (-0.5 * std::conj(c)) * (j.BdA * psi);
        dpsi.noalias() += (-0.5 * std::norm(c)) * (j.BdB * psi);
    }
}

double vec_error_ratio(const CVec& err, const CVec& y0, const CVec& y1, double atol, double rtol) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        worst = std::max(worst, std::abs(err(i)) / sc);
    }
    return worst;
}

// Advance psi from t by exactly h with error control on substeps.
void mcwf_advance(const Liouvillian& gen, double t0, double h_total, CVec& psi, double atol,
                  double rtol) {
    double t = t0;
    const double t_end = t0 + h_total;
    CVec k1(psi.size()), k2(psi.size()), k3(psi.size()), k4(psi.size()), k5(psi.size()),
        k6(psi.size()), k7(psi.size()), ytmp(psi.size()), ynew(psi.size()), err(psi.size());
    mcwf_rhs(gen, t, psi, k1);
    double dt = h_total;
    while (t < t_end - 1e-15 * std::max(1.0, std::abs(t_end))) {
        double h = std::min(dt, t_end - t);
        ytmp = psi + (h * a21) * k1;
        mcwf_rhs(gen, t + c2 * h, ytmp, k2);
        ytmp = psi + (h * a31) * k1 + (h * a32) * k2;
        mcwf_rhs(gen, t + c3 * h, ytmp, k3);
        ytmp = psi + (h * a41) * k1 + (h * a42) * k2 + (h * a43) * k3;
        mcwf_rhs(gen, t + c4 * h, ytmp, k4);
        ytmp = psi + (h * a51) * k1 + (h * a52) * k2 + (h * a53) * k3 + (h * a54) * k4;
        mcwf_rhs(gen, t + c5 * h, ytmp, k5);
        ytmp = psi + (h * a61) * k1 + (h * a62) * k2 + (h * a63) * k3 + (h * a64) * k4 +
               (h * a65) * k5;
        mcwf_rhs(gen, t + h, ytmp, k6);
        ynew = psi + (h * b1) * k1 + (h * b3) * k3 + (h * b4) * k4 + (h * b5) * k5 + (h * b6) * k6;
        mcwf_rhs(gen, t + h, ynew, k7);
        err = (h * e1) * k1 + (h * e3) * k3 + (h * e4) * k4 + (h * e5) * k5 + (h * e6) * k6 +
              (h * e7) * k7;
        const double ratio = vec_error_ratio(err, psi, ynew, atol, rtol);
        if (ratio <= 1.0) {
            t += h;
            psi = ynew;
            k1 = k7;
        }
        dt = h * std::clamp(0.9 * std::pow(std::max(ratio, 1e-10), -0.2), 0.2, 5.0);
        if (dt < 1e-15 * std::max(1.0, std::abs(t))) {
            throw IntegrationError("MCWF step underflow", t);
        }
    }
}

}  // namespace

McwfRecord evolve_mcwf(const Liouvillian& gen, const CVec& psi0, const std::vector<double>& times,
                       const std::vector<SpMat>& obs, int n_traj, std::uint64_t seed,
                       const EvolveOptions& opts) {
    if (times.empty() || n_traj < 1) throw InvalidSpaceError("evolve_mcwf: bad arguments");
    const size_t nt = times.size(), no = obs.size();

    McwfRecord rec;
    rec.times = Eigen::Map<const Eigen::VectorXd>(times.data(), static_cast<Eigen::Index>(nt));
    rec.n_traj = n_traj;
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nt),
                                                static_cast<Eigen::Index>(no));
    Eigen::MatrixXd sum2 = sum;

    const int n_jumps = static_cast<int>(gen.jumps.size() + gen.td_jumps.size());
    auto jump_op = [&](int j, double t, SpMat& out) {
        if (j < static_cast<int>(gen.jumps.size())) {
            out = gen.jumps[static_cast<size_t>(j)];
        } else {
            const auto& tj = gen.td_jumps[static_cast<size_t>(j - gen.jumps.size())];
            out = tj.A;
            out += SpMat(tj.c(t) * tj.B);
        }
    };

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (opts.kernel == Kernel::openmp)
#endif
    for (int traj = 0; traj < n_traj; ++traj) {
        std::mt19937_64 rng(splitmix64(seed ^ (0x51d7348bULL * (traj + 1))));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        CVec psi = psi0.normalized();
        double r = uni(rng);
        Eigen::MatrixXd local(static_cast<Eigen::Index>(nt), static_cast<Eigen::Index>(no));
        SpMat lop;
        CVec lpsi;

        double t = times[0];
        for (size_t i = 0; i < nt; ++i) {
            double target = times[i];
            while (t < target - 1e-15 * std::max(1.0, target)) {
                double h = target - t;
                CVec saved = psi;
                mcwf_advance(gen, t, h, psi, opts.atol, opts.rtol);
                if (psi.squaredNorm() > r) {
                    t += h;
                    break;
                }
                // Bisect the jump time inside [t, t+h].
                double lo = 0.0, hi = h;
                for (int it = 0; it < 40 && (hi - lo) > 1e-12 * h; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    CVec probe = saved;
                    mcwf_advance(gen, t, mid, probe, opts.atol, opts.rtol);
                    if (probe.squaredNorm() > r) {
                        lo = mid;
                    } else {
                        hi = mid;
                        psi = probe;
                    }
                }
                t += hi;
                // Pick the channel with probability ∝ ||L psi||².
                Eigen::VectorXd weights(n_jumps);
                for (int j = 0; j < n_jumps; ++j) {
                    jump_op(j, t, lop);
                    lpsi.noalias() = lop * psi;
                    weights(j) = lpsi.squaredNorm();
                }
                const double total = weights.sum();
                if (total <= 0) break;  // no channel can fire; numerical corner
                double pick = uni(rng) * total;
                int chosen = 0;
                for (; chosen < n_jumps - 1; ++chosen) {
                    pick -= weights(chosen);
                    if (pick <= 0) break;
                }
                jump_op(chosen, t, lop);
                psi = (lop * psi).normalized();
                r = uni(rng);
            }
            const double nrm = psi.squaredNorm();
            for (size_t j = 0; j < no; ++j) {
                const Complex v = psi.dot(CVec(obs[j] * psi)) / nrm;
                local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v.real();
            }
        }
#ifdef _OPENMP
#pragma omp critical
#endif
        {
            sum += local;
            sum2 += local.cwiseProduct(local);
        }
    }

    rec.expectations = sum.cast<Complex>() / static_cast<double>(n_traj);
    Eigen::MatrixXd var =
        (sum2 - sum.cwiseProduct(sum) / static_cast<double>(n_traj)) /
        std::max(1.0, static_cast<double>(n_traj - 1));
    rec.std_errors =
        (var.cwiseMax(0.0) / static_cast<double>(n_traj)).cwiseSqrt().cast<Complex>();
    return rec;
}

}  // namespace catsim
