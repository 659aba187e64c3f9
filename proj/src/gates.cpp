#include "catsim/gates.hpp"

#include <cmath>

namespace catsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

SpMat lowering_op(const OscillatorSpace& space) {
    const SpMat a = annihilation(space);
    SpMat l = SpMat(a * a);
    l -= (space.alpha * space.alpha) * identity_op(space.dim);
    return l;
}

double constant_eps_z(const ZGateConfig& cfg, double re_alpha) {
    return cfg.theta / (4.0 * re_alpha * cfg.T_gate);
}

// Approximate confinement gap for the superadiabatic correction term.
double confinement_gap(const OscillatorSpace& space, const ConfinementConfig& conf) {
    if (conf.g2 > 0) return 2.0 * std::sqrt(space.alpha2()) * conf.g2;
    if (conf.kerr > 0) return 4.0 * space.alpha2() * conf.kerr;
    return 4.0 * space.alpha2() * conf.kappa2;
}

void add_zgate_drive(Liouvillian& gen, const OscillatorSpace& space, const ZGateConfig& cfg) {
    const double re_alpha = space.alpha.real();
    const SpMat adag = embed_at(creation(space), 0, gen.dims);
    if (cfg.drive_shape == DriveShape::constant) {
        const double eps = constant_eps_z(cfg, re_alpha);
        gen.add_drive(adag, [eps](double) { return Complex(eps, 0.0); });
    } else {
        SuperadiabaticDrive drive = superadiabatic_drive(
            cfg.theta, cfg.T_gate, re_alpha, confinement_gap(space, cfg.confinement));
        gen.add_drive(adag, [drive](double t) { return Complex(drive(t), 0.0); });
    }
}

GateErrorReport zgate_run(const OscillatorSpace& space, const ZGateConfig& cfg, Liouvillian& gen,
                          const EvolveOptions& opts) {
    add_zgate_drive(gen, space, cfg);
    CVec psi = cat_state(space, Parity::even);
    if (gen.dims.size() > 1) {
        CVec ground = CVec::Zero(gen.dims[1]);
        ground(0) = 1.0;
        psi = kron_vec(psi, ground);
    }
    const CMat rho0 = psi * psi.adjoint();
    std::vector<SpMat> obs = {embed_at(jx_observable(space), 0, gen.dims)};
    EvolveRecord rec = evolve_observables(gen, rho0, {0.0, 0.5 * cfg.T_gate, cfg.T_gate}, obs, opts);

    GateErrorReport rep;
    rep.p_z = 0.5 * (1.0 + rec.expectations(rec.expectations.rows() - 1, 0).real());
    rep.trace_error = rec.max_trace_error;
    rep.positivity_floor = rec.positivity_floor;
    return rep;
}

double zgate_bitflip_run(const OscillatorSpace& space, const ZGateConfig& cfg, Liouvillian& gen,
                         const EvolveOptions& opts) {
    add_zgate_drive(gen, space, cfg);
    CVec psi = coherent_state(space, space.alpha);
    if (gen.dims.size() > 1) {
        CVec ground = CVec::Zero(gen.dims[1]);
        ground(0) = 1.0;
        psi = kron_vec(psi, ground);
    }
    const CMat rho0 = psi * psi.adjoint();
    std::vector<SpMat> obs = {
        embed_at(SpMat(jz_observable(space).sparseView(1.0, 1e-14)), 0, gen.dims)};
    EvolveRecord rec = evolve_observables(gen, rho0, {0.0, cfg.T_gate}, obs, opts);
    return 0.5 * (1.0 - rec.expectations(1, 0).real());
}

// TPE generator with an explicit (possibly imperfect) buffer.
Liouvillian build_buffer_generator(const OscillatorSpace& space, const ConfinementConfig& conf,
                                   const NoiseConfig& noise, const BufferConfig& buffer) {
    if (conf.g2 <= 0) throw InvalidSpaceError("buffer model requires a TPE confinement");
    if (buffer.levels < 2) throw InvalidSpaceError("buffer needs at least 2 levels");
    std::vector<int> dims = {space.dim, buffer.levels};
    Liouvillian gen = make_liouvillian(dims);

    gen.add_hamiltonian(SpMat(conf.g2 * tpe_hamiltonian(space, buffer.levels)));

    OscillatorSpace bspace{buffer.levels, 0.0};
    const SpMat b = annihilation(bspace);
    if (buffer.chi_hh > 0 && buffer.levels > 2) {
        SpMat b2 = SpMat(b * b);
        gen.add_hamiltonian(
            embed_at(SpMat(-buffer.chi_hh * SpMat(SpMat(b2.adjoint()) * b2)), 1, dims));
    }

    const SpMat a = annihilation(space);
    auto osc = [&](const SpMat& op) { return embed_at(op, 0, dims); };
    if (conf.kappa2 > 0) gen.add_jump(osc(SpMat(std::sqrt(conf.kappa2) * lowering_op(space))));
    if (noise.kappa_minus() > 0) gen.add_jump(osc(SpMat(std::sqrt(noise.kappa_minus()) * a)));
    if (noise.kappa_plus() > 0) {
        gen.add_jump(osc(SpMat(std::sqrt(noise.kappa_plus()) * SpMat(a.adjoint()))));
    }
    if (noise.kappa_phi > 0) {
        gen.add_jump(osc(SpMat(std::sqrt(noise.kappa_phi) * number_operator(space))));
    }

    auto buf = [&](const SpMat& op) { return embed_at(op, 1, dims); };
    if (buffer.kappa_bh > 0) {
        gen.add_jump(buf(SpMat(std::sqrt(buffer.kappa_bh * (1.0 + buffer.n_th_h)) * b)));
        if (buffer.n_th_h > 0) {
            gen.add_jump(
                buf(SpMat(std::sqrt(buffer.kappa_bh * buffer.n_th_h) * SpMat(b.adjoint()))));
        }
    }
    if (buffer.kappa_phi_h > 0) {
        // sigma_z = 1 - 2 b†b on a two-level buffer; the identity part of a
        // jump operator does not contribute to the dissipator.
        SpMat sz = identity_op(buffer.levels);
        sz -= Complex(2.0) * SpMat(SpMat(b.adjoint()) * b);
        gen.add_jump(buf(SpMat(std::sqrt(buffer.kappa_phi_h) * sz)));
    }
    return gen;
}

}  // namespace

GateErrorReport zgate_simulate(const OscillatorSpace& space, const ZGateConfig& cfg,
                               const EvolveOptions& opts) {
    Liouvillian gen = build_generator(space, cfg.confinement, cfg.noise);
    return zgate_run(space, cfg, gen, opts);
}

GateErrorReport zgate_simulate_buffer(const OscillatorSpace& space, const ZGateConfig& cfg,
                                      const BufferConfig& buffer, const EvolveOptions& opts) {
    Liouvillian gen = build_buffer_generator(space, cfg.confinement, cfg.noise, buffer);
    return zgate_run(space, cfg, gen, opts);
}

double zgate_bitflip(const OscillatorSpace& space, const ZGateConfig& cfg,
                     const EvolveOptions& opts) {
    Liouvillian gen = build_generator(space, cfg.confinement, cfg.noise);
    return zgate_bitflip_run(space, cfg, gen, opts);
}

double zgate_bitflip_buffer(const OscillatorSpace& space, const ZGateConfig& cfg,
                            const BufferConfig& buffer, const EvolveOptions& opts) {
    Liouvillian gen = build_buffer_generator(space, cfg.confinement, cfg.noise, buffer);
    return zgate_bitflip_run(space, cfg, gen, opts);
}

double zgate_na_model(GateScheme scheme, double alpha2, double theta, double T, double kappa2,
                      double ham_rate) {
    const double base = theta * theta / (16.0 * alpha2 * alpha2 * kappa2 * T);
    const double r = ham_rate / kappa2;
    switch (scheme) {
        case GateScheme::dissipative:
            return base;
        case GateScheme::combined_kerr:
            return base / (1.0 + 4.0 * r * r);
        case GateScheme::combined_tpe:
            return base / (1.0 + 4.0 * r * r) +
                   theta * theta / (32.0 * alpha2 * alpha2 * ham_rate * ham_rate * T * T);
    }
    return 0.0;
}

double zgate_total_model(GateScheme scheme, double alpha2, double theta, double T, double kappa2,
                         double ham_rate, double kappa1) {
    return kappa1 * alpha2 * T + zgate_na_model(scheme, alpha2, theta, T, kappa2, ham_rate);
}

Optimum minimize_over_T(const std::function<double(double)>& p_of_T, double T_lo, double T_hi) {
    // Golden-section on log T.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::log(T_lo), b = std::log(T_hi);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = p_of_T(std::exp(c)), fd = p_of_T(std::exp(d));
    for (int it = 0; it < 200 && (b - a) > 1e-10; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = p_of_T(std::exp(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = p_of_T(std::exp(d));
        }
    }
    Optimum out;
    out.T_star = std::exp(0.5 * (a + b));
    out.p_star = p_of_T(out.T_star);
    return out;
}

double SuperadiabaticDrive::gaussian(double t) const {
    const double sigma = T / 6.0;
    const double u = t - 0.5 * T;
    const double f = std::exp(-u * u / (2.0 * sigma * sigma));
    const double g0 = std::exp(-T * T / (8.0 * sigma * sigma));
    const double d = f - g0;
    return d * d;
}

double SuperadiabaticDrive::operator()(double t) const {
    if (t < 0 || t > T) return 0.0;
    const double sigma = T / 6.0;
    const double s2 = sigma * sigma;
    const double u = t - 0.5 * T;
    const double f = std::exp(-u * u / (2.0 * s2));
    const double g0 = std::exp(-T * T / (8.0 * s2));
    const double fp = -u / s2 * f;
    const double fpp = (u * u / (s2 * s2) - 1.0 / s2) * f;
    const double omega = (f - g0) * (f - g0);
    const double omega_dd = 2.0 * fp * fp + 2.0 * (f - g0) * fpp;
    return amplitude * (omega + omega_dd / (E1 * E1));
}

SuperadiabaticDrive superadiabatic_drive(double theta, double T, double re_alpha, double E1) {
    SuperadiabaticDrive d;
    d.T = T;
    d.E1 = E1;
    d.amplitude = 1.0;
    // Simpson normalization of ∫ Ω_G dt (the Ω̈ term integrates to zero).
    const int n = 2000;
    double integral = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = T * i / n;
        const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        integral += wgt * d.gaussian(t);
    }
    integral *= T / (3.0 * n);
    d.amplitude = theta / (4.0 * re_alpha * integral);
    return d;
}

SfbResult sfb_zgate_reduced(double alpha2, double kerr, double kappa2, double theta, double T,
                            int gauge_dim, const EvolveOptions& opts) {
    const double omega_k = 4.0 * alpha2 * kerr;
    const double kappa_c = 4.0 * alpha2 * kappa2;
    const double eps = theta / (4.0 * std::sqrt(alpha2) * T);

    std::vector<int> dims = {2, gauge_dim};
    Liouvillian gen = make_liouvillian(dims);
    OscillatorSpace gauge{gauge_dim, 0.0};
    const SpMat at = annihilation(gauge);
    gen.add_hamiltonian(embed_at(SpMat(-omega_k * number_operator(gauge)), 1, dims));
    gen.add_jump(embed_at(SpMat(std::sqrt(kappa_c) * at), 1, dims));

    SpMat sz(2, 2);
    sz.insert(0, 0) = 1.0;
    sz.insert(1, 1) = -1.0;
    // eps σ_z a + h.c. = eps σ_z (a + a†)
    gen.add_drive(kron(sz, at), [eps](double) { return Complex(eps, 0.0); });

    CVec plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    CVec vac = CVec::Zero(gauge_dim);
    vac(0) = 1.0;
    CVec psi = kron_vec(plus, vac);
    const CMat rho0 = psi * psi.adjoint();

    SpMat sx(2, 2);
    sx.insert(0, 1) = 1.0;
    sx.insert(1, 0) = 1.0;
    std::vector<SpMat> obs = {embed_at(sx, 0, dims)};
    EvolveRecord rec = evolve_observables(gen, rho0, {0.0, T}, obs, opts);

    SfbResult out;
    out.p_z = 0.5 * (1.0 - rec.expectations(1, 0).real());
    out.p_z_quasistatic = kappa_c * eps * eps * T / (omega_k * omega_k + 0.25 * kappa_c * kappa_c);
    return out;
}

SpMat cnot_feedforward(const OscillatorSpace& space, const std::vector<int>& dims, double eps_cx) {
    const SpMat a = annihilation(space);
    SpMat q = SpMat(a + SpMat(a.adjoint()));
    q -= Complex(2.0 * space.alpha.real()) * identity_op(space.dim);
    SpMat nt = number_operator(space);
    nt -= Complex(space.alpha2()) * identity_op(space.dim);
    const int target = static_cast<int>(dims.size()) - 1;
    return SpMat(Complex(-eps_cx) *
                 SpMat(embed_at(q, 0, dims) * embed_at(nt, target, dims)));
}

namespace {

struct CnotSetup {
    Liouvillian gen;
    std::vector<int> dims;
    int target_slot = 1;
};

CnotSetup build_cnot(const OscillatorSpace& space, const CnotConfig& cfg) {
    cfg.confinement.check();
    cfg.noise.check();
    const double T = cfg.T_gate;
    const double kappa2 = cfg.confinement.kappa2;
    const Complex alpha = space.alpha;

    CnotSetup s;
    s.dims = (cfg.scheme == GateScheme::combined_tpe)
                 ? std::vector<int>{space.dim, 2, space.dim}
                 : std::vector<int>{space.dim, space.dim};
    s.target_slot = static_cast<int>(s.dims.size()) - 1;
    s.gen = make_liouvillian(s.dims);

    const SpMat a = annihilation(space);
    const SpMat l2 = lowering_op(space);
    const SpMat l_co = embed_at(l2, 0, s.dims);
    const SpMat l_ta = embed_at(l2, s.target_slot, s.dims);
    SpMat a_shift = a;
    a_shift -= alpha * identity_op(space.dim);
    // L_ta(t) = (a_ta² - α²) - (α/2)(a_co - α) + e^{2iφ(t)} (α/2)(a_co - α)
    // with φ(t) = -π t / T matching the sense of rotation generated by the
    // feedforward Hamiltonian on the a_co = -α branch.
    const SpMat bpart = SpMat((alpha / 2.0) * embed_at(a_shift, 0, s.dims));
    const SpMat apart = SpMat(l_ta - bpart);
    auto phase = [T](double t) { return std::exp(Complex(0.0, -2.0 * kPi * t / T)); };

    const double eps_cx = kPi / (T * 4.0 * alpha.real());
    s.gen.add_hamiltonian(cnot_feedforward(space, s.dims, eps_cx));

    switch (cfg.scheme) {
        case GateScheme::dissipative: {
            const double sq = std::sqrt(kappa2);
            s.gen.add_jump(SpMat(sq * l_co));
            s.gen.add_td_jump(SpMat(sq * apart), SpMat(sq * bpart), phase);
            break;
        }
        case GateScheme::combined_kerr: {
            const double K = cfg.confinement.kerr;
            SpMat h_static = SpMat(SpMat(l_co.adjoint()) * l_co);
            h_static += SpMat(SpMat(apart.adjoint()) * apart);
            h_static += SpMat(SpMat(bpart.adjoint()) * bpart);
            s.gen.add_hamiltonian(SpMat(-K * h_static));
            // -K (c A†B + h.c.) completes -K L_ta(t)† L_ta(t)
            s.gen.add_drive(SpMat(-K * SpMat(SpMat(apart.adjoint()) * bpart)), phase);
            if (kappa2 > 0) {
                const double sq = std::sqrt(kappa2);
                s.gen.add_jump(SpMat(sq * l_co));
                s.gen.add_td_jump(SpMat(sq * apart), SpMat(sq * bpart), phase);
            }
            break;
        }
        case GateScheme::combined_tpe: {
            // Control-only confinement; the target is unconfined during the gate.
            SpMat h_tpe = kron(tpe_hamiltonian(space, 2), identity_op(space.dim));
            s.gen.add_hamiltonian(SpMat(cfg.confinement.g2 * h_tpe));
            if (kappa2 > 0) s.gen.add_jump(SpMat(std::sqrt(kappa2) * l_co));
            break;
        }
    }

    const NoiseConfig& noise = cfg.noise;
    for (int slot : {0, s.target_slot}) {
        if (noise.kappa_minus() > 0) {
            s.gen.add_jump(embed_at(SpMat(std::sqrt(noise.kappa_minus()) * a), slot, s.dims));
        }
        if (noise.kappa_plus() > 0) {
            s.gen.add_jump(
                embed_at(SpMat(std::sqrt(noise.kappa_plus()) * SpMat(a.adjoint())), slot, s.dims));
        }
        if (noise.kappa_phi > 0) {
            s.gen.add_jump(
                embed_at(SpMat(std::sqrt(noise.kappa_phi) * number_operator(space)), slot, s.dims));
        }
    }
    return s;
}

CVec cnot_initial(const OscillatorSpace& space, const CnotSetup& s, const CVec& co,
                  const CVec& ta) {
    CVec psi = co;
    if (s.dims.size() == 3) {
        CVec ground(2);
        ground << 1.0, 0.0;
        psi = kron_vec(psi, ground);
    }
    return kron_vec(psi, ta);
}

}  // namespace

GateErrorReport cnot_simulate(const OscillatorSpace& space, const CnotConfig& cfg,
                              bool with_bitflip, const EvolveOptions& opts) {
    CnotSetup s = build_cnot(space, cfg);

    const SpMat jx = jx_observable(space);
    const SpMat jx_co = embed_at(jx, 0, s.dims);
    const SpMat jx_ta = embed_at(jx, s.target_slot, s.dims);
    std::vector<SpMat> obs = {jx_co, jx_ta, SpMat(jx_co * jx_ta)};

    const CVec cat = cat_state(space, Parity::even);
    CVec psi = cnot_initial(space, s, cat, cat);
    CMat rho0 = psi * psi.adjoint();
    EvolveRecord rec = evolve_observables(s.gen, rho0, {0.0, cfg.T_gate}, obs, opts);

    const double m1 = rec.expectations(1, 0).real();
    const double m2 = rec.expectations(1, 1).real();
    const double m3 = rec.expectations(1, 2).real();
    const double fa = 0.5 * (1.0 - m1);  // p_Zc + p_ZcZt
    const double fb = 0.5 * (1.0 - m2);  // p_Zt + p_ZcZt
    const double fc = 0.5 * (1.0 - m3);  // p_Zc + p_Zt

    GateErrorReport rep;
    rep.p_zc = 0.5 * (fa - fb + fc);
    rep.p_zt = 0.5 * (fb - fa + fc);
    rep.p_zczt = 0.5 * (fa + fb - fc);
    rep.p_z = rep.p_zc + rep.p_zt + rep.p_zczt;
    rep.trace_error = rec.max_trace_error;
    rep.positivity_floor = rec.positivity_floor;

    if (with_bitflip) {
        const SpMat jz = SpMat(jz_observable(space).sparseView(1.0, 1e-14));
        const SpMat jz_co = embed_at(jz, 0, s.dims);
        const SpMat jz_ta = embed_at(jz, s.target_slot, s.dims);
        std::vector<SpMat> zobs = {jz_co, jz_ta, SpMat(jz_co * jz_ta)};
        const CVec zero_l = coherent_state(space, space.alpha);
        CVec psix = cnot_initial(space, s, zero_l, zero_l);
        CMat rhox = psix * psix.adjoint();
        CnotSetup s2 = build_cnot(space, cfg);
        EvolveRecord recx = evolve_observables(s2.gen, rhox, {0.0, cfg.T_gate}, zobs, opts);
        const double xa = 0.5 * (1.0 - recx.expectations(1, 0).real());
        const double xb = 0.5 * (1.0 - recx.expectations(1, 1).real());
        const double xc = 0.5 * (1.0 - recx.expectations(1, 2).real());
        rep.p_x = 0.5 * (xa + xb + xc);  // p_Xc + p_Xt + p_XcXt
    }
    return rep;
}

double cnot_na_model(GateScheme scheme, double alpha2, double T, double kappa2, double ham_rate) {
    const double base = kPi * kPi / (64.0 * alpha2 * kappa2 * T);
    const double r = ham_rate / kappa2;
    switch (scheme) {
        case GateScheme::dissipative:
            return base;
        case GateScheme::combined_kerr:
            return base / (1.0 + 4.0 * r * r);
        case GateScheme::combined_tpe:
            return kPi * kPi / (16.0 * alpha2 * kappa2 * T) / (1.0 + 4.0 * r * r) +
                   kPi * kPi / (32.0 * alpha2 * ham_rate * ham_rate * T * T);
    }
    return 0.0;
}

CnotBreakdown cnot_loss_model(GateScheme scheme, double alpha2, double T, double kappa2,
                              double ham_rate, double kappa1) {
    CnotBreakdown out;
    out.p_zc = kappa1 * alpha2 * T + cnot_na_model(scheme, alpha2, T, kappa2, ham_rate);
    out.p_zt = 0.5 * kappa1 * alpha2 * T;
    out.p_zczt = out.p_zt;
    return out;
}

}  // namespace catsim
