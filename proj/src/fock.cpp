#include "catsim/fock.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

namespace catsim {

int default_dim(Complex alpha) {
    const double a = std::abs(alpha);
    return static_cast<int>(std::ceil(a * a + 8.0 * a + 12.0));
}

double coherent_tail_mass(int dim, Complex beta) {
    const double nbar = std::norm(beta);
    // Poisson weights e^{-nbar} nbar^n / n!, summed over the top 3 levels.
    double mass = 0.0;
    for (int n = std::max(0, dim - 3); n < dim; ++n) {
        mass += std::exp(-nbar + n * std::log(std::max(nbar, 1e-300)) - ln_factorial(n));
    }
    if (nbar == 0.0) mass = (dim <= 3) ? 1.0 : 0.0;
    return mass;
}

OscillatorSpace make_space(Complex alpha, int dim_override) {
    OscillatorSpace space;
    space.alpha = alpha;
    space.dim = dim_override > 0 ? dim_override : default_dim(alpha);
    if (space.dim < 2) throw InvalidSpaceError("oscillator space needs dim >= 2");
    const double tail = std::max(coherent_tail_mass(space.dim, alpha),
                                 coherent_tail_mass(space.dim, -alpha));
    if (tail > 1e-10) {
        throw TruncationError("coherent tail of |±alpha> exceeds 1e-10 in top Fock levels", tail);
    }
    return space;
}

SpMat annihilation(const OscillatorSpace& space) {
    if (space.dim < 2) throw InvalidSpaceError("annihilation needs dim >= 2");
    SpMat a(space.dim, space.dim);
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(space.dim - 1);
    for (int n = 1; n < space.dim; ++n) {
        trip.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
    }
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
}

SpMat creation(const OscillatorSpace& space) {
    return SpMat(annihilation(space).adjoint());
}

SpMat number_operator(const OscillatorSpace& space) {
    SpMat n(space.dim, space.dim);
    std::vector<Eigen::Triplet<Complex>> trip;
    for (int k = 1; k < space.dim; ++k) trip.emplace_back(k, k, static_cast<double>(k));
    n.setFromTriplets(trip.begin(), trip.end());
    return n;
}

SpMat identity_op(int dim) {
    SpMat id(dim, dim);
    id.setIdentity();
    return id;
}

CVec fock_state(const OscillatorSpace& space, int n) {
    if (n < 0 || n >= space.dim) throw InvalidSpaceError("Fock index outside truncation");
    CVec v = CVec::Zero(space.dim);
    v(n) = 1.0;
    return v;
}

CVec coherent_state(const OscillatorSpace& space, Complex beta) {
    const double tail = coherent_tail_mass(space.dim, beta);
    if (tail > 1e-10) {
        throw TruncationError("coherent state tail exceeds truncation budget", tail);
    }
    CVec v(space.dim);
    Complex c = std::exp(-0.5 * std::norm(beta));
    v(0) = c;
    for (int n = 1; n < space.dim; ++n) {
        c *= beta / std::sqrt(static_cast<double>(n));
        v(n) = c;
    }
    v.normalize();
    return v;
}

CVec cat_state(const OscillatorSpace& space, Parity parity) {
    const Complex beta = space.alpha;
    const double tail = coherent_tail_mass(space.dim, beta);
    if (tail > 1e-10) {
        throw TruncationError("cat state tail exceeds truncation budget", tail);
    }
    // Build on the selected parity levels only, so the opposite-parity
    // amplitudes are exactly zero.
    CVec v = CVec::Zero(space.dim);
    const int start = (parity == Parity::even) ? 0 : 1;
    Complex c = 1.0;  // relative amplitude beta^n / sqrt(n!), unnormalized
    for (int n = 0; n < space.dim; ++n) {
        if (n > 0) c *= beta / std::sqrt(static_cast<double>(n));
        if (n % 2 == start % 2) v(n) = c;
    }
    v.normalize();
    return v;
}

CMat displacement_operator(const OscillatorSpace& space, Complex beta) {
    const SpMat a = annihilation(space);
    CMat gen = CMat(beta * CMat(a.adjoint()) - std::conj(beta) * CMat(a));
    return gen.exp();
}

CVec displaced_fock_state(const OscillatorSpace& space, Complex beta, int n) {
    if (static_cast<double>(n) + std::norm(beta) > space.dim - 3) {
        throw TruncationError("displaced Fock state outside truncation", 1.0);
    }
    CVec v = displacement_operator(space, beta) * fock_state(space, n);
    v.normalize();
    return v;
}

SpMat jx_observable(const OscillatorSpace& space) {
    SpMat j(space.dim, space.dim);
    std::vector<Eigen::Triplet<Complex>> trip;
    for (int n = 0; n < space.dim; ++n) {
        trip.emplace_back(n, n, (n % 2 == 0) ? 1.0 : -1.0);
    }
    j.setFromTriplets(trip.begin(), trip.end());
    return j;
}

double ln_factorial(int n) { return std::lgamma(n + 1.0); }

double ln_double_factorial(int n) {
    // Convention (-1)!! = 0!! = 1.
    if (n <= 0) return 0.0;
    if (n % 2 == 0) {
        const int k = n / 2;
        return k * std::numbers::ln2 + std::lgamma(k + 1.0);
    }
    const int k = (n - 1) / 2;
    return std::lgamma(n + 1.0) - k * std::numbers::ln2 - std::lgamma(k + 1.0);
}

namespace {

// One parity-swapping monomial of the J_z series. For q >= 0 the term is
// diag[(m-1)!!/(m+2q)!!] P_even a^{2q+1}; for q < 0 it is
// P_even a†^{2|q|-1} diag[n!!/(n+2|q|-1)!!]. Both map odd level n to an even
// level m, so the result is stored as dense column updates.
void add_jpm_term(CMat& jpm, int q, double weight, int dim) {
    if (q >= 0) {
        const int step = 2 * q + 1;
        for (int n = step; n < dim; n += 2) {
            const int m = n - step;
            // sqrt(n!/m!) from a^{2q+1}
            const double lad = 0.5 * (ln_factorial(n) - ln_factorial(m));
            const double dfr = ln_double_factorial(m - 1) - ln_double_factorial(m + 2 * q);
            jpm(m, n) += weight * std::exp(lad + dfr);
        }
    } else {
        const int step = 2 * (-q) - 1;
        for (int n = 1; n + step < dim; n += 2) {
            const int m = n + step;
            const double lad = 0.5 * (ln_factorial(m) - ln_factorial(n));
            const double dfr = ln_double_factorial(n) - ln_double_factorial(n + step);
            jpm(m, n) += weight * std::exp(lad + dfr);
        }
    }
}

}  // namespace

CMat jz_observable(const OscillatorSpace& space) {
    if (std::abs(space.alpha.imag()) > 1e-12 * std::max(1.0, std::abs(space.alpha))) {
        throw InvalidSpaceError("jz_observable requires real alpha");
    }
    const double a2 = space.alpha.real() * space.alpha.real();
    const int dim = space.dim;
    CMat jpm = CMat::Zero(dim, dim);

    double prefactor;
    if (a2 < 1e-30) {
        prefactor = 1.0;  // limit of sqrt(2a2/sinh(2a2))
    } else {
        prefactor = std::sqrt(2.0 * a2 / std::sinh(2.0 * a2));
    }

    const int q_cap = dim;  // monomials longer than dim vanish
    double ref = std::abs(std::cyl_bessel_i(0.0, a2));
    for (int q = -q_cap; q <= q_cap; ++q) {
        const double bess = (a2 < 1e-300) ? (q == 0 ? 1.0 : 0.0)
                                          : std::cyl_bessel_i(std::abs(q), a2);
        const double w = ((q % 2 == 0) ? 1.0 : -1.0) * bess / (2.0 * q + 1.0);
        if (std::abs(w) < 1e-14 * ref) continue;
        add_jpm_term(jpm, q, prefactor * w, dim);
    }
    return jpm + jpm.adjoint().eval();
}

SpMat kron(const SpMat& a, const SpMat& b) {
    SpMat out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(static_cast<size_t>(a.nonZeros()) * b.nonZeros());
    for (int ka = 0; ka < a.outerSize(); ++ka) {
        for (SpMat::InnerIterator ia(a, ka); ia; ++ia) {
            for (int kb = 0; kb < b.outerSize(); ++kb) {
                for (SpMat::InnerIterator ib(b, kb); ib; ++ib) {
                    trip.emplace_back(ia.row() * b.rows() + ib.row(),
                                      ia.col() * b.cols() + ib.col(),
                                      ia.value() * ib.value());
                }
            }
        }
    }
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

SpMat tensor_embed(const std::vector<SpMat>& ops, const std::vector<int>& dims) {
    if (ops.size() != dims.size()) {
        throw InvalidSpaceError("tensor_embed: ops/dims length mismatch");
    }
    SpMat out = identity_op(1);
    for (size_t i = 0; i < dims.size(); ++i) {
        const SpMat& factor = (ops[i].rows() == 0) ? identity_op(dims[i]) : ops[i];
        if (factor.rows() != dims[i] || factor.cols() != dims[i]) {
            throw InvalidSpaceError("tensor_embed: factor dimension mismatch");
        }
        out = kron(out, factor);
    }
    return out;
}

SpMat embed_at(const SpMat& op, int slot, const std::vector<int>& dims) {
    std::vector<SpMat> ops(dims.size());
    ops[static_cast<size_t>(slot)] = op;
    return tensor_embed(ops, dims);
}

CVec kron_vec(const CVec& a, const CVec& b) {
    CVec out(a.size() * b.size());
    for (int i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

}  // namespace catsim
