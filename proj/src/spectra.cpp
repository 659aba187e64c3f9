#include "catsim/spectra.hpp"

#include <algorithm>
#include <cmath>

namespace catsim {

SpMat kerr_hamiltonian(const OscillatorSpace& space) {
    const SpMat a = annihilation(space);
    const Complex a2sq = space.alpha * space.alpha;
    SpMat lower = SpMat(a * a);
    SpMat id = identity_op(space.dim);
    lower -= a2sq * id;
    return SpMat(SpMat(lower.adjoint()) * lower);
}

SpMat tpe_hamiltonian(const OscillatorSpace& space, int buffer_levels) {
    if (buffer_levels < 2) throw InvalidSpaceError("TPE buffer needs >= 2 levels");
    const SpMat a = annihilation(space);
    SpMat lower = SpMat(a * a);
    lower -= (space.alpha * space.alpha) * identity_op(space.dim);

    OscillatorSpace buf{buffer_levels, 0.0};
    const SpMat bdag = creation(buf);
    SpMat h = kron(lower, bdag);
    return SpMat(h + SpMat(h.adjoint()));
}

void fix_phases(CMat& vectors) {
    for (int c = 0; c < vectors.cols(); ++c) {
        int imax = 0;
        vectors.col(c).cwiseAbs().maxCoeff(&imax);
        const Complex v = vectors(imax, c);
        if (std::abs(v) > 0) vectors.col(c) *= std::abs(v) / v;
    }
}

namespace {

std::vector<int> parity_indices(int dim, Parity p) {
    std::vector<int> idx;
    for (int n = (p == Parity::even ? 0 : 1); n < dim; n += 2) idx.push_back(n);
    return idx;
}

// Oscillator-parity block of an operator on the oscillator space, optionally
// tensored with a buffer factor of dimension buf (buffer indices are kept).
void parity_block(const SpMat& h, int dim, int buf, Parity p,
                  CMat& block, std::vector<int>& full_idx) {
    const auto osc = parity_indices(dim, p);
    full_idx.clear();
    for (int n : osc) {
        for (int b = 0; b < buf; ++b) full_idx.push_back(n * buf + b);
    }
    const int m = static_cast<int>(full_idx.size());
    CMat dense = CMat(h);
    block.resize(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) block(i, j) = dense(full_idx[i], full_idx[j]);
    }
}

struct BranchEig {
    Eigen::VectorXd values;
    CMat vectors;  // columns on the full space
};

BranchEig diag_branch(const SpMat& h, int dim, int buf, Parity p) {
    CMat block;
    std::vector<int> idx;
    parity_block(h, dim, buf, p, block, idx);
    Eigen::SelfAdjointEigenSolver<CMat> es(block);
    BranchEig out;
    out.values = es.eigenvalues();
    out.vectors = CMat::Zero(dim * buf, block.rows());
    for (int c = 0; c < block.rows(); ++c) {
        for (size_t i = 0; i < idx.size(); ++i) {
            out.vectors(idx[i], c) = es.eigenvectors()(static_cast<int>(i), c);
        }
    }
    fix_phases(out.vectors);
    return out;
}

void check_kerr_convergence(const OscillatorSpace& space, int n_max,
                            const Eigen::VectorXd& even, const Eigen::VectorXd& odd) {
    const int dim2 = static_cast<int>(std::ceil(1.2 * space.dim));
    OscillatorSpace bigger{dim2, space.alpha};
    const SpMat h2 = kerr_hamiltonian(bigger);
    const BranchEig e2 = diag_branch(h2, dim2, 1, Parity::even);
    const BranchEig o2 = diag_branch(h2, dim2, 1, Parity::odd);
    const double gap = std::max(e2.values(1), 1e-30);
    for (int n = 0; n <= n_max; ++n) {
        const double se = std::max(std::abs(e2.values(n)), gap);
        const double so = std::max(std::abs(o2.values(n)), gap);
        if (std::abs(even(n) - e2.values(n)) > 1e-6 * se ||
            std::abs(odd(n) - o2.values(n)) > 1e-6 * so) {
            throw ConvergenceError("Kerr eigenvalue not truncation-converged at n=" +
                                   std::to_string(n));
        }
    }
}

}  // namespace

ConfinedSpectrum kerr_spectrum(const OscillatorSpace& space, int n_max) {
    const SpMat h = kerr_hamiltonian(space);
    BranchEig even = diag_branch(h, space.dim, 1, Parity::even);
    BranchEig odd = diag_branch(h, space.dim, 1, Parity::odd);
    if (n_max + 1 > even.values.size() || n_max + 1 > odd.values.size()) {
        throw InvalidSpaceError("n_max exceeds parity block size");
    }
    check_kerr_convergence(space, n_max, even.values, odd.values);

    ConfinedSpectrum s;
    s.scheme = Scheme::kerr;
    s.eigenvalues_even = even.values.head(n_max + 1);
    s.eigenvalues_odd = odd.values.head(n_max + 1);
    s.eigenvectors_even = even.vectors.leftCols(n_max + 1);
    s.eigenvectors_odd = odd.vectors.leftCols(n_max + 1);
    s.spacings.resize(n_max);
    for (int n = 1; n <= n_max; ++n) {
        double d = s.eigenvalues_odd(n) - s.eigenvalues_even(n);
        if (std::abs(d) < 1e-12 * std::max(1.0, s.eigenvalues_odd(n))) d = 0.0;
        s.spacings(n - 1) = d;
    }
    s.overlaps = leakage_overlaps(space, s);
    return s;
}

ConfinedSpectrum tpe_spectrum(const OscillatorSpace& space, int n_max) {
    // Route (i): direct diagonalization on oscillator ⊗ two-level buffer.
    const SpMat h = tpe_hamiltonian(space, 2);
    BranchEig even = diag_branch(h, space.dim, 2, Parity::even);
    BranchEig odd = diag_branch(h, space.dim, 2, Parity::odd);

    // Keep the zero mode and the ascending positive branch of each block. The
    // truncated space also carries numerically-zero spectators (kernel of the
    // adjoint of a²-α² cut off at the top); a scale-relative threshold keeps
    // them out of the branch and the physical zero mode is identified by its
    // overlap with the cat ⊗ |g> state.
    auto positive_branch = [n_max, this_space = space](const BranchEig& b, Parity p) {
        BranchEig out;
        const double scale = b.values.cwiseAbs().maxCoeff();
        const double thresh = 1e-8 * scale;
        CVec eg(2);
        eg << 1.0, 0.0;
        const CVec cat = kron_vec(cat_state(this_space, p), eg);
        double subspace_overlap = 0.0;
        for (int i = 0; i < b.values.size(); ++i) {
            if (std::abs(b.values(i)) < thresh) {
                subspace_overlap += std::norm(cat.dot(b.vectors.col(i)));
            }
        }
        if (subspace_overlap < 0.99) {
            throw ConvergenceError("TPE zero mode not found in parity block");
        }
        std::vector<int> keep;
        for (int i = 0; i < b.values.size() && static_cast<int>(keep.size()) < n_max; ++i) {
            if (b.values(i) > thresh) keep.push_back(i);
        }
        if (static_cast<int>(keep.size()) < n_max) {
            throw InvalidSpaceError("n_max exceeds TPE positive branch size");
        }
        out.values.resize(n_max + 1);
        out.vectors.resize(b.vectors.rows(), n_max + 1);
        out.values(0) = 0.0;
        out.vectors.col(0) = cat;  // exact zero mode of the truncated generator
        for (int i = 1; i <= n_max; ++i) {
            out.values(i) = b.values(keep[static_cast<size_t>(i) - 1]);
            out.vectors.col(i) = b.vectors.col(keep[static_cast<size_t>(i) - 1]);
        }
        return out;
    };
    BranchEig pe = positive_branch(even, Parity::even);
    BranchEig po = positive_branch(odd, Parity::odd);

    // Route (ii): closed form from the Kerr spectrum, E_n± = sqrt(e_n±) and
    // Φ_n± = (φ_n±|g> + (a²-α²)φ_n±/sqrt(e_n±) |e>)/sqrt(2).
    const ConfinedSpectrum kerr = kerr_spectrum(space, n_max);
    const SpMat a = annihilation(space);
    SpMat lower = SpMat(a * a);
    lower -= (space.alpha * space.alpha) * identity_op(space.dim);

    int worst = -1;
    double worst_err = 0.0;
    auto check = [&](const BranchEig& direct, const Eigen::VectorXd& kerr_vals,
                     const CMat& kerr_vecs) {
        for (int n = 1; n <= n_max; ++n) {
            const double e_closed = std::sqrt(std::max(kerr_vals(n), 0.0));
            const double err = std::abs(direct.values(n) - e_closed) / std::max(e_closed, 1e-30);
            if (err > worst_err) { worst_err = err; worst = n; }
            if (err > 1e-6) continue;  // reported below

            CVec phi = kerr_vecs.col(n);
            CVec phit = (CMat(lower) * phi) / e_closed;
            CVec eg(2), ee(2);
            eg << 1.0, 0.0;
            ee << 0.0, 1.0;
            CVec closed = (kron_vec(phi, eg) + kron_vec(phit, ee)) / std::sqrt(2.0);
            const double fid = std::norm(closed.dot(direct.vectors.col(n)));
            if (1.0 - fid > 1e-8) {
                throw ConvergenceError("TPE eigenvector cross-check failed at n=" +
                                       std::to_string(n));
            }
        }
    };
    check(pe, kerr.eigenvalues_even, kerr.eigenvectors_even);
    check(po, kerr.eigenvalues_odd, kerr.eigenvectors_odd);
    if (worst_err > 1e-6) {
        throw ConvergenceError("TPE eigenvalue cross-check failed, worst index " +
                               std::to_string(worst));
    }

    ConfinedSpectrum s;
    s.scheme = Scheme::tpe;
    s.eigenvalues_even = pe.values;
    s.eigenvalues_odd = po.values;
    s.eigenvectors_even = pe.vectors;
    s.eigenvectors_odd = po.vectors;
    s.spacings.resize(n_max);
    for (int n = 1; n <= n_max; ++n) {
        double d = s.eigenvalues_odd(n) - s.eigenvalues_even(n);
        if (std::abs(d) < 1e-12 * std::max(1.0, s.eigenvalues_odd(n))) d = 0.0;
        s.spacings(n - 1) = d;
    }
    s.overlaps = leakage_overlaps(space, s);
    return s;
}

Eigen::VectorXd leakage_overlaps(const OscillatorSpace& space, const ConfinedSpectrum& spectrum) {
    if (std::abs(space.alpha.imag()) > 1e-12) {
        throw InvalidSpaceError("leakage overlaps defined for real alpha");
    }
    CVec d1 = displaced_fock_state(space, space.alpha, 1);
    if (spectrum.scheme == Scheme::tpe) {
        CVec eg(2);
        eg << 1.0, 0.0;
        d1 = kron_vec(d1, eg);
    }
    const int n_max = static_cast<int>(spectrum.eigenvalues_even.size()) - 1;
    Eigen::VectorXd out(n_max);
    for (int n = 1; n <= n_max; ++n) {
        const double p = std::norm(spectrum.eigenvectors_even.col(n).dot(d1));
        const double m = std::norm(spectrum.eigenvectors_odd.col(n).dot(d1));
        out(n - 1) = 0.5 * (p + m);
    }
    return out;
}

}  // namespace catsim
