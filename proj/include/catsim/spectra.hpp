#ifndef CATSIM_SPECTRA_HPP
#define CATSIM_SPECTRA_HPP

#include "catsim/fock.hpp"

namespace catsim {

enum class Scheme { kerr, tpe };

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parity-resolved eigendata of a confinement Hamiltonian. Eigenvalues are in
// units of the confinement rate (K or g2). For Kerr, eigenvectors live on the
// bare oscillator space; for TPE they live on oscillator ⊗ two-level buffer
// and only the positive-energy branch is stored (the negative branch follows
// by flipping the buffer component sign).
struct ConfinedSpectrum {
    Scheme scheme = Scheme::kerr;
    Eigen::VectorXd eigenvalues_even;  // ascending, index 0 = cat manifold
    Eigen::VectorXd eigenvalues_odd;
    CMat eigenvectors_even;            // columns, phase-fixed
    CMat eigenvectors_odd;
    Eigen::VectorXd spacings;          // delta_n (Kerr) or Delta_n (TPE), n >= 1
    Eigen::VectorXd overlaps;          // lambda_n or Lambda_n, n >= 1
};

// (a†² - conj(alpha)²)(a² - alpha²), in units of K.
SpMat kerr_hamiltonian(const OscillatorSpace& space);

// (a² - alpha²) ⊗ sigma+ + h.c. on oscillator ⊗ buffer, in units of g2.
// buffer_levels > 2 swaps sigma+ for a truncated b† (anharmonicity is added
// by the gates module).
SpMat tpe_hamiltonian(const OscillatorSpace& space, int buffer_levels = 2);

// Block-diagonalizes by photon parity and pairs levels by ascending rank.
// n_max excited pairs are checked for truncation convergence (eigenvalues
// stable to 1e-6 relative under a 20% dim increase).
ConfinedSpectrum kerr_spectrum(const OscillatorSpace& space, int n_max);

// Computed both by direct diagonalization and by the closed-form map from the
// Kerr spectrum (E_n± = ±sqrt(e_n±)); the two routes must agree to 1e-6
// relative in eigenvalues and 1 - 1e-8 in eigenvector fidelity.
ConfinedSpectrum tpe_spectrum(const OscillatorSpace& space, int n_max);

// lambda_n = [(lambda_n+)² + (lambda_n-)²]/2 from overlaps of the first
// displaced Fock state with the Kerr eigenvectors. For a TPE spectrum the
// returned values are Lambda_n = lambda_n / 2.
Eigen::VectorXd leakage_overlaps(const OscillatorSpace& space, const ConfinedSpectrum& spectrum);

// Make the largest-magnitude amplitude of each column real positive.
void fix_phases(CMat& vectors);

}  // namespace catsim

#endif
