#ifndef CATSIM_FOCK_HPP
#define CATSIM_FOCK_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace catsim {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<Complex>;

// Thrown when a state does not fit inside the Fock truncation.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double tail)
        : std::runtime_error(what), tail_mass(tail) {}
    double tail_mass;
};

class InvalidSpaceError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Parity { even, odd };

// Truncated Fock space of one oscillator mode, together with the cat
// amplitude alpha all operators and states are built around.
struct OscillatorSpace {
    int dim = 0;
    Complex alpha{0.0, 0.0};

    double alpha2() const { return std::norm(alpha); }
};

// Default truncation: dim = ceil(|alpha|^2 + 8|alpha| + 12).
int default_dim(Complex alpha);

// dim_override = 0 keeps the default rule. The constructed space is checked
// against the coherent-tail invariant (top 3 levels of |±alpha> below 1e-10).
OscillatorSpace make_space(Complex alpha, int dim_override = 0);

// Occupation of levels [dim-3, dim) of an exact (untruncated) coherent state.
double coherent_tail_mass(int dim, Complex beta);

// Ladder operators, <n-1|a|n> = sqrt(n).
SpMat annihilation(const OscillatorSpace& space);
SpMat creation(const OscillatorSpace& space);
SpMat number_operator(const OscillatorSpace& space);
SpMat identity_op(int dim);

CVec coherent_state(const OscillatorSpace& space, Complex beta);
CVec fock_state(const OscillatorSpace& space, int n);

// (|alpha> ± |-alpha>)/N±. The even cat has exactly zero odd-level amplitudes.
CVec cat_state(const OscillatorSpace& space, Parity parity);

// Displacement unitary exp(beta a† - beta* a), dense scaling-and-squaring.
CMat displacement_operator(const OscillatorSpace& space, Complex beta);

// Normalized D(beta)|n>.
CVec displaced_fock_state(const OscillatorSpace& space, Complex beta, int n);

// Photon-number parity, +1 on even Fock levels, -1 on odd.
SpMat jx_observable(const OscillatorSpace& space);

// Approximate sign(a + a†) on the confined manifold, built from the
// Bessel-weighted series over parity-swapping ladder monomials. Real alpha only.
CMat jz_observable(const OscillatorSpace& space);

// Kronecker product, factors in declared order.
SpMat kron(const SpMat& a, const SpMat& b);

// Kronecker product over a list of factor dimensions; ops[i] either matches
// dims[i] or is empty (interpreted as identity).
SpMat tensor_embed(const std::vector<SpMat>& ops, const std::vector<int>& dims);

// Embed a single-factor operator at position `slot` of a composite space.
SpMat embed_at(const SpMat& op, int slot, const std::vector<int>& dims);

CVec kron_vec(const CVec& a, const CVec& b);

double ln_factorial(int n);
double ln_double_factorial(int n);  // (-1)!! = 0!! = 1

}  // namespace catsim

#endif
