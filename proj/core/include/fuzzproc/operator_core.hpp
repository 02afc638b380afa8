// operator_core.hpp — dense complex operator algebra: spectral decompositions
// with degeneracy grouping, partial traces, tensor embeddings, Schatten norms,
// and matrix representations of superoperators with their induced norms.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fuzzproc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Spectral data of a Hermitian operator with eigenvalues merged into distinct
// levels: H = sum_n energies[n] * projectors[n].
struct SpectralDecomposition {
    std::vector<Matrix> projectors;  // orthogonal projectors P_n
    std::vector<double> energies;    // distinct level energies E_n
    int dim = 0;

    int levelCount() const { return static_cast<int>(energies.size()); }

    // Reassembles sum_n E_n P_n (with optionally substituted energies).
    Matrix hamiltonian() const;
    Matrix hamiltonian(const std::vector<double>& altEnergies) const;

    // Level populations tr(P_n rho).
    std::vector<double> populations(const Matrix& rho) const;
};

// Hermitian eigendecomposition with relative-gap degeneracy clustering.
// Eigenvalues closer than degeneracyTol * spectralRange are merged into one
// level. Throws std::invalid_argument if H is not Hermitian within hermTol.
SpectralDecomposition spectralDecompose(const Matrix& H,
                                        double degeneracyTol = 1e-9,
                                        double hermTol = 1e-12);

// Schatten norms.
double operatorNorm(const Matrix& X);   // largest singular value
double frobeniusNorm(const Matrix& X);  // sqrt(tr X X^dag)

// Kronecker product, row-major factor ordering (left factor is the slow index).
Matrix kron(const Matrix& A, const Matrix& B);

// Identity of dimension d.
Matrix identity(int d);

// Partial trace over the factors NOT in `keep`. factorDims lists the tensor
// factor dimensions in order; `keep` lists the (sorted, unique) factor indices
// to retain. tr(result) == tr(X).
Matrix partialTrace(const Matrix& X, const std::vector<int>& factorDims,
                    const std::vector<int>& keep);

// Embeds an operator K acting on S (x) Gamma into the fixed global factor
// ordering E (x) S (x) Gamma, i.e. returns 1_E (x) K.
Matrix embedOperation(const Matrix& K, int dimE, int dimS, int dimGamma);

// Matrix representation of a superoperator in the column-stacking vectorization
// with the matrix-unit basis: vec(X) stacks columns, so vec(A X B) =
// (B^T kron A) vec(X). The basis is orthonormal under the Hilbert-Schmidt
// inner product, hence inducedNorm == largest singular value of `rep`.
struct Superoperator {
    int dim = 0;  // operator-space dimension d; rep is d^2 x d^2
    Matrix rep;

    Matrix apply(const Matrix& X) const;

    Superoperator operator*(const Superoperator& rhs) const;  // composition
    Superoperator operator+(const Superoperator& rhs) const;
    Superoperator operator-(const Superoperator& rhs) const;

    static Superoperator identity(int d);
    // Representation of X -> A X B.
    static Superoperator sandwich(const Matrix& A, const Matrix& B);
    // Builds the matrix representation by applying `fn` to every matrix unit.
    static Superoperator fromFunction(int d,
                                      const std::function<Matrix(const Matrix&)>& fn);
};

// Largest singular value of the matrix representation, i.e. the norm induced
// by the Frobenius norm on operators.
double inducedNorm(const Superoperator& S);

// Matrix-free variant: power iteration on X^dag X given the map and its
// Hilbert-Schmidt adjoint, acting on d x d operators. Used where forming the
// d^2 x d^2 representation would be wasteful.
double inducedNorm(int d, const std::function<Matrix(const Matrix&)>& apply,
                   const std::function<Matrix(const Matrix&)>& applyAdjoint,
                   double tol = 1e-13, int maxIter = 20000);

namespace detail {
// vec/unvec helpers for the column-stacking convention.
Vector vec(const Matrix& X);
Matrix unvec(const Vector& v, int rows, int cols);
}  // namespace detail

}  // namespace fuzzproc
