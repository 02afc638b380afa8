#include "fuzzproc/operator_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fuzzproc {

Matrix SpectralDecomposition::hamiltonian() const { return hamiltonian(energies); }

Matrix SpectralDecomposition::hamiltonian(const std::vector<double>& altEnergies) const {
    if (altEnergies.size() != projectors.size())
        throw std::invalid_argument("energy vector length does not match level count");
    Matrix H = Matrix::Zero(dim, dim);
    for (std::size_t n = 0; n < projectors.size(); ++n)
        H += altEnergies[n] * projectors[n];
    return H;
}

std::vector<double> SpectralDecomposition::populations(const Matrix& rho) const {
    std::vector<double> p(projectors.size());
    for (std::size_t n = 0; n < projectors.size(); ++n)
        p[n] = (projectors[n] * rho).trace().real();
    return p;
}

SpectralDecomposition spectralDecompose(const Matrix& H, double degeneracyTol,
                                        double hermTol) {
    if (H.rows() != H.cols())
        throw std::invalid_argument("spectralDecompose: matrix is not square");
    const double asym = (H - H.adjoint()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if (asym > hermTol * scale) {
        std::ostringstream msg;
        msg << "spectralDecompose: input not Hermitian, max |H - H^dag| = " << asym;
        throw std::invalid_argument(msg.str());
    }
    if (degeneracyTol <= 0)
        throw std::invalid_argument("spectralDecompose: degeneracyTol must be > 0");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (H + H.adjoint()));
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("spectralDecompose: eigensolver failed to converge");

    const auto& vals = solver.eigenvalues();  // ascending
    const auto& vecs = solver.eigenvectors();
    const int d = static_cast<int>(H.rows());
    const double range = vals(d - 1) - vals(0);
    const double gapTol = degeneracyTol * std::max(range, 1e-300);

    SpectralDecomposition out;
    out.dim = d;
    int start = 0;
    for (int i = 1; i <= d; ++i) {
        if (i == d || vals(i) - vals(i - 1) > gapTol) {
            const int width = i - start;
            const Matrix V = vecs.middleCols(start, width);
            out.projectors.push_back(V * V.adjoint());
            double e = 0.0;
            for (int j = start; j < i; ++j) e += vals(j);
            out.energies.push_back(e / width);
            start = i;
        }
    }
    return out;
}

double operatorNorm(const Matrix& X) {
    if (X.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(X);
    return svd.singularValues()(0);
}

double frobeniusNorm(const Matrix& X) { return X.norm(); }

Matrix kron(const Matrix& A, const Matrix& B) {
    Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

Matrix identity(int d) { return Matrix::Identity(d, d); }

Matrix partialTrace(const Matrix& X, const std::vector<int>& factorDims,
                    const std::vector<int>& keep) {
    long long total = 1;
    for (std::size_t f = 0; f < factorDims.size(); ++f) {
        if (factorDims[f] <= 0) {
            std::ostringstream msg;
            msg << "partialTrace: factor " << f << " has non-positive dimension "
                << factorDims[f];
            throw std::invalid_argument(msg.str());
        }
        total *= factorDims[f];
    }
    if (total != X.rows() || X.rows() != X.cols())
        throw std::invalid_argument(
            "partialTrace: product of factor dimensions does not match operator size");

    const int nf = static_cast<int>(factorDims.size());
    std::vector<bool> kept(nf, false);
    for (int k : keep) {
        if (k < 0 || k >= nf) throw std::invalid_argument("partialTrace: keep index out of range");
        kept[k] = true;
    }

    int dKeep = 1, dTrace = 1;
    for (int f = 0; f < nf; ++f) (kept[f] ? dKeep : dTrace) *= factorDims[f];

    // strides[f] = product of dims of factors to the right of f
    std::vector<long long> strides(nf, 1);
    for (int f = nf - 2; f >= 0; --f) strides[f] = strides[f + 1] * factorDims[f + 1];

    // Enumerate kept and traced multi-indices as flat indices into X.
    auto enumerate = [&](bool wantKept) {
        std::vector<long long> offsets{0};
        for (int f = 0; f < nf; ++f) {
            if (kept[f] != wantKept) continue;
            std::vector<long long> next;
            next.reserve(offsets.size() * factorDims[f]);
            for (long long base : offsets)
                for (int v = 0; v < factorDims[f]; ++v)
                    next.push_back(base + v * strides[f]);
            offsets.swap(next);
        }
        return offsets;
    };
    const auto keptOffsets = enumerate(true);
    const auto traceOffsets = enumerate(false);

    Matrix out = Matrix::Zero(dKeep, dKeep);
    for (int i = 0; i < dKeep; ++i)
        for (int j = 0; j < dKeep; ++j) {
            Complex s = 0.0;
            for (long long t : traceOffsets)
                s += X(keptOffsets[i] + t, keptOffsets[j] + t);
            out(i, j) = s;
        }
    return out;
}

Matrix embedOperation(const Matrix& K, int dimE, int dimS, int dimGamma) {
    if (dimE <= 0 || dimS <= 0 || dimGamma <= 0)
        throw std::invalid_argument("embedOperation: dimensions must be positive");
    if (K.rows() != static_cast<Eigen::Index>(dimS) * dimGamma || K.rows() != K.cols())
        throw std::invalid_argument("embedOperation: operator size does not match dS*dGamma");
    return kron(identity(dimE), K);
}

namespace detail {

Vector vec(const Matrix& X) {
    return Eigen::Map<const Vector>(X.data(), X.size());
}

Matrix unvec(const Vector& v, int rows, int cols) {
    return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

}  // namespace detail

Matrix Superoperator::apply(const Matrix& X) const {
    if (X.rows() != dim || X.cols() != dim)
        throw std::invalid_argument("Superoperator::apply: dimension mismatch");
    return detail::unvec(rep * detail::vec(X), dim, dim);
}

Superoperator Superoperator::operator*(const Superoperator& rhs) const {
    if (dim != rhs.dim) throw std::invalid_argument("Superoperator composition: dimension mismatch");
    return {dim, rep * rhs.rep};
}

Superoperator Superoperator::operator+(const Superoperator& rhs) const {
    if (dim != rhs.dim) throw std::invalid_argument("Superoperator sum: dimension mismatch");
    return {dim, rep + rhs.rep};
}

Superoperator Superoperator::operator-(const Superoperator& rhs) const {
    if (dim != rhs.dim) throw std::invalid_argument("Superoperator difference: dimension mismatch");
    return {dim, rep - rhs.rep};
}

Superoperator Superoperator::identity(int d) {
    return {d, Matrix::Identity(static_cast<Eigen::Index>(d) * d,
                                static_cast<Eigen::Index>(d) * d)};
}

Superoperator Superoperator::sandwich(const Matrix& A, const Matrix& B) {
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
        throw std::invalid_argument("Superoperator::sandwich: dimension mismatch");
    // vec(A X B) = (B^T kron A) vec(X)
    return {static_cast<int>(A.rows()), kron(B.transpose(), A)};
}

Superoperator Superoperator::fromFunction(
    int d, const std::function<Matrix(const Matrix&)>& fn) {
    const Eigen::Index d2 = static_cast<Eigen::Index>(d) * d;
    Matrix rep(d2, d2);
    Matrix unit = Matrix::Zero(d, d);
    for (int c = 0; c < d; ++c)
        for (int r = 0; r < d; ++r) {
            unit(r, c) = 1.0;
            rep.col(r + static_cast<Eigen::Index>(c) * d) = detail::vec(fn(unit));
            unit(r, c) = 0.0;
        }
    return {d, rep};
}

double inducedNorm(const Superoperator& S) {
    if (S.rep.rows() != S.rep.cols() ||
        S.rep.rows() != static_cast<Eigen::Index>(S.dim) * S.dim)
        throw std::invalid_argument("inducedNorm: malformed superoperator representation");
    if (S.rep.rows() <= 144) {
        Eigen::JacobiSVD<Matrix> svd(S.rep);
        return svd.singularValues()(0);
    }
    Eigen::BDCSVD<Matrix> svd(S.rep);
    return svd.singularValues()(0);
}

double inducedNorm(int d, const std::function<Matrix(const Matrix&)>& apply,
                   const std::function<Matrix(const Matrix&)>& applyAdjoint,
                   double tol, int maxIter) {
    // Power iteration on M = X^dag X over the operator space, deterministic start.
    Matrix v(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            v(r, c) = Complex(1.0 + 0.25 * ((r * 31 + c * 17) % 7),
                              0.5 - 0.125 * ((r * 13 + c * 5) % 5));
    v /= v.norm();
    double lambda = 0.0;
    for (int it = 0; it < maxIter; ++it) {
        Matrix w = applyAdjoint(apply(v));
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        const double next = norm;  // Rayleigh quotient of unit v equals ||Mv||
        w /= norm;
        if (std::abs(next - lambda) <= tol * std::max(1.0, next) && it > 2) {
            lambda = next;
            break;
        }
        lambda = next;
        v = w;
    }
    return std::sqrt(lambda);
}

}  // namespace fuzzproc
