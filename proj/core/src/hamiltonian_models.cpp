#include "fuzzproc/hamiltonian_models.hpp"

#include "fuzzproc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fuzzproc {

namespace {

Matrix randomGaussianHermitian(int d, std::uint64_t seed) {
    auto rng = makeRng(seed, 0x48616d);
    Matrix A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            A(i, j) = Complex(standardNormal(rng), standardNormal(rng));
    // Symmetrized Ginibre, entry variance ~ 1/d.
    return (A + A.adjoint()) / (2.0 * std::sqrt(static_cast<double>(d)));
}

Matrix heisenbergChain(int d, double coupling, double field) {
    int qubits = 0;
    while ((1 << qubits) < d) ++qubits;
    if ((1 << qubits) != d || qubits < 2)
        throw std::invalid_argument(
            "heisenbergChain: total dimension must be 2^n with n >= 2");

    Matrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, Complex(0, -1), Complex(0, 1), 0;
    sz << 1, 0, 0, -1;

    auto onSite = [&](const Matrix& op, int site) {
        Matrix out = Matrix::Identity(1, 1);
        for (int q = 0; q < qubits; ++q)
            out = kron(out, q == site ? op : identity(2));
        return out;
    };

    Matrix H = Matrix::Zero(d, d);
    for (int q = 0; q + 1 < qubits; ++q)
        H += coupling * (onSite(sx, q) * onSite(sx, q + 1) +
                         onSite(sy, q) * onSite(sy, q + 1) +
                         onSite(sz, q) * onSite(sz, q + 1));
    for (int q = 0; q < qubits; ++q) H += field * onSite(sz, q);
    return H;
}

}  // namespace

Matrix buildHamiltonian(const HamiltonianModel& model) {
    if (model.dimE <= 0 || model.dimS <= 0)
        throw std::invalid_argument("buildHamiltonian: non-positive dimension");
    const int d = model.dim();
    switch (model.kind) {
        case HamiltonianKind::RandomGaussianHermitian:
            return randomGaussianHermitian(d, model.seed);
        case HamiltonianKind::HeisenbergChain: {
            const double J = model.parameters.size() > 0 ? model.parameters[0] : 1.0;
            const double h = model.parameters.size() > 1 ? model.parameters[1] : 0.0;
            return heisenbergChain(d, J, h);
        }
        case HamiltonianKind::DiagonalSpectrum: {
            if (static_cast<int>(model.parameters.size()) != d)
                throw std::invalid_argument(
                    "buildHamiltonian: diagonalSpectrum needs exactly dim energies");
            Matrix H = Matrix::Zero(d, d);
            for (int i = 0; i < d; ++i) H(i, i) = model.parameters[i];
            return H;
        }
    }
    throw std::invalid_argument("buildHamiltonian: unknown model kind");
}

int GapStatistics::nOfEpsilon(double eps) const {
    if (eps <= 0 || gaps.empty()) return 0;
    int best = 0;
    // Window closed on the left, open on the right; anchoring at each gap
    // position is an exhaustive sweep since counts only change there.
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double lo = gaps[i];
        int count = 0;
        for (std::size_t j = i; j < gaps.size() && gaps[j] < lo + eps; ++j) ++count;
        best = std::max(best, count);
    }
    return best;
}

GapStatistics gapStatistics(const SpectralDecomposition& spec) {
    GapStatistics out;
    const int L = spec.levelCount();
    for (int n = 0; n < L; ++n)
        for (int m = 0; m < L; ++m)
            if (n != m) out.gaps.push_back(spec.energies[n] - spec.energies[m]);
    std::sort(out.gaps.begin(), out.gaps.end());
    out.minGap = 0.0;
    for (double g : out.gaps) {
        const double a = std::abs(g);
        if (out.minGap == 0.0 || a < out.minGap) out.minGap = a;
    }
    return out;
}

double effectiveDimension(const Matrix& rho, const SpectralDecomposition& spec,
                          double stateTol) {
    if (rho.rows() != spec.dim || rho.cols() != spec.dim)
        throw std::invalid_argument("effectiveDimension: state dimension mismatch");
    if (std::abs(rho.trace().real() - 1.0) > stateTol ||
        std::abs(rho.trace().imag()) > stateTol)
        throw std::invalid_argument("effectiveDimension: state trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()),
                                             Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -stateTol)
        throw std::invalid_argument("effectiveDimension: state is not positive semidefinite");

    double ipr = 0.0;
    for (double p : spec.populations(rho)) ipr += p * p;
    return 1.0 / ipr;
}

}  // namespace fuzzproc
