#include "fuzzproc/ensemble.hpp"

#include "fuzzproc/rng.hpp"

#include <Eigen/QR>

#include <cmath>
#include <stdexcept>

namespace fuzzproc {

Matrix randomGinibre(int rows, int cols, std::mt19937_64& rng) {
    Matrix G(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            G(i, j) = Complex(standardNormal(rng), standardNormal(rng));
    return G;
}

Vector randomPureState(int d, std::mt19937_64& rng) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = Complex(standardNormal(rng), standardNormal(rng));
    return v / v.norm();
}

Matrix randomDensityMatrix(int d, int rank, std::mt19937_64& rng) {
    if (rank < 1 || rank > d) throw std::invalid_argument("randomDensityMatrix: bad rank");
    const Matrix G = randomGinibre(d, rank, rng);
    const Matrix W = G * G.adjoint();
    return W / W.trace();
}

Matrix randomUnitary(int d, std::mt19937_64& rng) {
    const Matrix G = randomGinibre(d, d, rng);
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Q = qr.householderQ();
    const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix phases so the distribution is Haar.
    for (int j = 0; j < d; ++j) {
        const Complex r = R(j, j);
        Q.col(j) *= r / std::abs(r);
    }
    return Q;
}

Matrix randomHermitian(int d, std::mt19937_64& rng) {
    const Matrix G = randomGinibre(d, d, rng);
    return (G + G.adjoint()) / (2.0 * std::sqrt(static_cast<double>(d)));
}

WeightedOperation randomChannel(int d, int nKraus, std::mt19937_64& rng) {
    // Ginibre Kraus set normalized to sum K^dag K = 1.
    std::vector<Matrix> raw;
    Matrix S = Matrix::Zero(d, d);
    for (int mu = 0; mu < nKraus; ++mu) {
        raw.push_back(randomGinibre(d, d, rng));
        S += raw.back().adjoint() * raw.back();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    const Matrix invSqrt = es.operatorInverseSqrt();
    WeightedOperation op;
    for (auto& K : raw) {
        op.kraus.push_back(K * invSqrt);
        op.weights.push_back(1.0);
    }
    return op;
}

WeightedOperation randomWeightedMeasurement(int d, std::mt19937_64& rng) {
    const Matrix U = randomUnitary(d, rng);
    WeightedOperation op;
    for (int j = 0; j < d; ++j) {
        op.kraus.push_back(U.col(j) * U.col(j).adjoint());
        op.weights.push_back(j % 2 == 0 ? 1.0 : -1.0);
    }
    return op;
}

WeightedOperation randomSubChannel(int d, int nKraus, double scale, std::mt19937_64& rng) {
    if (scale < 0.0 || scale > 1.0)
        throw std::invalid_argument("randomSubChannel: scale must be in [0, 1]");
    WeightedOperation op = randomChannel(d, nKraus, rng);
    for (auto& K : op.kraus) K *= std::sqrt(scale);
    return op;
}

ProcessSpec randomProcessSpec(const EnsembleParams& params, std::uint64_t seed) {
    auto rng = makeRng(seed, 0x737065);
    const int dES = params.dimE * params.dimS;
    const int dSG = params.dimS * params.dimGamma;

    ProcessSpec spec;
    spec.dimE = params.dimE;
    spec.dimS = params.dimS;
    spec.dimGamma = params.dimGamma;
    if (params.purity) {
        const Vector psi = randomPureState(dES, rng);
        spec.rho = psi * psi.adjoint();
    } else {
        spec.rho = randomDensityMatrix(dES, dES, rng);
    }
    const Vector chi = randomPureState(params.dimGamma, rng);
    spec.gamma = chi * chi.adjoint();

    const Matrix H = randomHermitian(dES, rng);
    spec.base = spectralDecompose(H);

    for (int l = 0; l <= params.k; ++l) {
        ProcessStep step;
        step.energies = spec.base.energies;
        if (params.perStepEnergies && l > 0) {
            for (double& e : step.energies) e += 0.5 * standardNormal(rng);
        }
        step.dist.family = params.family;
        step.dist.tau = params.tau;
        step.dist.fuzziness =
            params.family == DistributionFamily::Delta ? 0.0 : params.fuzziness;
        spec.steps.push_back(step);

        switch (params.opKind) {
            case EnsembleParams::OpKind::Channel:
                spec.operations.push_back(randomChannel(dSG, 2, rng));
                break;
            case EnsembleParams::OpKind::WeightedMeasurement:
                spec.operations.push_back(randomWeightedMeasurement(dSG, rng));
                break;
            case EnsembleParams::OpKind::SubChannel:
                spec.operations.push_back(randomSubChannel(dSG, 2, 0.8, rng));
                break;
            case EnsembleParams::OpKind::Identity:
                spec.operations.push_back(WeightedOperation::identityOp(dSG));
                break;
        }
    }
    return spec;
}

}  // namespace fuzzproc
