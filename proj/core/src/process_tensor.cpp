#include "fuzzproc/process_tensor.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fuzzproc {

void WeightedOperation::validate(double tol) const {
    if (kraus.empty()) throw std::invalid_argument("WeightedOperation: no Kraus operators");
    if (kraus.size() != weights.size())
        throw std::invalid_argument("WeightedOperation: weights/Kraus length mismatch");
    const int d = dim();
    Matrix norm = Matrix::Zero(d, d);
    for (const auto& K : kraus) {
        if (K.rows() != d || K.cols() != d)
            throw std::invalid_argument("WeightedOperation: inconsistent Kraus dimensions");
        norm += K.adjoint() * K;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(norm, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().maxCoeff() > 1.0 + tol) {
        std::ostringstream msg;
        msg << "WeightedOperation: sum K^dag K exceeds identity, largest eigenvalue "
            << es.eigenvalues().maxCoeff();
        throw std::invalid_argument(msg.str());
    }
}

Matrix WeightedOperation::apply(const Matrix& X) const {
    const int d = dim();
    Matrix out = Matrix::Zero(d, d);
    for (std::size_t mu = 0; mu < kraus.size(); ++mu)
        out.noalias() += weights[mu] * (kraus[mu] * X * kraus[mu].adjoint());
    return out;
}

Matrix WeightedOperation::applyAdjoint(const Matrix& X) const {
    const int d = dim();
    Matrix out = Matrix::Zero(d, d);
    for (std::size_t mu = 0; mu < kraus.size(); ++mu)
        out.noalias() += weights[mu] * (kraus[mu].adjoint() * X * kraus[mu]);
    return out;
}

Matrix WeightedOperation::normalizationOperator() const {
    const int d = dim();
    Matrix out = Matrix::Zero(d, d);
    for (std::size_t mu = 0; mu < kraus.size(); ++mu)
        out.noalias() += weights[mu] * (kraus[mu].adjoint() * kraus[mu]);
    return out;
}

WeightedOperation WeightedOperation::identityOp(int d) {
    return {{Matrix::Identity(d, d)}, {1.0}};
}

Matrix ProcessSpec::initialState() const { return kron(rho, gamma); }

void ProcessSpec::validate(double tol) const {
    if (dimE <= 0 || dimS <= 0 || dimGamma <= 0)
        throw std::invalid_argument("ProcessSpec: non-positive dimension");
    if (steps.empty()) throw std::invalid_argument("ProcessSpec: no steps");
    if (steps.size() != operations.size())
        throw std::invalid_argument("ProcessSpec: steps and operations counts differ");
    const int dES = dimE * dimS;
    if (rho.rows() != dES || rho.cols() != dES)
        throw std::invalid_argument("ProcessSpec: rho dimension does not match dE*dS");
    if (gamma.rows() != dimGamma || gamma.cols() != dimGamma)
        throw std::invalid_argument("ProcessSpec: gamma dimension does not match dGamma");
    if (base.dim != dES)
        throw std::invalid_argument("ProcessSpec: projectors do not act on dE*dS");
    auto checkState = [&](const Matrix& s, const char* name) {
        if (std::abs(s.trace().real() - 1.0) > tol || std::abs(s.trace().imag()) > tol)
            throw std::invalid_argument(std::string("ProcessSpec: ") + name + " trace is not 1");
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.adjoint()),
                                                 Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol)
            throw std::invalid_argument(std::string("ProcessSpec: ") + name +
                                        " is not positive semidefinite");
    };
    checkState(rho, "rho");
    checkState(gamma, "gamma");
    for (const auto& step : steps) {
        if (static_cast<int>(step.energies.size()) != base.levelCount())
            throw std::invalid_argument("ProcessSpec: step energy vector length mismatch");
        step.dist.validate();
    }
    for (const auto& op : operations) {
        if (op.dim() != dimS * dimGamma)
            throw std::invalid_argument("ProcessSpec: operation does not act on dS*dGamma");
        op.validate();
    }
}

SpectralDecomposition ProcessSpec::stepSpec(int l) const {
    return withEnergies(base, steps.at(l).energies);
}

SpectralDecomposition ProcessSpec::fullStepSpec(int l) const {
    SpectralDecomposition out;
    out.dim = fullDim();
    out.energies = steps.at(l).energies;
    out.projectors.reserve(base.projectors.size());
    for (const auto& P : base.projectors)
        out.projectors.push_back(kron(P, identity(dimGamma)));
    return out;
}

Matrix ProcessSpec::applyOperation(int l, const Matrix& X) const {
    const auto& op = operations.at(l);
    Matrix out = Matrix::Zero(X.rows(), X.cols());
    for (std::size_t mu = 0; mu < op.kraus.size(); ++mu) {
        const Matrix K = embedOperation(op.kraus[mu], dimE, dimS, dimGamma);
        out.noalias() += op.weights[mu] * (K * X * K.adjoint());
    }
    return out;
}

Matrix ProcessSpec::applyOperationAdjoint(int l, const Matrix& X) const {
    const auto& op = operations.at(l);
    Matrix out = Matrix::Zero(X.rows(), X.cols());
    for (std::size_t mu = 0; mu < op.kraus.size(); ++mu) {
        const Matrix K = embedOperation(op.kraus[mu], dimE, dimS, dimGamma);
        out.noalias() += op.weights[mu] * (K.adjoint() * X * K);
    }
    return out;
}

namespace {

// Unitary e^{-iHt} on E (x) S from level data, embedded on the full space.
Matrix stepUnitaryFull(const ProcessSpec& spec, int l, double t) {
    const int dES = spec.dimE * spec.dimS;
    Matrix U = Matrix::Zero(dES, dES);
    for (int n = 0; n < spec.base.levelCount(); ++n)
        U += std::polar(1.0, -spec.steps[l].energies[n] * t) * spec.base.projectors[n];
    return kron(U, identity(spec.dimGamma));
}

}  // namespace

PropagationResult propagate(const ProcessSpec& spec, EvolutionMode mode,
                            const std::vector<double>& times) {
    spec.validate();
    const int k = spec.k();
    if (mode == EvolutionMode::FixedTimes) {
        if (static_cast<int>(times.size()) != k + 1)
            throw std::invalid_argument("propagate: fixedTimes needs k+1 waiting times");
        for (double t : times)
            if (t < 0) throw std::invalid_argument("propagate: negative waiting time");
    }

    PropagationResult out;
    Matrix state = spec.initialState();
    for (int l = 0; l <= k; ++l) {
        switch (mode) {
            case EvolutionMode::Fuzzy:
                state = buildPartialDephasing(spec.fullStepSpec(l), spec.steps[l].dist)
                            .apply(state);
                break;
            case EvolutionMode::Equilibrium:
                state = buildDephasing(spec.fullStepSpec(l)).apply(state);
                break;
            case EvolutionMode::FixedTimes: {
                const Matrix U = stepUnitaryFull(spec, l, times[l]);
                state = U * state * U.adjoint();
                break;
            }
        }
        out.states.push_back(state);
        if (l < k) state = spec.applyOperation(l, state);
    }
    const Complex e = spec.applyOperation(k, state).trace();
    if (std::abs(e.imag()) > 1e-9)
        throw std::runtime_error("propagate: final expectation has a large imaginary part");
    out.finalExpectation = e.real();
    return out;
}

IntermediateStates computeIntermediateStates(const ProcessSpec& spec) {
    IntermediateStates out;
    out.fuzzyStates = propagate(spec, EvolutionMode::Fuzzy).states;
    out.equilibriumStates = propagate(spec, EvolutionMode::Equilibrium).states;
    return out;
}

namespace {

// Choi-circuit workspace: factors [E, S, A_1, B_1, ..., A_k, B_k].
struct ChoiCircuit {
    const ProcessSpec& spec;
    int k;
    long long ancDim;   // dS^(2k)
    long long fullDim;  // dE * dS^(2k+1)

    std::vector<int> factorDims() const {
        std::vector<int> dims{spec.dimE, spec.dimS};
        for (int i = 0; i < 2 * k; ++i) dims.push_back(spec.dimS);
        return dims;
    }

    // Permutation swapping the S factor with A_i (i in 1..k).
    std::vector<long long> swapPermutation(int i) const {
        const auto dims = factorDims();
        const int nf = static_cast<int>(dims.size());
        std::vector<long long> strides(nf, 1);
        for (int f = nf - 2; f >= 0; --f) strides[f] = strides[f + 1] * dims[f + 1];
        const int sFactor = 1, aFactor = 2 * i;  // A_i position in the factor list
        std::vector<long long> perm(fullDim);
        std::vector<int> idx(nf, 0);
        for (long long flat = 0; flat < fullDim; ++flat) {
            long long rest = flat;
            for (int f = 0; f < nf; ++f) {
                idx[f] = static_cast<int>(rest / strides[f]);
                rest %= strides[f];
            }
            std::swap(idx[sFactor], idx[aFactor]);
            long long target = 0;
            for (int f = 0; f < nf; ++f) target += idx[f] * strides[f];
            perm[flat] = target;
        }
        return perm;
    }
};

Matrix applySwap(const Matrix& X, const std::vector<long long>& perm) {
    Matrix out(X.rows(), X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j)
            out(perm[i], perm[j]) = X(i, j);
    return out;
}

// Applies a map on the E (x) S factor of the full Choi workspace.
Matrix applyOnES(const Matrix& X, const std::vector<Matrix>& projectors,
                 const Matrix& coeffs, long long ancDim) {
    const int L = static_cast<int>(projectors.size());
    std::vector<Matrix> embedded(L);
    for (int n = 0; n < L; ++n)
        embedded[n] = kron(projectors[n], identity(static_cast<int>(ancDim)));
    Matrix out = Matrix::Zero(X.rows(), X.cols());
    for (int n = 0; n < L; ++n) {
        const Matrix PnX = embedded[n] * X;
        for (int m = 0; m < L; ++m) {
            if (coeffs(n, m) == Complex(0.0)) continue;
            out.noalias() += coeffs(n, m) * (PnX * embedded[m]);
        }
    }
    return out;
}

}  // namespace

ChoiProcessTensor buildChoi(const ProcessSpec& spec, EvolutionMode mode,
                            const std::vector<double>& times, long long maxChoiDim) {
    spec.validate();
    const int k = spec.k();
    long long choiDim = spec.dimS;
    for (int i = 0; i < 2 * k; ++i) choiDim *= spec.dimS;
    if (choiDim > maxChoiDim) {
        std::ostringstream msg;
        msg << "buildChoi: Choi dimension " << choiDim << " exceeds the memory guard "
            << maxChoiDim;
        throw std::invalid_argument(msg.str());
    }
    if (mode == EvolutionMode::FixedTimes &&
        static_cast<int>(times.size()) != k + 1)
        throw std::invalid_argument("buildChoi: fixedTimes needs k+1 waiting times");

    ChoiCircuit circ{spec, k, choiDim / spec.dimS,
                     static_cast<long long>(spec.dimE) * choiDim};

    // Initial state rho (x) psi^(x k), psi = sum |ii><jj| on each A_i B_i pair.
    Matrix psi = Matrix::Zero(spec.dimS * spec.dimS, spec.dimS * spec.dimS);
    for (int i = 0; i < spec.dimS; ++i)
        for (int j = 0; j < spec.dimS; ++j)
            psi(i * spec.dimS + i, j * spec.dimS + j) = 1.0;
    Matrix state = spec.rho;
    for (int i = 0; i < k; ++i) state = kron(state, psi);

    const long long ancTotal = circ.fullDim / (spec.dimE * spec.dimS);
    for (int l = 0; l <= k; ++l) {
        if (l > 0) state = applySwap(state, circ.swapPermutation(l));
        switch (mode) {
            case EvolutionMode::FixedTimes: {
                const int dES = spec.dimE * spec.dimS;
                Matrix U = Matrix::Zero(dES, dES);
                for (int n = 0; n < spec.base.levelCount(); ++n)
                    U += std::polar(1.0, -spec.steps[l].energies[n] * times[l]) *
                         spec.base.projectors[n];
                const Matrix Ufull = kron(U, identity(static_cast<int>(ancTotal)));
                state = Ufull * state * Ufull.adjoint();
                break;
            }
            case EvolutionMode::Fuzzy: {
                const auto map = buildPartialDephasing(spec.stepSpec(l), spec.steps[l].dist);
                state = applyOnES(state, spec.base.projectors, map.coefficients, ancTotal);
                break;
            }
            case EvolutionMode::Equilibrium: {
                const int L = spec.base.levelCount();
                state = applyOnES(state, spec.base.projectors,
                                  Matrix::Identity(L, L), ancTotal);
                break;
            }
        }
    }

    auto dims = circ.factorDims();
    std::vector<int> keep;
    for (int f = 1; f < static_cast<int>(dims.size()); ++f) keep.push_back(f);
    return {k, spec.dimS, partialTrace(state, dims, keep)};
}

MultiTimeObservable buildObservableTensor(const std::vector<WeightedOperation>& operations,
                                          const Matrix& gamma, int dimS, int dimGamma) {
    if (operations.empty())
        throw std::invalid_argument("buildObservableTensor: empty operation sequence");
    for (const auto& op : operations) {
        if (op.dim() != dimS * dimGamma)
            throw std::invalid_argument("buildObservableTensor: operation dimension mismatch");
        op.validate();
    }
    if (gamma.rows() != dimGamma || gamma.cols() != dimGamma)
        throw std::invalid_argument("buildObservableTensor: gamma dimension mismatch");

    const int k = static_cast<int>(operations.size()) - 1;
    long long choiDim = dimS;
    for (int i = 0; i < 2 * k; ++i) choiDim *= dimS;

    // <t h | K | s g> as a Gamma-block of each Kraus operator.
    auto gammaBlock = [&](const Matrix& K, int t, int s) {
        Matrix B(dimGamma, dimGamma);
        for (int h = 0; h < dimGamma; ++h)
            for (int g = 0; g < dimGamma; ++g)
                B(h, g) = K(t * dimGamma + h, s * dimGamma + g);
        return B;
    };

    const Matrix lastNorm = operations[k].normalizationOperator();

    Matrix lambda = Matrix::Zero(choiDim, choiDim);
    // Leg tuple per intermediate operation l = 0..k-1: input kets/bras (s, s')
    // on the A_{l+1} pair and output kets/bras (t, t') on the B_{l+1} pair.
    // Row legs carry the bras, column legs the kets.
    std::vector<int> legs(4 * k, 0);  // (s, s', t, t') per step
    const long long tuples = [&] {
        long long n = 1;
        for (int i = 0; i < 4 * k; ++i) n *= dimS;
        return n;
    }();
    for (long long tu = 0; tu < tuples; ++tu) {
        long long rest = tu;
        for (int i = 0; i < 4 * k; ++i) {
            legs[i] = static_cast<int>(rest % dimS);
            rest /= dimS;
        }
        // Gamma chain through the intermediate operations.
        Matrix chain = gamma;
        for (int l = 0; l < k; ++l) {
            const int s = legs[4 * l], sp = legs[4 * l + 1];
            const int t = legs[4 * l + 2], tp = legs[4 * l + 3];
            Matrix next = Matrix::Zero(dimGamma, dimGamma);
            const auto& op = operations[l];
            for (std::size_t mu = 0; mu < op.kraus.size(); ++mu)
                next.noalias() += op.weights[mu] *
                                  (gammaBlock(op.kraus[mu], t, s) * chain *
                                   gammaBlock(op.kraus[mu], tp, sp).adjoint());
            chain = next;
        }
        // Ancilla leg offsets within the Choi index (factors S, A_1, B_1, ...).
        long long rowAnc = 0, colAnc = 0;
        for (int l = 0; l < k; ++l) {
            rowAnc = (rowAnc * dimS + legs[4 * l + 1]) * dimS + legs[4 * l + 3];
            colAnc = (colAnc * dimS + legs[4 * l]) * dimS + legs[4 * l + 2];
        }
        for (int u = 0; u < dimS; ++u)
            for (int up = 0; up < dimS; ++up) {
                Complex val = 0.0;
                for (int h = 0; h < dimGamma; ++h)
                    for (int hp = 0; hp < dimGamma; ++hp)
                        val += lastNorm(u * dimGamma + h, up * dimGamma + hp) *
                               chain(hp, h);
                const long long row = u * (choiDim / dimS) + rowAnc;
                const long long col = up * (choiDim / dimS) + colAnc;
                lambda(row, col) += val;
            }
    }
    return {k, dimS, std::move(lambda)};
}

double bornContraction(const MultiTimeObservable& lambda, const ChoiProcessTensor& upsilon,
                       double imagTol) {
    if (lambda.k != upsilon.k || lambda.dimS != upsilon.dimS ||
        lambda.tensor.rows() != upsilon.tensor.rows())
        throw std::invalid_argument("bornContraction: leg structure mismatch");
    const Complex value = (lambda.tensor * upsilon.tensor).trace();
    if (std::abs(value.imag()) > imagTol) {
        std::ostringstream msg;
        msg << "bornContraction: imaginary part " << value.imag() << " exceeds tolerance";
        throw std::runtime_error(msg.str());
    }
    return value.real();
}

}  // namespace fuzzproc
