#include "fuzzproc/montecarlo.hpp"

#include "fuzzproc/fuzzy_averaging.hpp"
#include "fuzzproc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace fuzzproc {

namespace {

double sampleOne(const WaitingTimeDistribution& d, std::mt19937_64& rng) {
    if (d.family == DistributionFamily::Delta || d.fuzziness == 0.0) return d.tau;
    switch (d.family) {
        case DistributionFamily::UniformWindow: {
            const double lo = std::max(0.0, d.tau - d.fuzziness / 2.0);
            const double hi = d.tau + d.fuzziness / 2.0;
            return uniformIn(rng, lo, hi);
        }
        case DistributionFamily::HalfNormal:
            return d.tau + std::sqrt(d.fuzziness) * std::abs(standardNormal(rng));
        case DistributionFamily::Delta:
            break;
    }
    return d.tau;
}

McEstimate summarize(const std::vector<double>& xs, std::uint64_t seed) {
    McEstimate out;
    out.samples = static_cast<long long>(xs.size());
    out.seed = seed;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / out.samples;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    const double var = out.samples > 1 ? ss / (out.samples - 1) : 0.0;
    out.stderror = std::sqrt(var / out.samples);
    return out;
}

// Orthonormal basis grouped by level, with the level label of each column.
struct LevelBasis {
    Matrix V;                 // columns: eigenvectors
    std::vector<int> levelOf; // per column
};

LevelBasis levelBasis(const SpectralDecomposition& spec) {
    // Diagonalize the level-index operator sum_n n P_n; its eigenvalues are the
    // level labels, so the eigenbasis respects the projector structure.
    Matrix M = Matrix::Zero(spec.dim, spec.dim);
    for (int n = 0; n < spec.levelCount(); ++n)
        M += static_cast<double>(n) * spec.projectors[n];
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    LevelBasis out;
    out.V = es.eigenvectors();
    out.levelOf.resize(spec.dim);
    for (int i = 0; i < spec.dim; ++i)
        out.levelOf[i] = static_cast<int>(std::lround(es.eigenvalues()(i)));
    return out;
}

}  // namespace

std::vector<std::vector<double>> sampleWaitingTimes(
    const std::vector<WaitingTimeDistribution>& dists, long long n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sampleWaitingTimes: n must be >= 1");
    for (const auto& d : dists) d.validate();
    auto rng = makeRng(seed, 0x7361);
    std::vector<std::vector<double>> rows(n, std::vector<double>(dists.size()));
    for (long long i = 0; i < n; ++i)
        for (std::size_t c = 0; c < dists.size(); ++c)
            rows[i][c] = sampleOne(dists[c], rng);
    return rows;
}

McEstimate mcExpectation(const ProcessSpec& spec, long long n, std::uint64_t seed) {
    spec.validate();
    const int k = spec.k();
    const int D = spec.fullDim();

    // Work in a basis where every step Hamiltonian is diagonal: evolution is an
    // elementwise phase on the state, operations are pre-rotated once.
    const LevelBasis basis = levelBasis(spec.base);
    const Matrix W = kron(basis.V, identity(spec.dimGamma));
    std::vector<int> levelOf(D);
    for (int i = 0; i < spec.dimE * spec.dimS; ++i)
        for (int g = 0; g < spec.dimGamma; ++g)
            levelOf[i * spec.dimGamma + g] = basis.levelOf[i];

    const Matrix initial = W.adjoint() * spec.initialState() * W;
    std::vector<std::vector<Matrix>> rotatedKraus(k + 1);
    for (int l = 0; l <= k; ++l)
        for (const auto& K : spec.operations[l].kraus)
            rotatedKraus[l].push_back(
                W.adjoint() * embedOperation(K, spec.dimE, spec.dimS, spec.dimGamma) * W);
    // Final expectation via the rotated normalization operator of A_k.
    Matrix lastNorm = Matrix::Zero(D, D);
    for (std::size_t mu = 0; mu < rotatedKraus[k].size(); ++mu)
        lastNorm += spec.operations[k].weights[mu] *
                    (rotatedKraus[k][mu].adjoint() * rotatedKraus[k][mu]);

    std::vector<WaitingTimeDistribution> dists;
    for (const auto& s : spec.steps) dists.push_back(s.dist);
    const auto rows = sampleWaitingTimes(dists, n, seed);

    Vector phases(D);
    std::vector<double> values;
    values.reserve(n);
    for (const auto& row : rows) {
        Matrix state = initial;
        for (int l = 0; l <= k; ++l) {
            for (int i = 0; i < D; ++i)
                phases(i) =
                    std::polar(1.0, -spec.steps[l].energies[levelOf[i]] * row[l]);
            state = phases.asDiagonal() * state * phases.conjugate().asDiagonal();
            if (l < k) {
                Matrix next = Matrix::Zero(D, D);
                for (std::size_t mu = 0; mu < rotatedKraus[l].size(); ++mu)
                    next.noalias() += spec.operations[l].weights[mu] *
                                      (rotatedKraus[l][mu] * state *
                                       rotatedKraus[l][mu].adjoint());
                state = next;
            }
        }
        values.push_back((lastNorm * state).trace().real());
    }
    return summarize(values, seed);
}

McEstimate mcTimeAveragedVariance(const Matrix& rho, const SpectralDecomposition& spec,
                                  const Matrix& A, double T, long long n,
                                  std::uint64_t seed) {
    if (T <= 0) throw std::invalid_argument("mcTimeAveragedVariance: T must be > 0");
    if (rho.rows() != spec.dim || A.rows() != spec.dim)
        throw std::invalid_argument("mcTimeAveragedVariance: dimension mismatch");

    const LevelBasis basis = levelBasis(spec);
    const Matrix rhoR = basis.V.adjoint() * rho * basis.V;
    const Matrix aR = basis.V.adjoint() * A * basis.V;
    const Matrix omegaR =
        basis.V.adjoint() * buildDephasing(spec).apply(rho) * basis.V;

    auto rng = makeRng(seed, 0x7661);
    Vector phases(spec.dim);
    std::vector<double> values;
    values.reserve(n);
    for (long long i = 0; i < n; ++i) {
        const double t = uniformIn(rng, 0.0, T);
        for (int j = 0; j < spec.dim; ++j)
            phases(j) = std::polar(1.0, -spec.energies[basis.levelOf[j]] * t);
        const Matrix evolved =
            phases.asDiagonal() * rhoR * phases.conjugate().asDiagonal();
        const double x = (aR * (evolved - omegaR)).trace().real();
        values.push_back(x * x);
    }
    return summarize(values, seed);
}

}  // namespace fuzzproc
