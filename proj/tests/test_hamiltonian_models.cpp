#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fuzzproc/ensemble.hpp"
#include "fuzzproc/fuzzy_averaging.hpp"
#include "fuzzproc/hamiltonian_models.hpp"
#include "fuzzproc/rng.hpp"

#include <algorithm>

using namespace fuzzproc;

namespace {

SpectralDecomposition diagSpec(const std::vector<double>& energies) {
    Matrix H = Matrix::Zero(energies.size(), energies.size());
    for (std::size_t i = 0; i < energies.size(); ++i) H(i, i) = energies[i];
    return spectralDecompose(H);
}

}  // namespace

TEST_CASE("diagonal spectrum model is the literal diagonal") {
    const Matrix H =
        buildHamiltonian({HamiltonianKind::DiagonalSpectrum, 2, 2, {0, 1, 2, 3}, 0});
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(H(i, j) == Complex(i == j ? i : 0.0, 0.0));
}

TEST_CASE("random Gaussian Hermitian: Hermitian and seed-deterministic") {
    HamiltonianModel model{HamiltonianKind::RandomGaussianHermitian, 4, 2, {}, 42};
    const Matrix H1 = buildHamiltonian(model);
    const Matrix H2 = buildHamiltonian(model);
    CHECK((H1 - H1.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((H1 - H2).cwiseAbs().maxCoeff() == 0.0);
    model.seed = 43;
    CHECK((H1 - buildHamiltonian(model)).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("Heisenberg chain matches a term-by-term independent construction") {
    const double J = 1.0, h = 0.35;
    const Matrix H = buildHamiltonian({HamiltonianKind::HeisenbergChain, 2, 4, {J, h}, 0});

    // Oracle: explicit 8x8 sum over the two bonds and three fields, assembled
    // with raw loops over computational basis states (bit i = qubit i, qubit 0
    // is the slowest index).
    const int n = 3, d = 8;
    Matrix oracle = Matrix::Zero(d, d);
    auto bit = [&](int state, int q) { return (state >> (n - 1 - q)) & 1; };
    for (int a = 0; a < d; ++a) {
        for (int q = 0; q + 1 < n; ++q) {
            const int ba = bit(a, q), bb = bit(a, q + 1);
            // ZZ diagonal
            oracle(a, a) += J * (ba == bb ? 1.0 : -1.0);
            // XX + YY flips anti-aligned neighbours with coefficient 2J
            if (ba != bb) {
                const int flipped = a ^ (1 << (n - 1 - q)) ^ (1 << (n - 1 - q - 1));
                oracle(flipped, a) += 2.0 * J;
            }
        }
        for (int q = 0; q < n; ++q) oracle(a, a) += h * (bit(a, q) == 0 ? 1.0 : -1.0);
    }

    std::vector<double> evH, evO;
    Eigen::SelfAdjointEigenSolver<Matrix> esH(H), esO(oracle);
    for (int i = 0; i < d; ++i) {
        evH.push_back(esH.eigenvalues()(i));
        evO.push_back(esO.eigenvalues()(i));
    }
    for (int i = 0; i < d; ++i) CHECK(evH[i] == doctest::Approx(evO[i]).epsilon(1e-10));
    CHECK(frobeniusNorm(H - oracle) < 1e-12);
}

TEST_CASE("Heisenberg chain rejects non-power-of-two dimensions") {
    CHECK_THROWS_AS(buildHamiltonian({HamiltonianKind::HeisenbergChain, 3, 2, {1.0, 0.0}, 0}),
                    std::invalid_argument);
}

TEST_CASE("gap statistics: two-level spectrum") {
    const auto stats = gapStatistics(diagSpec({0, 1}));
    REQUIRE(stats.gaps.size() == 2);
    CHECK(stats.gaps[0] == doctest::Approx(-1.0));
    CHECK(stats.gaps[1] == doctest::Approx(1.0));
    CHECK(stats.minGap == doctest::Approx(1.0));
    CHECK(stats.nOfEpsilon(0.5) == 1);
}

TEST_CASE("gap statistics: coincident gaps both counted") {
    const auto stats = gapStatistics(diagSpec({0, 1, 2}));
    std::vector<double> positive;
    for (double g : stats.gaps)
        if (g > 0) positive.push_back(g);
    std::sort(positive.begin(), positive.end());
    REQUIRE(positive.size() == 3);
    CHECK(positive[0] == doctest::Approx(1.0));
    CHECK(positive[1] == doctest::Approx(1.0));
    CHECK(positive[2] == doctest::Approx(2.0));
    CHECK(stats.nOfEpsilon(0.5) == 2);

    // Brute-force window sweep oracle over a fine grid of anchor positions.
    for (double eps : {0.5, 1.0, 1.5, 2.5}) {
        int best = 0;
        for (double lo = -2.5; lo <= 2.5; lo += 1e-3) {
            int count = 0;
            for (double g : stats.gaps)
                if (g >= lo && g < lo + eps) ++count;
            best = std::max(best, count);
        }
        CHECK(stats.nOfEpsilon(eps) >= best);
    }
}

TEST_CASE("gap statistics: single level has no gaps") {
    const auto stats = gapStatistics(spectralDecompose(identity(3)));
    CHECK(stats.gaps.empty());
    CHECK(stats.minGap == 0.0);
    CHECK(stats.nOfEpsilon(1.0) == 0);
}

TEST_CASE("gap statistics: N(eps) nondecreasing, sign-symmetric gap set") {
    auto rng = makeRng(61);
    const auto spec = spectralDecompose(randomHermitian(6, rng));
    const auto stats = gapStatistics(spec);
    for (double g : stats.gaps)
        CHECK(std::count_if(stats.gaps.begin(), stats.gaps.end(), [&](double x) {
                  return std::abs(x + g) < 1e-12;
              }) >= 1);
    int prev = 0;
    for (double eps = 0.1; eps < 5.0; eps += 0.1) {
        const int cur = stats.nOfEpsilon(eps);
        CHECK(cur >= prev);
        prev = cur;
    }
    if (spec.levelCount() > 1) CHECK(stats.nOfEpsilon(stats.minGap * 1.001) >= 1);
}

TEST_CASE("effective dimension: eigenstate and balanced superposition") {
    const auto spec = diagSpec({0, 1});
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    CHECK(effectiveDimension(rho, spec) == doctest::Approx(1.0).epsilon(1e-12));

    Matrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    CHECK(effectiveDimension(plus, spec) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("effective dimension: purity-of-dephased-state oracle for pure states") {
    auto rng = makeRng(67);
    const auto spec = spectralDecompose(randomHermitian(6, rng));
    for (int trial = 0; trial < 10; ++trial) {
        const Vector psi = randomPureState(6, rng);
        const Matrix rho = psi * psi.adjoint();
        const Matrix omega = buildDephasing(spec).apply(rho);
        const double dEffInv = 1.0 / effectiveDimension(rho, spec);
        CHECK(dEffInv == doctest::Approx((omega * omega).trace().real()).epsilon(1e-10));
    }
}

TEST_CASE("effective dimension: hierarchy 1 <= dEff <= levels <= dim") {
    auto rng = makeRng(71);
    const auto spec = spectralDecompose(randomHermitian(6, rng));
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix rho = randomDensityMatrix(6, 3, rng);
        const double dEff = effectiveDimension(rho, spec);
        CHECK(dEff >= 1.0 - 1e-10);
        CHECK(dEff <= spec.levelCount() + 1e-10);
        CHECK(spec.levelCount() <= 6);

        // General inequality: purity of the dephased state never exceeds the
        // inverse participation ratio.
        const Matrix omega = buildDephasing(spec).apply(rho);
        CHECK((omega * omega).trace().real() <= 1.0 / dEff + 1e-10);
    }
}

TEST_CASE("effective dimension: invalid density operators rejected") {
    const auto spec = diagSpec({0, 1});
    CHECK_THROWS_AS(effectiveDimension(2.0 * identity(2), spec), std::invalid_argument);
    Matrix notPsd(2, 2);
    notPsd << 1.5, 0, 0, -0.5;
    CHECK_THROWS_AS(effectiveDimension(notPsd, spec), std::invalid_argument);
}
