#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fuzzproc/ensemble.hpp"
#include "fuzzproc/operator_core.hpp"
#include "fuzzproc/rng.hpp"

using namespace fuzzproc;

namespace {

// Independent elementwise oracle: (tr_B X)_{ij} = sum_b X_{(i,b),(j,b)} and the
// analogue for keeping the second factor.
Matrix partialTraceOracle(const Matrix& X, int dA, int dB, bool keepFirst) {
    if (keepFirst) {
        Matrix out = Matrix::Zero(dA, dA);
        for (int i = 0; i < dA; ++i)
            for (int j = 0; j < dA; ++j)
                for (int b = 0; b < dB; ++b) out(i, j) += X(i * dB + b, j * dB + b);
        return out;
    }
    Matrix out = Matrix::Zero(dB, dB);
    for (int i = 0; i < dB; ++i)
        for (int j = 0; j < dB; ++j)
            for (int a = 0; a < dA; ++a) out(i, j) += X(a * dB + i, a * dB + j);
    return out;
}

}  // namespace

TEST_CASE("spectral decomposition: exact degeneracy grouping") {
    Matrix H = Matrix::Zero(3, 3);
    H(2, 2) = 1.0;
    const auto spec = spectralDecompose(H);
    REQUIRE(spec.levelCount() == 2);
    CHECK(spec.projectors[0].trace().real() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(spec.projectors[1].trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spec.energies[0] == doctest::Approx(0.0));
    CHECK(spec.energies[1] == doctest::Approx(1.0));
}

TEST_CASE("spectral decomposition: identity collapses to one level") {
    const auto spec = spectralDecompose(identity(4));
    REQUIRE(spec.levelCount() == 1);
    CHECK(frobeniusNorm(spec.projectors[0] - identity(4)) < 1e-12);
}

TEST_CASE("spectral decomposition: random reconstruction and projector algebra") {
    auto rng = makeRng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix H = randomHermitian(6, rng);
        const auto spec = spectralDecompose(H);
        CHECK(frobeniusNorm(H - spec.hamiltonian()) <=
              1e-10 * std::max(1.0, frobeniusNorm(H)));
        Matrix sum = Matrix::Zero(6, 6);
        for (int n = 0; n < spec.levelCount(); ++n) {
            const Matrix& P = spec.projectors[n];
            sum += P;
            CHECK(frobeniusNorm(P * P - P) < 1e-10);
            CHECK(frobeniusNorm(P - P.adjoint()) < 1e-10);
            for (int m = 0; m < n; ++m)
                CHECK(frobeniusNorm(P * spec.projectors[m]) < 1e-10);
        }
        CHECK(frobeniusNorm(sum - identity(6)) < 1e-10);
    }
}

TEST_CASE("spectral decomposition: non-Hermitian input rejected") {
    Matrix H = Matrix::Zero(2, 2);
    H(0, 1) = 1.0;
    CHECK_THROWS_AS(spectralDecompose(H), std::invalid_argument);
}

TEST_CASE("partial trace: product state") {
    auto rng = makeRng(13);
    const Matrix a = randomDensityMatrix(2, 2, rng);
    const Matrix b = randomDensityMatrix(3, 3, rng);
    const Matrix X = kron(a, b);
    CHECK(frobeniusNorm(partialTrace(X, {2, 3}, {0}) - a) < 1e-12);
    CHECK(frobeniusNorm(partialTrace(X, {2, 3}, {1}) - b) < 1e-12);
}

TEST_CASE("partial trace: maximally entangled pair reduces to identity/d") {
    const int d = 3;
    Vector psi = Vector::Zero(d * d);
    for (int i = 0; i < d; ++i) psi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
    const Matrix X = psi * psi.adjoint();
    CHECK(frobeniusNorm(partialTrace(X, {d, d}, {0}) - identity(d) / d) < 1e-12);
    CHECK(frobeniusNorm(partialTrace(X, {d, d}, {1}) - identity(d) / d) < 1e-12);
}

TEST_CASE("partial trace: matches index-sum oracle on random 2x3 states") {
    auto rng = makeRng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix X = randomDensityMatrix(6, 6, rng);
        CHECK(frobeniusNorm(partialTrace(X, {2, 3}, {0}) -
                            partialTraceOracle(X, 2, 3, true)) < 1e-12);
        CHECK(frobeniusNorm(partialTrace(X, {2, 3}, {1}) -
                            partialTraceOracle(X, 2, 3, false)) < 1e-12);
        CHECK(std::abs((partialTrace(X, {2, 3}, {0}) - Matrix::Zero(2, 2)).trace() -
                       X.trace()) < 1e-12);
    }
}

TEST_CASE("partial trace: linear on random combinations") {
    auto rng = makeRng(19);
    const Matrix X = randomDensityMatrix(6, 6, rng);
    const Matrix Y = randomDensityMatrix(6, 6, rng);
    const Complex c(0.3, -1.2);
    CHECK(frobeniusNorm(partialTrace(X + c * Y, {2, 3}, {1}) -
                        (partialTrace(X, {2, 3}, {1}) + c * partialTrace(Y, {2, 3}, {1}))) <
          1e-12);
}

TEST_CASE("partial trace: dimension mismatch names the problem") {
    CHECK_THROWS_AS(partialTrace(identity(5), {2, 3}, {0}), std::invalid_argument);
}

TEST_CASE("Schatten norms: fixed values and SVD consistency") {
    Matrix X = Matrix::Zero(2, 2);
    X(0, 0) = 3.0;
    X(1, 1) = -4.0;
    CHECK(operatorNorm(X) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(frobeniusNorm(X) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(operatorNorm(Matrix::Zero(3, 3)) == 0.0);
    CHECK(frobeniusNorm(Matrix::Zero(3, 3)) == 0.0);

    auto rng = makeRng(23);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix M = randomGinibre(4, 4, rng);
        Eigen::JacobiSVD<Matrix> svd(M);
        const double frob2 = svd.singularValues().squaredNorm();
        CHECK(frobeniusNorm(M) * frobeniusNorm(M) == doctest::Approx(frob2).epsilon(1e-10));
        CHECK(operatorNorm(M) <= frobeniusNorm(M) + 1e-12);
        CHECK(frobeniusNorm(M) <= 2.0 * operatorNorm(M) + 1e-12);  // sqrt(d) = 2
    }
}

TEST_CASE("embedding: identity, trivial environment, Kronecker oracle") {
    CHECK(frobeniusNorm(embedOperation(identity(6), 2, 3, 2) - identity(12)) < 1e-14);
    auto rng = makeRng(29);
    const Matrix K = randomGinibre(4, 4, rng);
    CHECK(frobeniusNorm(embedOperation(K, 1, 2, 2) - K) < 1e-14);

    Matrix sx(2, 2);
    sx << 0, 1, 1, 0;
    const Matrix embedded = embedOperation(sx, 2, 2, 1);
    Matrix oracle = Matrix::Zero(4, 4);
    // 1_2 (x) sigma_x assembled by hand.
    oracle(0, 1) = oracle(1, 0) = oracle(2, 3) = oracle(3, 2) = 1.0;
    CHECK(frobeniusNorm(embedded - oracle) < 1e-14);
}

TEST_CASE("superoperator: identity and unitary conjugation have norm 1") {
    CHECK(inducedNorm(Superoperator::identity(3)) == doctest::Approx(1.0).epsilon(1e-10));
    auto rng = makeRng(31);
    const Matrix U = randomUnitary(3, rng);
    const auto conj = Superoperator::sandwich(U, U.adjoint());
    CHECK(inducedNorm(conj) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("superoperator: representation faithfulness on random inputs") {
    auto rng = makeRng(37);
    const Matrix A = randomGinibre(3, 3, rng);
    const Matrix B = randomGinibre(3, 3, rng);
    const auto S = Superoperator::sandwich(A, B);
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix X = randomGinibre(3, 3, rng);
        CHECK(frobeniusNorm(S.apply(X) - A * X * B) <= 1e-11);
    }
}

TEST_CASE("superoperator: composition and arithmetic match direct evaluation") {
    auto rng = makeRng(41);
    const Matrix A = randomGinibre(2, 2, rng), B = randomGinibre(2, 2, rng);
    const Matrix C = randomGinibre(2, 2, rng), D = randomGinibre(2, 2, rng);
    const auto S1 = Superoperator::sandwich(A, B);
    const auto S2 = Superoperator::sandwich(C, D);
    const Matrix X = randomGinibre(2, 2, rng);
    CHECK(frobeniusNorm((S1 * S2).apply(X) - A * (C * X * D) * B) < 1e-11);
    CHECK(frobeniusNorm((S1 + S2).apply(X) - (A * X * B + C * X * D)) < 1e-11);
    CHECK(frobeniusNorm((S1 - S2).apply(X) - (A * X * B - C * X * D)) < 1e-11);
}

TEST_CASE("induced norm: dephasing map SVD value vs random-search lower bound") {
    const auto spec = spectralDecompose(
        buildHamiltonian({HamiltonianKind::DiagonalSpectrum, 1, 3, {0.0, 1.3, 2.9}, 0}));
    Superoperator dephase = Superoperator::fromFunction(3, [&](const Matrix& X) {
        Matrix out = Matrix::Zero(3, 3);
        for (const auto& P : spec.projectors) out += P * X * P;
        return out;
    });
    const double svdValue = inducedNorm(dephase);

    auto rng = makeRng(43);
    double best = 0.0;
    // Random unit-ball candidates plus the matrix units (pure random sampling
    // in 9 complex dimensions does not get close enough to the maximizer).
    for (int trial = 0; trial < 10000; ++trial) {
        Matrix sigma = randomGinibre(3, 3, rng);
        sigma /= frobeniusNorm(sigma);
        best = std::max(best, frobeniusNorm(dephase.apply(sigma)));
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Matrix unit = Matrix::Zero(3, 3);
            unit(i, j) = 1.0;
            best = std::max(best, frobeniusNorm(dephase.apply(unit)));
        }
    CHECK(best <= svdValue + 1e-10);
    CHECK(best >= svdValue - 1e-3);
}

TEST_CASE("induced norm: matrix-free power iteration agrees with dense SVD") {
    auto rng = makeRng(47);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix A = randomGinibre(3, 3, rng);
        const Matrix B = randomGinibre(3, 3, rng);
        const auto dense = Superoperator::sandwich(A, B);
        const double wanted = inducedNorm(dense);
        const double got = inducedNorm(
            3, [&](const Matrix& X) { return A * X * B; },
            [&](const Matrix& X) { return A.adjoint() * X * B.adjoint(); });
        CHECK(got == doctest::Approx(wanted).epsilon(1e-9));
    }
}

TEST_CASE("vec/unvec: column stacking identity vec(AXB) = (B^T kron A) vec(X)") {
    auto rng = makeRng(53);
    const Matrix A = randomGinibre(3, 3, rng), B = randomGinibre(3, 3, rng),
                 X = randomGinibre(3, 3, rng);
    const Vector lhs = detail::vec(A * X * B);
    const Vector rhs = kron(B.transpose(), A) * detail::vec(X);
    CHECK((lhs - rhs).norm() < 1e-12);
    CHECK(frobeniusNorm(detail::unvec(detail::vec(X), 3, 3) - X) < 1e-14);
}
