#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fuzzproc/ensemble.hpp"
#include "fuzzproc/equilibration_bounds.hpp"
#include "fuzzproc/rng.hpp"

#include <cmath>

using namespace fuzzproc;

namespace {

EnsembleParams baseParams(int dE, int dGamma, int k, DistributionFamily family,
                          EnsembleParams::OpKind opKind) {
    EnsembleParams p;
    p.dimE = dE;
    p.dimGamma = dGamma;
    p.k = k;
    p.family = family;
    p.opKind = opKind;
    return p;
}

}  // namespace

TEST_CASE("single-time bound: diagonal states and trivial observables give zero") {
    auto rng = makeRng(151);
    const auto spec = spectralDecompose(randomHermitian(4, rng));
    const WaitingTimeDistribution dist{DistributionFamily::UniformWindow, 1.0, 4.0};

    Matrix diag = Matrix::Zero(4, 4);
    for (int n = 0; n < spec.levelCount(); ++n)
        diag += spec.projectors[n] * randomDensityMatrix(4, 4, rng) * spec.projectors[n];
    diag /= diag.trace();
    const Matrix A = randomHermitian(4, rng);
    CHECK(singleTimeBound(diag, spec, dist, A).lhs < 1e-12);

    const Matrix rho = randomDensityMatrix(4, 4, rng);
    CHECK(singleTimeBound(rho, spec, dist, identity(4)).lhs < 1e-12);
}

TEST_CASE("single-time bound: lhs <= rhs on random instances") {
    auto rng = makeRng(157);
    for (int trial = 0; trial < 20; ++trial) {
        const auto spec = spectralDecompose(randomHermitian(4, rng));
        const WaitingTimeDistribution dist{DistributionFamily::UniformWindow,
                                           uniformIn(rng, 0.5, 3.0),
                                           uniformIn(rng, 0.5, 6.0)};
        const Matrix rho = randomDensityMatrix(4, 4, rng);
        const Matrix A = randomHermitian(4, rng);
        const auto b = singleTimeBound(rho, spec, dist, A);
        CHECK(b.lhs <= b.rhs + 1e-10);
        CHECK(b.fuzzScale <= 1.0 + 1e-12);
    }
    CHECK_THROWS_AS(
        singleTimeBound(randomDensityMatrix(4, 4, rng),
                        spectralDecompose(randomHermitian(4, rng)),
                        WaitingTimeDistribution{DistributionFamily::Delta, 1.0, 0.0},
                        randomGinibre(4, 4, rng)),
        std::invalid_argument);
}

TEST_CASE("fluctuation bound: limits and window counting") {
    const auto spec = spectralDecompose(
        buildHamiltonian({HamiltonianKind::DiagonalSpectrum, 1, 4, {0, 1.1, 2.9, 4.0}, 0}));
    auto rng = makeRng(163);
    const Matrix rho = randomDensityMatrix(4, 4, rng);
    const Matrix A = randomHermitian(4, rng);

    // Large eps*T sends f -> 1.
    const double loose = shortFarrellyBound(rho, spec, 0.5, 1e12, A);
    const double n05 = gapStatistics(spec).nOfEpsilon(0.5);
    const double expected =
        operatorNorm(A) * operatorNorm(A) * n05 / effectiveDimension(rho, spec);
    CHECK(loose == doctest::Approx(expected).epsilon(1e-6));

    // The gap 1.1 occurs twice (1.1-0 and 4.0-2.9), so even a narrow window
    // holds two gaps; a spectrum with all-distinct gaps holds one.
    CHECK(gapStatistics(spec).nOfEpsilon(0.05) == 2);
    const auto distinct = spectralDecompose(
        buildHamiltonian({HamiltonianKind::DiagonalSpectrum, 1, 3, {0, 1.0, 3.2}, 0}));
    CHECK(gapStatistics(distinct).nOfEpsilon(0.05) == 1);
    CHECK_THROWS_AS(shortFarrellyBound(rho, spec, -1.0, 1.0, A), std::invalid_argument);
}

TEST_CASE("multi-time bound: identity operations collapse the right-hand side") {
    for (int k : {1, 2}) {
        const auto spec = randomProcessSpec(
            baseParams(2, 1, k, DistributionFamily::UniformWindow,
                       EnsembleParams::OpKind::Identity),
            60 + k);
        const auto report = multiTimeBound(spec);
        for (double b : report.termsB) CHECK(b <= 1e-12);
        for (double c : report.termsC) CHECK(c <= 1e-12);
        CHECK(report.rhsTotal == doctest::Approx(report.termA).epsilon(1e-9));
        // Pure initial state and pure ancilla: ||varrho - varpi||_2^2 <= 1 - 1/(dE dS).
        const double cap = std::sqrt(1.0 - 1.0 / (spec.dimE * spec.dimS));
        CHECK(report.termA <= report.sFactorTotal * cap + 1e-10);
        CHECK(report.slack >= -1e-9);
    }
}

TEST_CASE("multi-time bound: k = 0 reduces to the single-time form") {
    const auto spec = randomProcessSpec(
        baseParams(4, 2, 0, DistributionFamily::UniformWindow,
                   EnsembleParams::OpKind::WeightedMeasurement),
        67);
    const auto report = multiTimeBound(spec);
    CHECK(report.termsB.empty());
    CHECK(report.termsC.empty());
    const double expected = report.sFactors[0] * report.opNormFull * report.stateDistance;
    CHECK(report.rhsTotal == doctest::Approx(expected).epsilon(1e-10));
    CHECK(report.slack >= -1e-9);
}

TEST_CASE("multi-time bound: random ensemble slice with every term checked") {
    int idx = 0;
    for (auto family : {DistributionFamily::UniformWindow, DistributionFamily::HalfNormal,
                        DistributionFamily::Delta}) {
        for (auto opKind : {EnsembleParams::OpKind::WeightedMeasurement,
                            EnsembleParams::OpKind::SubChannel}) {
            const auto spec =
                randomProcessSpec(baseParams(4, 2, 2, family, opKind), 900 + idx++);
            const auto report = multiTimeBound(spec);
            CHECK(report.slack >= -1e-9);
            CHECK(report.lhs >= 0.0);
            CHECK(report.termA >= 0.0);
            REQUIRE(report.termsB.size() == 2);
            REQUIRE(report.termsC.size() == 2);
            REQUIRE(report.auxiliaryC.size() == 2);
            double rhs = report.termA;
            for (int l = 0; l < 2; ++l) {
                CHECK(report.opNorms[l] >= 0.0);
                rhs += report.opNorms[l] * (report.termsB[l] + report.termsC[l]);
            }
            CHECK(report.rhsTotal == doctest::Approx(rhs).epsilon(1e-12));
            // The composed norm never exceeds the product of step norms.
            CHECK(report.opNormFull <= report.opNormProduct + 1e-9);
            double sTotal = 1.0;
            for (double s : report.sFactors) sTotal *= s;
            CHECK(report.sFactorTotal == doctest::Approx(sTotal).epsilon(1e-12));
        }
    }
}

TEST_CASE("multi-time bound: per-step energies and fuzziness (inhomogeneous form)") {
    auto params = baseParams(4, 2, 2, DistributionFamily::UniformWindow,
                             EnsembleParams::OpKind::WeightedMeasurement);
    params.perStepEnergies = true;
    auto spec = randomProcessSpec(params, 71);
    spec.steps[1].dist.fuzziness = 2.5;
    spec.steps[2].dist = {DistributionFamily::HalfNormal, 0.3, 1.7};
    const auto report = multiTimeBound(spec);
    CHECK(report.slack >= -1e-9);
    // Distinct steps produce distinct per-step damping factors.
    CHECK(std::abs(report.sFactors[1] - report.sFactors[2]) > 1e-6);
}

TEST_CASE("auxiliary bounds dominate the C terms") {
    for (int seed : {81, 82, 83}) {
        const auto spec = randomProcessSpec(
            baseParams(2, 2, 2, DistributionFamily::UniformWindow,
                       EnsembleParams::OpKind::WeightedMeasurement),
            seed);
        const auto report = multiTimeBound(spec);
        for (int l = 0; l < 2; ++l) {
            const auto aux = auxiliaryCBounds(spec, l);
            CHECK(aux.fourTerm == doctest::Approx(report.auxiliaryC[l].fourTerm));
            CHECK(report.termsC[l] <= aux.fourTerm + 1e-10);
            CHECK(report.termsC[l] <= aux.commutatorForm + 1e-10);
        }
        CHECK_THROWS_AS(auxiliaryCBounds(spec, 5), std::out_of_range);
    }
}

TEST_CASE("auxiliary bounds: energy-diagonal operations kill the commutator") {
    // Kraus operators built from the energy projectors commute with the
    // dephasing, so C_l = 0 and the commutator-form bound is 0 too.
    ProcessSpec spec;
    spec.dimE = 2;
    spec.dimS = 2;
    spec.dimGamma = 1;
    auto rng = makeRng(167);
    const Vector psi = randomPureState(4, rng);
    spec.rho = psi * psi.adjoint();
    spec.gamma = Matrix::Ones(1, 1);
    spec.base = spectralDecompose(
        buildHamiltonian({HamiltonianKind::DiagonalSpectrum, 2, 2, {0, 1.3, 2.1, 3.7}, 0}));

    // The Hamiltonian is diagonal in the computational basis, so diagonal
    // Kraus operators on S commute with every energy projector.
    WeightedOperation diagOp;
    for (int b = 0; b < 2; ++b) {
        Matrix K = Matrix::Zero(2, 2);
        K(b, b) = 1.0;
        diagOp.kraus.push_back(K);
        diagOp.weights.push_back(b == 0 ? 1.0 : -1.0);
    }
    for (int l = 0; l < 3; ++l) {
        ProcessStep step;
        step.energies = spec.base.energies;
        step.dist = {DistributionFamily::UniformWindow, 1.0, 2.0};
        spec.steps.push_back(step);
        spec.operations.push_back(diagOp);
    }
    const auto report = multiTimeBound(spec);
    for (int l = 0; l < 2; ++l) {
        CHECK(report.termsC[l] <= 1e-10);
        CHECK(report.auxiliaryC[l].commutatorForm <= 1e-8);
    }
}

TEST_CASE("B-term decay: majorant holds and both sides vanish for wide windows") {
    auto spec = randomProcessSpec(
        baseParams(2, 1, 2, DistributionFamily::UniformWindow,
                   EnsembleParams::OpKind::WeightedMeasurement),
        91);
    const auto rows = bTermDecay(spec);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.termB <= row.majorant + 1e-10);
        CHECK(row.sFactorTail <= 1.0 + 1e-12);
    }
    // S_{k:k} for l = k-1 is the last step's own factor.
    const auto report = multiTimeBound(spec);
    CHECK(rows[1].sFactorTail == doctest::Approx(report.sFactors[2]).epsilon(1e-12));

    // Delta distributions majorize with S = 1.
    auto deltaSpec = randomProcessSpec(
        baseParams(2, 1, 2, DistributionFamily::Delta,
                   EnsembleParams::OpKind::WeightedMeasurement),
        92);
    for (const auto& row : bTermDecay(deltaSpec)) {
        CHECK(row.sFactorTail == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(row.termB <= row.majorant + 1e-10);
    }

    // Wide windows: both the term and its majorant decay along a log grid.
    double prevB = 1e9, prevM = 1e9;
    const double minGap = gapStatistics(spec.fullStepSpec(0)).minGap;
    for (double x : {1e2, 1e3, 1e4}) {
        for (auto& step : spec.steps) {
            step.dist.fuzziness = x / minGap;
            step.dist.tau = step.dist.fuzziness;
        }
        const auto decay = bTermDecay(spec);
        CHECK(decay[0].termB <= prevB + 1e-12);
        CHECK(decay[0].majorant <= prevM + 1e-12);
        prevB = decay[0].termB;
        prevM = decay[0].majorant;
    }
    CHECK(prevM < 1e-2);
}

TEST_CASE("purity cap on the state distance for pure ancilla inputs") {
    for (int seed : {95, 96, 97}) {
        auto params = baseParams(4, 2, 1, DistributionFamily::UniformWindow,
                                 EnsembleParams::OpKind::Channel);
        params.purity = false;  // mixed rho, pure gamma
        const auto spec = randomProcessSpec(params, seed);
        const auto report = multiTimeBound(spec);
        const double cap2 = 1.0 - 1.0 / (spec.dimE * spec.dimS);
        CHECK(report.stateDistance * report.stateDistance <= cap2 + 1e-10);
    }
}
