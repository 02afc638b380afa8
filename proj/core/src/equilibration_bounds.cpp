#include "fuzzproc/equilibration_bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace fuzzproc {

namespace {

// ||A_{hi:lo}|| as the induced norm of the composed embedded operations,
// matrix-free on the full E (x) S (x) Gamma space.
double composedOpNorm(const ProcessSpec& spec, int lo, int hi) {
    auto apply = [&spec, lo, hi](const Matrix& X) {
        Matrix y = X;
        for (int l = lo; l <= hi; ++l) y = spec.applyOperation(l, y);
        return y;
    };
    auto applyAdjoint = [&spec, lo, hi](const Matrix& X) {
        Matrix y = X;
        for (int l = hi; l >= lo; --l) y = spec.applyOperationAdjoint(l, y);
        return y;
    };
    return inducedNorm(spec.fullDim(), apply, applyAdjoint);
}

double singleOpNorm(const ProcessSpec& spec, int l) { return composedOpNorm(spec, l, l); }

struct BoundContext {
    std::vector<PartialDephasingMap> fuzzyMaps;  // per step, on the full space
    PartialDephasingMap dephase;                  // D on the full space
    std::vector<Matrix> fuzzyStates;              // varrho_l
    std::vector<Matrix> equilStates;              // varpi_l
    std::vector<double> sFactors;

    explicit BoundContext(const ProcessSpec& spec)
        : dephase(buildDephasing(spec.fullStepSpec(0))) {
        for (int l = 0; l <= spec.k(); ++l) {
            fuzzyMaps.push_back(
                buildPartialDephasing(spec.fullStepSpec(l), spec.steps[l].dist));
            sFactors.push_back(fuzzinessScale(fuzzyMaps.back()));
        }
        auto inter = computeIntermediateStates(spec);
        fuzzyStates = std::move(inter.fuzzyStates);
        equilStates = std::move(inter.equilibriumStates);
    }

    // (G_{k:l+1} - D)(X): the composition of step maps l+1..k minus dephasing.
    Matrix tailDifference(int l, const Matrix& X) const {
        Matrix g = X;
        for (std::size_t j = l + 1; j < fuzzyMaps.size(); ++j) g = fuzzyMaps[j].apply(g);
        return g - dephase.apply(X);
    }
};

BoundReport::AuxC auxiliaryCBoundsImpl(const ProcessSpec& spec, const BoundContext& ctx,
                                       int l) {
    const Matrix& rl = ctx.fuzzyStates[l];
    const Matrix& wl = ctx.equilStates[l];
    const double opNorm = singleOpNorm(spec, l);

    BoundReport::AuxC out;
    // D(varrho_{l+1}) = D A_l(varrho_l) since D absorbs any following G.
    out.fourTerm = frobeniusNorm(ctx.dephase.apply(spec.applyOperation(l, rl))) +
                   frobeniusNorm(ctx.equilStates[l + 1]) +
                   opNorm * (frobeniusNorm(ctx.dephase.apply(rl)) + frobeniusNorm(wl));

    auto apply = [&](const Matrix& X) {
        return ctx.dephase.apply(spec.applyOperation(l, X)) -
               spec.applyOperation(l, ctx.dephase.apply(X));
    };
    auto applyAdjoint = [&](const Matrix& X) {
        return spec.applyOperationAdjoint(l, ctx.dephase.applyAdjoint(X)) -
               ctx.dephase.applyAdjoint(spec.applyOperationAdjoint(l, X));
    };
    const double commNorm = inducedNorm(spec.fullDim(), apply, applyAdjoint);
    out.commutatorForm = commNorm * frobeniusNorm(rl - wl);
    return out;
}

}  // namespace

SingleTimeBound singleTimeBound(const Matrix& rho, const SpectralDecomposition& spec,
                                const WaitingTimeDistribution& dist, const Matrix& A) {
    if ((A - A.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("singleTimeBound: observable is not Hermitian");
    if (rho.rows() != spec.dim || A.rows() != spec.dim)
        throw std::invalid_argument("singleTimeBound: dimension mismatch");

    const auto fuzzy = buildPartialDephasing(spec, dist);
    const auto dephased = buildDephasing(spec);
    const Matrix diff = fuzzy.apply(rho) - dephased.apply(rho);

    SingleTimeBound out;
    out.fuzzScale = fuzzinessScale(fuzzy);
    out.lhs = std::abs((A * diff).trace());
    out.rhs = out.fuzzScale * operatorNorm(A) * frobeniusNorm(rho - dephased.apply(rho));
    return out;
}

double shortFarrellyBound(const Matrix& rho, const SpectralDecomposition& spec,
                          double epsilon, double T, const Matrix& A) {
    if (epsilon <= 0 || T <= 0)
        throw std::invalid_argument("shortFarrellyBound: epsilon and T must be positive");
    const auto gaps = gapStatistics(spec);
    const double f = 1.0 + 8.0 * std::log2(static_cast<double>(spec.levelCount())) /
                               (epsilon * T);
    const double nEps = static_cast<double>(gaps.nOfEpsilon(epsilon));
    const double normA = operatorNorm(A);
    return normA * normA * nEps * f / effectiveDimension(rho, spec);
}

BoundReport multiTimeBound(const ProcessSpec& spec) {
    spec.validate();
    const int k = spec.k();
    BoundContext ctx(spec);

    BoundReport report;
    report.sFactors = ctx.sFactors;
    report.sFactorTotal = 1.0;
    for (double s : ctx.sFactors) report.sFactorTotal *= s;

    const Matrix initial = spec.initialState();
    report.stateDistance = frobeniusNorm(initial - ctx.dephase.apply(initial));

    report.opNormFull = composedOpNorm(spec, 0, k);
    report.opNormProduct = 1.0;
    for (int l = 0; l <= k; ++l) report.opNormProduct *= singleOpNorm(spec, l);

    report.termA = report.sFactorTotal * report.opNormFull * report.stateDistance;

    const double fuzzyExp =
        spec.applyOperation(k, ctx.fuzzyStates[k]).trace().real();
    const double equilExp =
        spec.applyOperation(k, ctx.equilStates[k]).trace().real();
    report.lhs = std::abs(fuzzyExp - equilExp);

    report.rhsTotal = report.termA;
    for (int l = 0; l < k; ++l) {
        const Matrix& rl = ctx.fuzzyStates[l];
        const Matrix commB = ctx.tailDifference(l, spec.applyOperation(l, rl)) -
                             spec.applyOperation(l, ctx.tailDifference(l, rl));
        const double termB = frobeniusNorm(commB);

        const Matrix delta = rl - ctx.equilStates[l];
        const Matrix commC = ctx.dephase.apply(spec.applyOperation(l, delta)) -
                             spec.applyOperation(l, ctx.dephase.apply(delta));
        const double termC = frobeniusNorm(commC);

        const double tailNorm = composedOpNorm(spec, l + 1, k);
        report.termsB.push_back(termB);
        report.termsC.push_back(termC);
        report.opNorms.push_back(tailNorm);
        report.rhsTotal += tailNorm * (termB + termC);
        report.auxiliaryC.push_back(auxiliaryCBoundsImpl(spec, ctx, l));
    }
    report.slack = report.rhsTotal - report.lhs;
    return report;
}

BoundReport::AuxC auxiliaryCBounds(const ProcessSpec& spec, int l) {
    spec.validate();
    if (l < 0 || l >= spec.k())
        throw std::out_of_range("auxiliaryCBounds: step index out of range");
    BoundContext ctx(spec);
    return auxiliaryCBoundsImpl(spec, ctx, l);
}

std::vector<BTermDecay> bTermDecay(const ProcessSpec& spec) {
    spec.validate();
    const int k = spec.k();
    BoundContext ctx(spec);

    std::vector<BTermDecay> out;
    for (int l = 0; l < k; ++l) {
        const Matrix& rl = ctx.fuzzyStates[l];
        const Matrix applied = spec.applyOperation(l, rl);
        const Matrix commB =
            ctx.tailDifference(l, applied) - spec.applyOperation(l, ctx.tailDifference(l, rl));

        double sTail = 1.0;
        for (int j = l + 1; j <= k; ++j) sTail *= ctx.sFactors[j];

        BTermDecay row;
        row.l = l;
        row.termB = frobeniusNorm(commB);
        row.sFactorTail = sTail;
        row.majorant =
            sTail * (singleOpNorm(spec, l) * frobeniusNorm(rl - ctx.dephase.apply(rl)) +
                     frobeniusNorm(applied - ctx.dephase.apply(applied)));
        out.push_back(row);
    }
    return out;
}

}  // namespace fuzzproc
