// hamiltonian_models.hpp — builders for test Hamiltonians and spectral
// diagnostics: distinct-level count, gap density N(eps), effective dimension.

#pragma once

#include "fuzzproc/operator_core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fuzzproc {

enum class HamiltonianKind { RandomGaussianHermitian, HeisenbergChain, DiagonalSpectrum };

struct HamiltonianModel {
    HamiltonianKind kind = HamiltonianKind::RandomGaussianHermitian;
    int dimE = 1;
    int dimS = 2;
    // RandomGaussianHermitian: unused. HeisenbergChain: {J, h} with dimE*dimS a
    // power of two. DiagonalSpectrum: the energies themselves.
    std::vector<double> parameters;
    std::uint64_t seed = 0;

    int dim() const { return dimE * dimS; }
};

// Hermitian operator on E (x) S, deterministic in `seed`.
Matrix buildHamiltonian(const HamiltonianModel& model);

// All nonzero ordered-pair level differences E_n - E_m plus the sliding-window
// gap count N(eps). The gap list is symmetric under sign by construction.
struct GapStatistics {
    std::vector<double> gaps;  // sorted, nonzero, sign-symmetric
    double minGap = 0.0;       // smallest |gap|; 0 when levelCount == 1

    // Max number of gaps inside any window [x, x+eps); coincident gaps all count.
    int nOfEpsilon(double eps) const;
};

GapStatistics gapStatistics(const SpectralDecomposition& spec);

// Inverse participation ratio over energy levels:
// dEff = ( sum_n [tr(P_n rho)]^2 )^-1, in [1, levelCount].
double effectiveDimension(const Matrix& rho, const SpectralDecomposition& spec,
                          double stateTol = 1e-10);

}  // namespace fuzzproc
