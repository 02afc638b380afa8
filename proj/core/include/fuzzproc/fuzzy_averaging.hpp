// fuzzy_averaging.hpp — waiting-time distributions, their Fourier coefficients
// G_nm, the partial dephasing maps G_T and the dephasing map D, and the
// fuzziness scale S = max_{n!=m} |G_nm|.

#pragma once

#include "fuzzproc/operator_core.hpp"

#include <string>

namespace fuzzproc {

enum class DistributionFamily { UniformWindow, HalfNormal, Delta };

std::string familyName(DistributionFamily f);
DistributionFamily familyFromName(const std::string& name);

// A waiting-time density on t >= 0. Conventions:
//  - uniformWindow: density 1/width on [max(0, tau - T/2), tau + T/2],
//    renormalized when the left edge clips zero (clipped() reports this).
//  - halfNormal: density sqrt(2/(pi T)) exp(-(t - tau)^2 / (2T)) on t >= tau;
//    tau is the support offset and the mean is tau + sqrt(2T/pi).
//  - delta: point mass at tau (T is ignored and treated as 0).
struct WaitingTimeDistribution {
    DistributionFamily family = DistributionFamily::Delta;
    double tau = 0.0;
    double fuzziness = 0.0;  // T

    void validate() const;
    bool clipped() const;     // uniform window truncated at t = 0
    double mean() const;      // first moment of the density
    double density(double t) const;
};

// Fourier coefficient of the density at frequency `gap` = E_n - E_m:
//   G = integral_0^inf exp(-i t gap) density(t) dt.
// Closed form for uniformWindow and delta; adaptive quadrature for halfNormal,
// cross-checked against the Dawson-function closed form. Throws on
// non-convergent quadrature with the residual estimate in the message.
Complex gCoefficient(const WaitingTimeDistribution& dist, double gap);

// Dawson integral D(x) = exp(-x^2) int_0^x exp(s^2) ds, via Rybicki's
// sampling expansion; exposed for the half-normal closed form and its tests.
double dawson(double x);

// G_T(X) = sum_{n,m} G_nm P_n X P_m over the levels of `spec`. The dephasing
// map D is the special case G_nm = delta_nm.
struct PartialDephasingMap {
    SpectralDecomposition spec;
    Matrix coefficients;  // levelCount x levelCount, G_nn = 1, G_mn = conj(G_nm)
    WaitingTimeDistribution source;

    // Cached eigenbasis (columns grouped by level) and the coefficient matrix
    // expanded to basis indices, so apply is three d x d products instead of a
    // sum over level pairs. Filled by the build functions; apply falls back to
    // the projector sum when absent.
    Matrix basis;
    Matrix coeffExpanded;

    Matrix apply(const Matrix& X) const;
    Matrix applyAdjoint(const Matrix& X) const;  // Hilbert-Schmidt adjoint
    Superoperator toSuperoperator() const;
};

PartialDephasingMap buildPartialDephasing(const SpectralDecomposition& spec,
                                          const WaitingTimeDistribution& dist);
PartialDephasingMap buildDephasing(const SpectralDecomposition& spec);

// S = max over off-diagonal level pairs of |G_nm|; 0 when there is one level.
double fuzzinessScale(const PartialDephasingMap& map);

// Copy of `spec` with substituted level energies (shared projectors).
SpectralDecomposition withEnergies(const SpectralDecomposition& spec,
                                   const std::vector<double>& energies);

}  // namespace fuzzproc
