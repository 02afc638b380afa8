// equilibration_bounds.hpp — evaluation of the distinguishability bounds: the
// single-time bound, the fluctuation bound with N(eps) and d_eff, the k-step
// bound with terms A_k, B_l, C_l and per-step S factors, and the auxiliary
// upper bounds on B_l and C_l.

#pragma once

#include "fuzzproc/hamiltonian_models.hpp"
#include "fuzzproc/process_tensor.hpp"

#include <vector>

namespace fuzzproc {

// LHS |<Lambda>_{fuzzy - equilibrium}| plus every RHS term with the verified
// inequality slack. slack >= -1e-9 on every valid instance.
struct BoundReport {
    double lhs = 0.0;
    double termA = 0.0;                 // A_k
    std::vector<double> termsB;         // B_l, l = 0..k-1
    std::vector<double> termsC;         // C_l
    std::vector<double> opNorms;        // ||A_{k:l+1}|| per l = 0..k-1
    double opNormFull = 0.0;            // ||A_{k:0}||
    double opNormProduct = 0.0;         // product of individual norms (diagnostic)
    std::vector<double> sFactors;       // per-step S_j = max_{n!=m} |G^(j)_nm|
    double sFactorTotal = 0.0;          // S_{k:0}
    double stateDistance = 0.0;         // ||varrho - varpi||_2
    double rhsTotal = 0.0;
    double slack = 0.0;                 // rhsTotal - lhs
    struct AuxC {
        double fourTerm = 0.0;
        double commutatorForm = 0.0;
    };
    std::vector<AuxC> auxiliaryC;       // per l = 0..k-1
};

// Single-time bound: lhs = |tr[A (G - D)(rho)]|,
// rhs = S * opNorm(A) * ||rho - D(rho)||_2; lhs <= rhs.
struct SingleTimeBound {
    double lhs = 0.0;
    double rhs = 0.0;
    double fuzzScale = 0.0;  // S
};

SingleTimeBound singleTimeBound(const Matrix& rho, const SpectralDecomposition& spec,
                                const WaitingTimeDistribution& dist, const Matrix& A);

// RHS of the fluctuation bound for the time-averaged variance over a window of
// width T: ||A||^2 N(eps) f(eps T) / d_eff(rho), f(x) = 1 + 8 log2(levels)/x.
double shortFarrellyBound(const Matrix& rho, const SpectralDecomposition& spec,
                          double epsilon, double T, const Matrix& A);

// Full bound report for a k-step process, per-step form: when distributions or
// energies differ across steps, S powers become the step products S_{b:a}.
BoundReport multiTimeBound(const ProcessSpec& spec);

// The two auxiliary upper bounds on C_l: the four-purity triangle expansion
// and ||[D, A_l]|| * ||varrho_l - varpi_l||_2. Both >= C_l.
BoundReport::AuxC auxiliaryCBounds(const ProcessSpec& spec, int l);

// Per-step decay data for B_l with its majorant
// S_{k:l+1} * (||A_l|| ||varrho_l - D(varrho_l)||_2 + ||A_l(varrho_l) - D A_l(varrho_l)||_2).
struct BTermDecay {
    int l = 0;
    double termB = 0.0;
    double sFactorTail = 0.0;  // S_{k:l+1}
    double majorant = 0.0;
};

std::vector<BTermDecay> bTermDecay(const ProcessSpec& spec);

}  // namespace fuzzproc
