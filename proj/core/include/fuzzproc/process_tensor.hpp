// process_tensor.hpp — multi-time processes: weighted CP operations on
// S (x) Gamma, sequential propagation under fuzzy/dephased/fixed-time
// evolution, the Choi process tensor, the observable tensor, and the
// multi-time Born-rule contraction tr[Lambda Upsilon].

#pragma once

#include "fuzzproc/fuzzy_averaging.hpp"
#include "fuzzproc/operator_core.hpp"

#include <optional>
#include <vector>

namespace fuzzproc {

// A_l(X) = sum_mu a_mu K_mu X K_mu^dag with sum_mu K_mu^dag K_mu <= 1,
// acting on S (x) Gamma.
struct WeightedOperation {
    std::vector<Matrix> kraus;
    std::vector<double> weights;

    int dim() const { return kraus.empty() ? 0 : static_cast<int>(kraus[0].rows()); }
    void validate(double tol = 1e-10) const;

    Matrix apply(const Matrix& X) const;
    Matrix applyAdjoint(const Matrix& X) const;  // sum_mu a_mu K^dag X K
    Matrix normalizationOperator() const;        // sum_mu a_mu K_mu^dag K_mu

    static WeightedOperation identityOp(int d);
};

struct ProcessStep {
    std::vector<double> energies;  // per level of the shared projectors
    WaitingTimeDistribution dist;
};

// A k-step process: initial rho (x) gamma, shared spectral projectors on
// E (x) S with per-step energies, and k+1 operations on S (x) Gamma.
// Fixed global factor ordering E (x) S (x) Gamma.
struct ProcessSpec {
    int dimE = 1, dimS = 2, dimGamma = 1;
    Matrix rho;                  // state on E (x) S
    Matrix gamma;                // state on Gamma
    SpectralDecomposition base;  // shared projectors on E (x) S
    std::vector<ProcessStep> steps;            // size k+1
    std::vector<WeightedOperation> operations;  // size k+1

    int k() const { return static_cast<int>(steps.size()) - 1; }
    int fullDim() const { return dimE * dimS * dimGamma; }
    Matrix initialState() const;  // rho (x) gamma
    void validate(double tol = 1e-8) const;

    // Spectral data of step l: shared projectors with the step's energies.
    SpectralDecomposition stepSpec(int l) const;
    // Same, with projectors embedded as P_n (x) 1_Gamma on the full space.
    SpectralDecomposition fullStepSpec(int l) const;

    // Operation l embedded as 1_E (x) K on the full space.
    Matrix applyOperation(int l, const Matrix& X) const;
    Matrix applyOperationAdjoint(int l, const Matrix& X) const;
};

enum class EvolutionMode { Fuzzy, Equilibrium, FixedTimes };

struct PropagationResult {
    std::vector<Matrix> states;  // state after each evolution, before operation l
    double finalExpectation = 0.0;
};

// Alternates the evolution map (G_l, D, or exact unitary at times[l]) with the
// embedded operations. states[l] is varrho_l (fuzzy), varpi_l (equilibrium),
// or the evolved state at fixed times. finalExpectation = tr[A_k(states[k])].
PropagationResult propagate(const ProcessSpec& spec, EvolutionMode mode,
                            const std::vector<double>& times = {});

struct IntermediateStates {
    std::vector<Matrix> fuzzyStates;        // varrho_0 .. varrho_k
    std::vector<Matrix> equilibriumStates;  // varpi_0 .. varpi_k
};

IntermediateStates computeIntermediateStates(const ProcessSpec& spec);

// Choi state of the process: the S-plus-ancilla-pairs operator of dimension
// dS^(2k+1) obtained from the swap-gadget circuit with E traced out. Fuzzy and
// equilibrium modes replace each unitary conjugation by G_l / D on the SE
// factor.
struct ChoiProcessTensor {
    int k = 0;
    int dimS = 0;
    Matrix tensor;
};

ChoiProcessTensor buildChoi(const ProcessSpec& spec, EvolutionMode mode,
                            const std::vector<double>& times = {},
                            long long maxChoiDim = 65536);

// The observable tensor: Choi-side encoding of the operation sequence with the
// ancilla Gamma contracted internally across steps. Convention fixed so that
// bornContraction reproduces sequential semantics.
struct MultiTimeObservable {
    int k = 0;
    int dimS = 0;
    Matrix tensor;
};

MultiTimeObservable buildObservableTensor(const std::vector<WeightedOperation>& operations,
                                          const Matrix& gamma, int dimS, int dimGamma);

// tr[Lambda Upsilon]; throws if the imaginary part exceeds imagTol.
double bornContraction(const MultiTimeObservable& lambda, const ChoiProcessTensor& upsilon,
                       double imagTol = 1e-10);

}  // namespace fuzzproc
