// ensemble.hpp — seeded random states, channels, weighted operations, and full
// process specs for randomized verification sweeps.

#pragma once

#include "fuzzproc/hamiltonian_models.hpp"
#include "fuzzproc/process_tensor.hpp"

#include <cstdint>
#include <random>

namespace fuzzproc {

Matrix randomGinibre(int rows, int cols, std::mt19937_64& rng);
Vector randomPureState(int d, std::mt19937_64& rng);
Matrix randomDensityMatrix(int d, int rank, std::mt19937_64& rng);
Matrix randomUnitary(int d, std::mt19937_64& rng);
Matrix randomHermitian(int d, std::mt19937_64& rng);

// Trace-preserving random channel with `nKraus` Kraus operators, all weights 1.
WeightedOperation randomChannel(int d, int nKraus, std::mt19937_64& rng);

// Rank-1 projective measurement in a random basis with +-1 outcome weights.
WeightedOperation randomWeightedMeasurement(int d, std::mt19937_64& rng);

// Trace-decreasing variant: random channel scaled by `scale` in [0, 1].
WeightedOperation randomSubChannel(int d, int nKraus, double scale, std::mt19937_64& rng);

struct EnsembleParams {
    int dimE = 2, dimS = 2, dimGamma = 1;
    int k = 1;
    DistributionFamily family = DistributionFamily::UniformWindow;
    double tau = 1.0;
    double fuzziness = 10.0;
    bool purity = true;            // pure rho; mixed when false
    bool perStepEnergies = false;  // vary energies per step over shared projectors
    enum class OpKind { Channel, WeightedMeasurement, SubChannel, Identity };
    OpKind opKind = OpKind::Channel;
};

// Fully random k-step process spec, deterministic in `seed`.
ProcessSpec randomProcessSpec(const EnsembleParams& params, std::uint64_t seed);

}  // namespace fuzzproc
