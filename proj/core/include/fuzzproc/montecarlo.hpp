// montecarlo.hpp — independent stochastic oracle: sample waiting-time vectors,
// propagate exactly at fixed times, and average.

#pragma once

#include "fuzzproc/process_tensor.hpp"

#include <cstdint>

namespace fuzzproc {

struct McEstimate {
    double mean = 0.0;
    double stderror = 0.0;  // sample std dev / sqrt(samples)
    long long samples = 0;
    std::uint64_t seed = 0;
};

// n i.i.d. rows of waiting times, one column per distribution.
std::vector<std::vector<double>> sampleWaitingTimes(
    const std::vector<WaitingTimeDistribution>& dists, long long n, std::uint64_t seed);

// Monte Carlo estimate of the fuzzy expectation <Lambda>: averages the exact
// fixed-time expectation over sampled waiting-time vectors.
McEstimate mcExpectation(const ProcessSpec& spec, long long n, std::uint64_t seed);

// Estimate of the window-averaged variance of tr[A (rho(t) - omega)] with
// t uniform on [0, T]; compare against shortFarrellyBound.
McEstimate mcTimeAveragedVariance(const Matrix& rho, const SpectralDecomposition& spec,
                                  const Matrix& A, double T, long long n,
                                  std::uint64_t seed);

}  // namespace fuzzproc
