#pragma once

// Reproduction presets shared by the CLI and the acceptance suite: the
// calibrated sweep grids behind the summary-table and scaling-figure runs.
// All times are in units of 1/J, fields in units of J.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinsense::presets {

inline constexpr std::uint64_t kDefaultSeed = 20240612ULL;

inline constexpr int kChainSites = 5;
inline constexpr double kCoupling = 1.0;

// Positive half of the prior interval: the dynamics is even in the field
// (a global sigma^z rotation maps B to -B), so the magnitude carries all
// the information and the scaling runs estimate it on [0, 0.2].
inline constexpr double kScalingGridLo = 0.0;
inline constexpr double kScalingGridHi = 0.2;
inline constexpr int kScalingGridPoints = 401;

inline constexpr int kRepeats = 100;
inline constexpr double kInitRatio = 100.0;
inline constexpr double kMeasRatio = 10.0;

// Field-fit window for the scaling pipeline (the small-B side diverges).
inline constexpr double kFieldWindowLo = 0.04;
inline constexpr double kFieldWindowHi = 0.2;

// Sample-count ladder (geometric, ratio ~1.305) for total-time sweeps.
inline const std::vector<std::uint64_t> kSampleLadder = {
    1000,  1312,  1722,  2259,  2964,  3889,   5102,   6694,   8783,   11525,  15121,
    19840, 26031, 34155, 44814, 58799, 77149,  101225, 132815, 174263, 228646, 300000};

inline const std::vector<int> kTable1NSeq = {1, 4, 5, 6, 10};
inline const std::vector<double> kTable1Fields = {0.1, 0.2};

/// Per-protocol slice of the ladder used for the summary-table time fits;
/// each window spans that protocol's transition toward its asymptotic
/// regime at the reproduction grid resolution.
inline std::vector<std::uint64_t> table1_samples(int n_seq) {
    auto slice = [](std::size_t lo, std::size_t hi) {
        return std::vector<std::uint64_t>(kSampleLadder.begin() + lo,
                                          kSampleLadder.begin() + hi + 1);
    };
    switch (n_seq) {
    case 1:
        return slice(0, 17);  // 1000 .. 101225
    case 4:
        return slice(0, 21);  // 1000 .. 300000
    case 5:
    case 6:
        return slice(2, 20);  // 1722 .. 228646
    case 10:
        return slice(0, 17);  // 1000 .. 101225
    default:
        throw std::invalid_argument("table1_samples: no preset window for n_seq=" +
                                    std::to_string(n_seq));
    }
}

// Scaling-figure sweep (field exponent and intercept decay at n_seq = 4).
inline const std::vector<int> kFig5NSeq = {4};
inline const std::vector<double> kFig5Fields = {0.04, 0.0525, 0.0685, 0.09,
                                                0.118, 0.155, 0.2};
inline const std::vector<std::uint64_t> kFig5Samples = {1000, 1312, 1722,  2259,
                                                        2964, 3889, 5102,  6694,
                                                        8783, 11525, 15121, 19840};

// Posterior-narrowing preset (five nested posteriors at B/J = 0.1).
inline constexpr double kPosteriorField = 0.1;
inline constexpr std::uint64_t kPosteriorSamples = 1000;

} // namespace spinsense::presets
