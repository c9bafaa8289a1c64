#pragma once

// Ground-truth oracles and the one-try attacker simulation.

#include "padopt/leakage.hpp"
#include "padopt/problem.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace padopt {

inline constexpr std::uint64_t kMaxPopSchemes = 10'000'000;
inline constexpr std::size_t kMaxGridFiles = 4;
inline constexpr std::size_t kMaxGridColumns = 4;
inline constexpr int kMaxGridResolution = 12;

struct OracleResult {
    double min_vulnerability = 0.0;
    double min_shannon_bits = 0.0;
    // Smallest expected padded size (bytes) among vulnerability-optimal schemes.
    double min_bandwidth_among_vulnerability_optimal = 0.0;
    // Schemes within kTieTolerance of min_vulnerability.
    std::uint64_t optimal_scheme_count = 0;
    std::uint64_t schemes_enumerated = 0;

    // First scheme in enumeration order attaining each minimum.
    DeterministicScheme vulnerability_witness;
    DeterministicScheme shannon_witness;
    DeterministicScheme bandwidth_witness;
};

// Number of feasible deterministic schemes, saturating at UINT64_MAX.
std::uint64_t pop_search_space(const PaddingProblem& problem);

// Exhaustive search over every feasible deterministic scheme. Throws
// ValidationError when the search space exceeds kMaxPopSchemes. The
// enumeration is split across OpenMP threads; results match the serial
// reference exactly.
OracleResult brute_force_pop(const PaddingProblem& problem);
OracleResult brute_force_pop_serial(const PaddingProblem& problem);

// Minimum vulnerability over randomized schemes whose rows split p_i into
// `resolution` equal chunks. An upper bound on the randomized optimum; with
// resolution 1 it equals the deterministic optimum.
double grid_search_prp(const PaddingProblem& problem, int resolution);

struct AttackTrace {
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::uint64_t, double>> checkpoints;  // (trials so far, success rate)
    double theoretical_optimum = 0.0;
};

// Samples a file by p, a padded size by the file's row of the joint matrix,
// and lets the attacker guess the file with the largest joint mass in that
// column (lowest index on ties). The trace is a pure function of the inputs.
AttackTrace simulate_attacker(const JointMatrix& joint, std::uint64_t trials, std::uint64_t seed,
                              std::uint64_t checkpoint_every);

} // namespace padopt
