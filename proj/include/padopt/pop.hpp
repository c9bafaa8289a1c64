#pragma once

// Deterministic (per-object) padding solvers.

#include "padopt/leakage.hpp"
#include "padopt/problem.hpp"

#include <cstddef>
#include <vector>

namespace padopt {

// Absolute tolerance for ties in DP minimizations; the smaller index wins.
inline constexpr double kTieTolerance = 1e-12;

struct PopSolution {
    DeterministicScheme scheme;
    double objective = 0.0;  // sum of column maxima
};

// Min-entropy optimal deterministic scheme. Interval DP over file ranges:
// the most frequent file of a range picks a column k, every file of the range
// that admits k joins it, and the files left and right of that group are
// solved independently. The smallest k wins ties, which keeps padding low.
PopSolution solve_pop_renyi(const PaddingProblem& problem);

// poss[i]: columns in file i's window whose current maximum is at least p_i,
// i.e. where the file can sit without raising any column maximum.
using PossSets = std::vector<std::vector<std::size_t>>;

PossSets compute_poss(const PaddingProblem& problem, const JointMatrix& joint);
PossSets compute_poss(const PaddingProblem& problem, const DeterministicScheme& scheme);

// Lowers the output entropy of a min-entropy optimal scheme without changing
// its vulnerability, by moving files only within their poss sets. Throws
// InternalError if the vulnerability drifts.
DeterministicScheme refine_shannon(const PaddingProblem& problem, const DeterministicScheme& scheme);

struct ShannonSolution {
    DeterministicScheme scheme;
    double shannon_bits = 0.0;
};

// Entropy-optimal deterministic baseline: prefix DP over contiguous groups of
// files, each group padded to the smallest column every member admits.
ShannonSolution solve_pop_shannon(const PaddingProblem& problem);

// Vulnerability of a deterministic scheme: sum over used columns of the
// largest frequency assigned there.
double scheme_vulnerability(const PaddingProblem& problem, const DeterministicScheme& scheme);
// Entropy of the padded-size distribution.
double scheme_entropy(const PaddingProblem& problem, const DeterministicScheme& scheme);
// Expected padded size.
double scheme_expected_size(const PaddingProblem& problem, const DeterministicScheme& scheme);

} // namespace padopt
