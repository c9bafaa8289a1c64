#pragma once

// Randomized (per-request) padding solvers.

#include "padopt/leakage.hpp"
#include "padopt/problem.hpp"

#include <memory>

namespace padopt {

// Min-entropy optimal joint matrix over all randomized schemes.
//
// Sweeps columns right to left with a per-file budget initialised to p_i.
// At column j the files whose window starts at j must spend their whole
// budget there; the largest of those budgets becomes the column's maximum,
// and every other file that still reaches j spends up to that much on it.
// Columns where no window starts receive nothing.
JointMatrix solve_prp_renyi(std::shared_ptr<const PaddingProblem> problem);

// The same problem with every frequency replaced by 1/n (unknown access
// distribution).
std::shared_ptr<const PaddingProblem> with_uniform_frequencies(const PaddingProblem& problem);

// Rebuilds every row left to right under the input's column maxima, which
// moves mass toward smaller padded sizes without raising any maximum.
// Requires a min-entropy optimal input (e.g. solve_prp_renyi output); throws
// InternalError if the vulnerability moves or the expected size grows.
//
// Rows are independent given the caps; this variant rebuilds them with
// OpenMP when available.
JointMatrix reduce_bandwidth(const JointMatrix& joint);

// Single-threaded reference for reduce_bandwidth. Same result.
JointMatrix reduce_bandwidth_serial(const JointMatrix& joint);

} // namespace padopt
