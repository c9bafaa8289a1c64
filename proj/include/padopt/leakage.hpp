#pragma once

// Padding schemes as joint matrices, and the leakage and bandwidth measures
// computed from them.

#include "padopt/problem.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace padopt {

struct Entry {
    std::size_t column = 0;
    double mass = 0.0;
};

// Per-file column assignment of a deterministic scheme.
struct DeterministicScheme {
    std::vector<std::size_t> assignment;
};

// Sparse n x m matrix with I_ij = p_i * P(f(e_i) = z_j). Rows are stored in
// CSR form, sorted by column, zeros dropped.
class JointMatrix {
public:
    // Validates row sums against p_i (within kProbTolerance), support against
    // the constraint windows and nonnegativity. Entries within a row may be
    // unsorted and may repeat a column; they are merged.
    JointMatrix(std::shared_ptr<const PaddingProblem> problem,
                std::vector<std::vector<Entry>> rows);

    static JointMatrix from_scheme(std::shared_ptr<const PaddingProblem> problem,
                                   const DeterministicScheme& scheme);

    const PaddingProblem& problem() const { return *problem_; }
    const std::shared_ptr<const PaddingProblem>& problem_ptr() const { return problem_; }

    std::size_t rows() const { return row_start_.size() - 1; }
    std::size_t cols() const { return problem_->m(); }
    std::size_t nonzeros() const { return entries_.size(); }

    std::span<const Entry> row(std::size_t i) const {
        return {entries_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
    }

    double at(std::size_t i, std::size_t j) const;

    // max_i I_ij per column.
    std::vector<double> column_maxima() const;
    // sum_i I_ij per column.
    std::vector<double> column_masses() const;

    // Set when every row has exactly one nonzero.
    bool is_deterministic() const;
    DeterministicScheme to_scheme() const;

private:
    JointMatrix() = default;

    std::shared_ptr<const PaddingProblem> problem_;
    std::vector<std::size_t> row_start_;
    std::vector<Entry> entries_;
};

// Unit of the secret the one-try attacker is after.
enum class Secret {
    File,  // file identity; prior max_i p_i
    Size,  // size class |X|; files with equal unpadded size merge
};

double prior_vulnerability(const PaddingProblem& problem, Secret secret = Secret::File);

// sum_j max_i I_ij
double posterior_vulnerability(const JointMatrix& joint, Secret secret = Secret::File);

// log2(posterior / prior), in bits.
double renyi_min_leakage(const JointMatrix& joint, Secret secret = Secret::File);

// Mutual information between the secret and the padded size, in bits.
double shannon_leakage(const JointMatrix& joint, Secret secret = Secret::File);

struct BandwidthReport {
    double expected_before = 0.0;
    double expected_after = 0.0;
    double percent = 0.0;
};

BandwidthReport bandwidth_report(const JointMatrix& joint);

struct LeakageReport {
    double prior_vulnerability = 0.0;
    double posterior_vulnerability = 0.0;
    double renyi_bits = 0.0;
    double shannon_bits = 0.0;
    double expected_size_before = 0.0;
    double expected_size_after = 0.0;
    double bandwidth_increase_percent = 0.0;
};

LeakageReport evaluate(const JointMatrix& joint, Secret secret = Secret::File);

// -x log2 x with phi(0) = 0.
double entropy_term(double x);

// Shannon entropy of a distribution given by nonnegative masses, in bits.
double entropy_bits(std::span<const double> masses);

} // namespace padopt
