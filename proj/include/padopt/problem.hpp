#pragma once

// Padding problem data model.
//
// Indices are 0-based throughout the library. User-facing text (error
// messages, scheme documents, CLI output) reports 1-based positions.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace padopt {

// Absolute tolerance for probability equalities and sums.
inline constexpr double kProbTolerance = 1e-9;
// Frequencies off from 1 by more than this are treated as counts.
inline constexpr double kRenormalizeThreshold = 1e-6;

struct FileRecord {
    std::int64_t size = 0;    // bytes
    double frequency = 0.0;   // access probability
};

class FileSet {
public:
    // Validates sizes and frequencies, sorts stably by size and renormalizes
    // frequencies by their sum when they do not already sum to 1.
    static FileSet from_records(std::vector<FileRecord> records);

    std::size_t size() const { return records_.size(); }
    const FileRecord& operator[](std::size_t i) const { return records_[i]; }
    std::span<const FileRecord> records() const { return records_; }

    // Position of record i in the input handed to from_records.
    std::size_t source_index(std::size_t i) const { return source_index_[i]; }

    // Set when the input sum was off by more than kRenormalizeThreshold
    // (frequencies given as counts); holds the original sum.
    std::optional<double> renormalized_from() const { return renormalized_from_; }

    double max_frequency() const;

private:
    std::vector<FileRecord> records_;
    std::vector<std::size_t> source_index_;
    std::optional<double> renormalized_from_;
};

class OutputAlphabet {
public:
    // Throws unless sizes is nonempty, positive and strictly increasing.
    explicit OutputAlphabet(std::vector<std::int64_t> sizes);

    // Sorted unique values of sizes.
    static OutputAlphabet unique_sorted(std::span<const std::int64_t> sizes);

    std::size_t size() const { return sizes_.size(); }
    std::int64_t operator[](std::size_t j) const { return sizes_[j]; }
    std::span<const std::int64_t> sizes() const { return sizes_; }

private:
    std::vector<std::int64_t> sizes_;
};

// Column window [l, r] (inclusive) a file may be padded into.
struct Window {
    std::size_t l = 0;
    std::size_t r = 0;

    std::size_t width() const { return r - l + 1; }
    bool contains(std::size_t j) const { return l <= j && j <= r; }
    bool operator==(const Window&) const = default;
};

class ConstraintSequence {
public:
    std::size_t size() const { return windows_.size(); }
    const Window& operator[](std::size_t i) const { return windows_[i]; }
    std::span<const Window> windows() const { return windows_; }

private:
    friend ConstraintSequence validate_constraints(std::vector<Window> windows,
                                                   std::size_t alphabet_len);
    std::vector<Window> windows_;
};

// Checks, in order: l non-decreasing, r non-decreasing, l_i <= r_i,
// l_1 = 1, l_n = r_n = |Z|, indices in range. Throws ValidationError naming
// the first violated invariant.
ConstraintSequence validate_constraints(std::vector<Window> windows, std::size_t alphabet_len);

class PaddingProblem {
public:
    PaddingProblem(FileSet files, OutputAlphabet alphabet, ConstraintSequence constraints,
                   std::optional<std::vector<std::int64_t>> original_sizes = std::nullopt);

    std::size_t n() const { return files_.size(); }
    std::size_t m() const { return alphabet_.size(); }

    const FileSet& files() const { return files_; }
    const OutputAlphabet& alphabet() const { return alphabet_; }
    const ConstraintSequence& constraints() const { return constraints_; }
    const std::optional<std::vector<std::int64_t>>& original_sizes() const { return original_sizes_; }

    double frequency(std::size_t i) const { return files_[i].frequency; }
    std::int64_t size(std::size_t i) const { return files_[i].size; }
    const Window& window(std::size_t i) const { return constraints_[i]; }

    // Size before padding for bandwidth accounting.
    std::int64_t unpadded_size(std::size_t i) const {
        return original_sizes_ ? (*original_sizes_)[i] : files_[i].size;
    }

    // Average number of admissible columns per file.
    double mean_choices() const;

private:
    FileSet files_;
    OutputAlphabet alphabet_;
    ConstraintSequence constraints_;
    std::optional<std::vector<std::int64_t>> original_sizes_;
};

// Alphabet = unique file sizes; file i may pad to any s_j with
// |e_i| <= s_j <= c * |e_i|.
PaddingProblem problem_from_multiplier(const FileSet& files, double c);

// As problem_from_multiplier with one multiplier per file (sorted order).
// Rejects multipliers whose windows are not a valid constraint sequence.
PaddingProblem problem_from_per_file_multipliers(const FileSet& files,
                                                 std::span<const double> multipliers);

enum class UpperBoundRule {
    // z <= c * |e_i| against the original size.
    OriginalSize,
    // z < c * L*_i against the rounded-up size.
    StrictRoundedSize,
};

// Multi-server mode: every file is first rounded up to the smallest value of
// the shared alphabet that fits it. The resulting problem is posed over the
// rounded sizes and remembers the original ones for bandwidth metrics.
PaddingProblem server_identity_reduction(const FileSet& files, const OutputAlphabet& shared,
                                         double c,
                                         UpperBoundRule rule = UpperBoundRule::OriginalSize);

} // namespace padopt
