#include "padopt/problem.hpp"

#include "padopt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace padopt {

namespace {

// c * size is a product of a decimal multiplier and an integer; allow one
// part in 1e12 so that e.g. 1.1 * 1000 admits 1100.
constexpr double kBoundSlack = 1e-12;

bool within_upper_bound(std::int64_t z, double limit) {
    return static_cast<double>(z) <= limit * (1.0 + kBoundSlack);
}

bool strictly_below(std::int64_t z, double limit) {
    return static_cast<double>(z) < limit * (1.0 - kBoundSlack);
}

void check_multiplier(double c, std::size_t i) {
    if (!(c >= 1.0) || !std::isfinite(c)) {
        std::ostringstream os;
        os << "multiplier for file " << i + 1 << " must be >= 1 (got " << c << ")";
        throw ValidationError(os.str());
    }
}

// Largest j with alphabet[j] <= limit, given that alphabet[floor] <= limit.
std::size_t last_within(const OutputAlphabet& alphabet, std::size_t floor, double limit) {
    auto sizes = alphabet.sizes();
    auto it = std::upper_bound(sizes.begin() + static_cast<std::ptrdiff_t>(floor), sizes.end(), limit,
                               [](double lim, std::int64_t z) { return !within_upper_bound(z, lim); });
    return static_cast<std::size_t>(it - sizes.begin()) - 1;
}

std::size_t index_of(const OutputAlphabet& alphabet, std::int64_t size) {
    auto sizes = alphabet.sizes();
    auto it = std::lower_bound(sizes.begin(), sizes.end(), size);
    return static_cast<std::size_t>(it - sizes.begin());
}

std::vector<std::int64_t> sizes_of(const FileSet& files) {
    std::vector<std::int64_t> out(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) out[i] = files[i].size;
    return out;
}

} // namespace

FileSet FileSet::from_records(std::vector<FileRecord> records) {
    if (records.empty()) throw ValidationError("file set is empty");
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].size < 1) {
            throw ValidationError("file " + std::to_string(i + 1) + ": size must be positive");
        }
        if (!(records[i].frequency > 0.0) || !std::isfinite(records[i].frequency)) {
            throw ValidationError("file " + std::to_string(i + 1) + ": frequency must be positive");
        }
    }

    FileSet set;
    set.source_index_.resize(records.size());
    std::iota(set.source_index_.begin(), set.source_index_.end(), std::size_t{0});
    std::stable_sort(set.source_index_.begin(), set.source_index_.end(),
                     [&](std::size_t a, std::size_t b) { return records[a].size < records[b].size; });
    set.records_.reserve(records.size());
    for (std::size_t k : set.source_index_) set.records_.push_back(records[k]);

    double total = 0.0;
    for (const auto& r : set.records_) total += r.frequency;
    if (std::abs(total - 1.0) > kProbTolerance) {
        for (auto& r : set.records_) r.frequency /= total;
        if (std::abs(total - 1.0) > kRenormalizeThreshold) set.renormalized_from_ = total;
    }
    return set;
}

double FileSet::max_frequency() const {
    double best = 0.0;
    for (const auto& r : records_) best = std::max(best, r.frequency);
    return best;
}

OutputAlphabet::OutputAlphabet(std::vector<std::int64_t> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw ValidationError("output alphabet is empty");
    for (std::size_t j = 0; j < sizes_.size(); ++j) {
        if (sizes_[j] < 1) throw ValidationError("output alphabet values must be positive");
        if (j > 0 && sizes_[j] <= sizes_[j - 1]) {
            throw ValidationError("output alphabet must be strictly increasing (position " +
                                  std::to_string(j + 1) + ")");
        }
    }
}

OutputAlphabet OutputAlphabet::unique_sorted(std::span<const std::int64_t> sizes) {
    std::vector<std::int64_t> v(sizes.begin(), sizes.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return OutputAlphabet(std::move(v));
}

ConstraintSequence validate_constraints(std::vector<Window> windows, std::size_t alphabet_len) {
    if (windows.empty()) throw ValidationError("constraint sequence is empty");
    const std::size_t n = windows.size();
    auto fail = [](const std::string& what, std::size_t i) {
        throw ValidationError(what + " (file " + std::to_string(i + 1) + ")");
    };
    for (std::size_t i = 1; i < n; ++i) {
        if (windows[i].l < windows[i - 1].l) fail("l not non-decreasing", i);
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (windows[i].r < windows[i - 1].r) fail("r not non-decreasing", i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (windows[i].l > windows[i].r) fail("l greater than r", i);
    }
    if (windows.front().l != 0) fail("l_1 must be 1", 0);
    if (windows.back().l + 1 != alphabet_len || windows.back().r + 1 != alphabet_len) {
        fail("l_n and r_n must equal the alphabet length " + std::to_string(alphabet_len), n - 1);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (windows[i].r >= alphabet_len) fail("index out of range", i);
    }
    ConstraintSequence seq;
    seq.windows_ = std::move(windows);
    return seq;
}

PaddingProblem::PaddingProblem(FileSet files, OutputAlphabet alphabet,
                               ConstraintSequence constraints,
                               std::optional<std::vector<std::int64_t>> original_sizes)
    : files_(std::move(files)),
      alphabet_(std::move(alphabet)),
      constraints_(std::move(constraints)),
      original_sizes_(std::move(original_sizes)) {
    if (constraints_.size() != files_.size()) {
        throw ValidationError("constraint sequence length differs from the number of files");
    }
    for (std::size_t i = 0; i < files_.size(); ++i) {
        if (constraints_[i].r >= alphabet_.size()) {
            throw ValidationError("constraint index out of range (file " + std::to_string(i + 1) + ")");
        }
        if (alphabet_[constraints_[i].l] < files_[i].size) {
            throw ValidationError("file " + std::to_string(i + 1) +
                                  ": left bound pads below the file size");
        }
    }
    if (original_sizes_) {
        if (original_sizes_->size() != files_.size()) {
            throw ValidationError("original_sizes length differs from the number of files");
        }
        for (std::size_t i = 0; i < files_.size(); ++i) {
            if ((*original_sizes_)[i] < 1 || (*original_sizes_)[i] > files_[i].size) {
                throw ValidationError("file " + std::to_string(i + 1) +
                                      ": original size must be in [1, size]");
            }
        }
    }
}

double PaddingProblem::mean_choices() const {
    double total = 0.0;
    for (const auto& w : constraints_.windows()) total += static_cast<double>(w.width());
    return total / static_cast<double>(n());
}

PaddingProblem problem_from_multiplier(const FileSet& files, double c) {
    check_multiplier(c, 0);
    std::vector<double> multipliers(files.size(), c);
    return problem_from_per_file_multipliers(files, multipliers);
}

PaddingProblem problem_from_per_file_multipliers(const FileSet& files,
                                                 std::span<const double> multipliers) {
    if (multipliers.size() != files.size()) {
        throw ValidationError("expected " + std::to_string(files.size()) + " multipliers, got " +
                              std::to_string(multipliers.size()));
    }
    const auto sizes = sizes_of(files);
    OutputAlphabet alphabet = OutputAlphabet::unique_sorted(sizes);
    std::vector<Window> windows(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
        check_multiplier(multipliers[i], i);
        windows[i].l = index_of(alphabet, sizes[i]);
        windows[i].r = last_within(alphabet, windows[i].l,
                                   multipliers[i] * static_cast<double>(sizes[i]));
    }
    auto constraints = validate_constraints(std::move(windows), alphabet.size());
    return PaddingProblem(files, std::move(alphabet), std::move(constraints));
}

PaddingProblem server_identity_reduction(const FileSet& files, const OutputAlphabet& shared,
                                         double c, UpperBoundRule rule) {
    check_multiplier(c, 0);
    const std::size_t n = files.size();
    std::vector<std::int64_t> rounded(n);
    std::vector<std::int64_t> original(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t size = files[i].size;
        const double limit = c * static_cast<double>(size);
        const std::size_t j = index_of(shared, size);
        if (j == shared.size() || !within_upper_bound(shared[j], limit)) {
            std::ostringstream os;
            os << "file " << i + 1 << ": no shared output size in [" << size << ", " << limit << "]";
            throw ValidationError(os.str());
        }
        rounded[i] = shared[j];
        original[i] = size;
    }

    OutputAlphabet alphabet = OutputAlphabet::unique_sorted(rounded);
    std::vector<Window> windows(n);
    for (std::size_t i = 0; i < n; ++i) {
        windows[i].l = index_of(alphabet, rounded[i]);
        if (rule == UpperBoundRule::OriginalSize) {
            windows[i].r = last_within(alphabet, windows[i].l, c * static_cast<double>(original[i]));
        } else {
            const double limit = c * static_cast<double>(rounded[i]);
            std::size_t r = windows[i].l;
            while (r + 1 < alphabet.size() && strictly_below(alphabet[r + 1], limit)) ++r;
            windows[i].r = r;
        }
    }
    auto constraints = validate_constraints(std::move(windows), alphabet.size());

    std::vector<FileRecord> records(n);
    for (std::size_t i = 0; i < n; ++i) records[i] = {rounded[i], files[i].frequency};
    FileSet reduced = FileSet::from_records(std::move(records));
    return PaddingProblem(std::move(reduced), std::move(alphabet), std::move(constraints),
                          std::move(original));
}

} // namespace padopt
