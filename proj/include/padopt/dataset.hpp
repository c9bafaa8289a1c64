#pragma once

// Dataset ingestion and synthetic popularity corpora.

#include "padopt/problem.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace padopt {

// CSV with header `size,frequency`; LF or CRLF. The frequency column may
// hold counts. Errors carry the 1-based line number.
FileSet load_dataset(std::istream& in);
FileSet load_dataset(const std::filesystem::path& path);

// Writes `size,frequency` rows in sorted order, frequencies with 17
// significant digits.
void write_dataset(std::ostream& out, const FileSet& files);

enum class FrequencyAssignment {
    Random,       // Zipf ranks shuffled across files
    InverseSize,  // most popular file is the smallest
};

struct SyntheticSpec {
    std::size_t n = 1000;
    std::int64_t size_min = 1'000;
    std::int64_t size_max = 10'000'000;
    double zipf_exponent = 1.0;
    std::uint64_t seed = 0;
    FrequencyAssignment frequency_assignment = FrequencyAssignment::Random;
};

// Distinct sizes drawn log-uniformly over [size_min, size_max] (collisions
// are redrawn) with Zipf(zipf_exponent) frequencies. Deterministic in seed.
FileSet generate_synthetic(const SyntheticSpec& spec);

FrequencyAssignment parse_frequency_assignment(const std::string& name);

} // namespace padopt
