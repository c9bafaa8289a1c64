#pragma once

// Algorithm dispatch and the benchmark harness.

#include "padopt/leakage.hpp"
#include "padopt/problem.hpp"

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace padopt {

enum class Algorithm { PopRe, PopReSh, PopSh, PrpRe, PrpReBa };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::PopRe, Algorithm::PopReSh, Algorithm::PopSh,
                                               Algorithm::PrpRe, Algorithm::PrpReBa};

std::string_view algorithm_name(Algorithm a);
// Throws ValidationError on unknown names.
Algorithm parse_algorithm(std::string_view name);

// Runs one algorithm end to end and returns its joint matrix. PopReSh and
// PrpReBa include their PopRe / PrpRe stage.
JointMatrix run_algorithm(Algorithm a, std::shared_ptr<const PaddingProblem> problem);

struct BenchRecord {
    std::string algorithm;
    double c = 1.0;
    std::size_t n = 0;
    double renyi_bits = 0.0;
    double shannon_bits = 0.0;
    double vulnerability = 0.0;
    double bandwidth_percent = 0.0;
    double elapsed_seconds = 0.0;  // solve phase only

    // Not part of the CSV.
    double total_seconds = 0.0;  // problem construction + solve + evaluation
    double mean_choices = 0.0;
    std::string error;           // nonempty when the cell failed
};

// One record per (algorithm, c) cell, sorted by (algorithm name, c). With
// `parallel`, cells run concurrently; the rows are the same either way apart
// from timings. A failing cell yields a record with NaN metrics and `error`
// set; the sweep continues.
std::vector<BenchRecord> run_bench(const FileSet& files, std::span<const double> c_list,
                                   std::span<const Algorithm> algorithms, bool parallel);

inline constexpr std::string_view kBenchHeader =
    "algorithm,c,n,renyi_bits,shannon_bits,vulnerability,bandwidth_percent,elapsed_seconds";

// Reals with 6 significant digits.
void write_bench_csv(std::ostream& out, std::span<const BenchRecord> records);

} // namespace padopt
