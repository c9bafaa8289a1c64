#include "padopt/bench.hpp"

#include "padopt/error.hpp"
#include "padopt/pop.hpp"
#include "padopt/prp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <tuple>

namespace padopt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

BenchRecord run_cell(const FileSet& files, double c, Algorithm algorithm) {
    BenchRecord rec;
    rec.algorithm = std::string(algorithm_name(algorithm));
    rec.c = c;
    rec.n = files.size();
    const auto total_start = Clock::now();
    try {
        auto problem = std::make_shared<const PaddingProblem>(problem_from_multiplier(files, c));
        rec.mean_choices = problem->mean_choices();
        const auto solve_start = Clock::now();
        JointMatrix joint = run_algorithm(algorithm, problem);
        rec.elapsed_seconds = seconds_since(solve_start);
        const LeakageReport report = evaluate(joint);
        rec.renyi_bits = report.renyi_bits;
        rec.shannon_bits = report.shannon_bits;
        rec.vulnerability = report.posterior_vulnerability;
        rec.bandwidth_percent = report.bandwidth_increase_percent;
    } catch (const std::exception& e) {
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        rec.renyi_bits = rec.shannon_bits = rec.vulnerability = rec.bandwidth_percent = nan;
        rec.elapsed_seconds = nan;
        rec.error = e.what();
    }
    rec.total_seconds = seconds_since(total_start);
    return rec;
}

} // namespace

std::string_view algorithm_name(Algorithm a) {
    switch (a) {
    case Algorithm::PopRe: return "popre";
    case Algorithm::PopReSh: return "popresh";
    case Algorithm::PopSh: return "popsh";
    case Algorithm::PrpRe: return "prpre";
    case Algorithm::PrpReBa: return "prpreba";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name) {
    for (Algorithm a : kAllAlgorithms) {
        if (algorithm_name(a) == name) return a;
    }
    throw ValidationError("unknown algorithm `" + std::string(name) +
                          "` (popre, popresh, popsh, prpre, prpreba)");
}

JointMatrix run_algorithm(Algorithm a, std::shared_ptr<const PaddingProblem> problem) {
    switch (a) {
    case Algorithm::PopRe:
        return JointMatrix::from_scheme(problem, solve_pop_renyi(*problem).scheme);
    case Algorithm::PopReSh: {
        const auto base = solve_pop_renyi(*problem);
        return JointMatrix::from_scheme(problem, refine_shannon(*problem, base.scheme));
    }
    case Algorithm::PopSh:
        return JointMatrix::from_scheme(problem, solve_pop_shannon(*problem).scheme);
    case Algorithm::PrpRe:
        return solve_prp_renyi(std::move(problem));
    case Algorithm::PrpReBa:
        return reduce_bandwidth(solve_prp_renyi(std::move(problem)));
    }
    throw InternalError("unhandled algorithm");
}

std::vector<BenchRecord> run_bench(const FileSet& files, std::span<const double> c_list,
                                   std::span<const Algorithm> algorithms, bool parallel) {
    struct Cell {
        Algorithm algorithm;
        double c;
    };
    std::vector<Cell> cells;
    for (Algorithm a : algorithms) {
        for (double c : c_list) cells.push_back({a, c});
    }
    std::vector<BenchRecord> records(cells.size());
    const auto count = static_cast<std::ptrdiff_t>(cells.size());
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t k = 0; k < count; ++k) {
            const Cell& cell = cells[static_cast<std::size_t>(k)];
            records[static_cast<std::size_t>(k)] = run_cell(files, cell.c, cell.algorithm);
        }
    } else {
        for (std::ptrdiff_t k = 0; k < count; ++k) {
            const Cell& cell = cells[static_cast<std::size_t>(k)];
            records[static_cast<std::size_t>(k)] = run_cell(files, cell.c, cell.algorithm);
        }
    }
    std::stable_sort(records.begin(), records.end(), [](const BenchRecord& x, const BenchRecord& y) {
        return std::tie(x.algorithm, x.c) < std::tie(y.algorithm, y.c);
    });
    return records;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRecord> records) {
    out << kBenchHeader << '\n';
    const auto old_flags = out.flags();
    const auto old_precision = out.precision(6);
    out.unsetf(std::ios::floatfield);
    for (const BenchRecord& r : records) {
        out << r.algorithm << ',' << r.c << ',' << r.n << ',' << r.renyi_bits << ',' << r.shannon_bits << ','
            << r.vulnerability << ',' << r.bandwidth_percent << ',' << r.elapsed_seconds << '\n';
    }
    out.flags(old_flags);
    out.precision(old_precision);
}

} // namespace padopt
