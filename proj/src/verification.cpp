#include "padopt/verification.hpp"

#include "padopt/error.hpp"
#include "padopt/pop.hpp"
#include "padopt/rng.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace padopt {

namespace {

constexpr std::uint64_t kBlockSize = 1 << 16;
constexpr std::uint64_t kMaxGridPoints = 50'000'000;
constexpr double kInf = std::numeric_limits<double>::infinity();

// (value, enumeration index); lexicographic minimum is independent of the
// order in which blocks are merged.
struct Best {
    double value = kInf;
    std::uint64_t index = std::numeric_limits<std::uint64_t>::max();

    void offer(double v, std::uint64_t idx) {
        if (v < value || (v == value && idx < index)) {
            value = v;
            index = idx;
        }
    }
    void merge(const Best& o) { offer(o.value, o.index); }
};

struct FirstPass {
    Best vulnerability;
    Best shannon;
};

struct SecondPass {
    std::uint64_t optimal = 0;
    Best bandwidth;
};

// Mixed-radix enumeration of assignments: file 0 is the least significant
// digit.
class SchemeWalker {
public:
    SchemeWalker(const PaddingProblem& problem, std::uint64_t start)
        : problem_(problem), assignment_(problem.n()), maxima_(problem.m()), masses_(problem.m()) {
        for (std::size_t i = 0; i < problem.n(); ++i) {
            const Window w = problem.window(i);
            assignment_[i] = w.l + static_cast<std::size_t>(start % w.width());
            start /= w.width();
        }
    }

    void advance() {
        for (std::size_t i = 0; i < assignment_.size(); ++i) {
            if (assignment_[i] < problem_.window(i).r) {
                ++assignment_[i];
                return;
            }
            assignment_[i] = problem_.window(i).l;
        }
    }

    void measure(double& vulnerability, double& entropy, double& expected_size) {
        std::fill(maxima_.begin(), maxima_.end(), 0.0);
        std::fill(masses_.begin(), masses_.end(), 0.0);
        expected_size = 0.0;
        for (std::size_t i = 0; i < assignment_.size(); ++i) {
            const std::size_t j = assignment_[i];
            const double p = problem_.frequency(i);
            maxima_[j] = std::max(maxima_[j], p);
            masses_[j] += p;
            expected_size += p * static_cast<double>(problem_.alphabet()[j]);
        }
        vulnerability = 0.0;
        entropy = 0.0;
        for (std::size_t j = 0; j < maxima_.size(); ++j) {
            vulnerability += maxima_[j];
            entropy += entropy_term(masses_[j]);
        }
    }

    const std::vector<std::size_t>& assignment() const { return assignment_; }

private:
    const PaddingProblem& problem_;
    std::vector<std::size_t> assignment_;
    std::vector<double> maxima_;
    std::vector<double> masses_;
};

FirstPass first_pass(const PaddingProblem& problem, std::uint64_t begin, std::uint64_t end) {
    FirstPass out;
    SchemeWalker walker(problem, begin);
    double v = 0, h = 0, s = 0;
    for (std::uint64_t idx = begin; idx < end; ++idx, walker.advance()) {
        walker.measure(v, h, s);
        out.vulnerability.offer(v, idx);
        out.shannon.offer(h, idx);
    }
    return out;
}

SecondPass second_pass(const PaddingProblem& problem, double min_vulnerability, std::uint64_t begin,
                       std::uint64_t end) {
    SecondPass out;
    SchemeWalker walker(problem, begin);
    double v = 0, h = 0, s = 0;
    for (std::uint64_t idx = begin; idx < end; ++idx, walker.advance()) {
        walker.measure(v, h, s);
        if (v <= min_vulnerability + kTieTolerance) {
            ++out.optimal;
            out.bandwidth.offer(s, idx);
        }
    }
    return out;
}

DeterministicScheme scheme_at(const PaddingProblem& problem, std::uint64_t index) {
    return DeterministicScheme{SchemeWalker(problem, index).assignment()};
}

std::uint64_t checked_search_space(const PaddingProblem& problem) {
    const std::uint64_t total = pop_search_space(problem);
    if (total > kMaxPopSchemes) {
        throw ValidationError("deterministic search space has " +
                              (total == UINT64_MAX ? std::string("more than 2^64")
                                                   : std::to_string(total)) +
                              " schemes; the limit is " + std::to_string(kMaxPopSchemes));
    }
    return total;
}

OracleResult assemble(const PaddingProblem& problem, std::uint64_t total, const FirstPass& first,
                      const SecondPass& second) {
    OracleResult r;
    r.schemes_enumerated = total;
    r.min_vulnerability = first.vulnerability.value;
    r.min_shannon_bits = first.shannon.value;
    r.min_bandwidth_among_vulnerability_optimal = second.bandwidth.value;
    r.optimal_scheme_count = second.optimal;
    r.vulnerability_witness = scheme_at(problem, first.vulnerability.index);
    r.shannon_witness = scheme_at(problem, first.shannon.index);
    r.bandwidth_witness = scheme_at(problem, second.bandwidth.index);
    return r;
}

void for_each_composition(std::size_t slots, int chunks, std::vector<int>& counts, std::size_t pos,
                          const auto& fn) {
    if (pos + 1 == slots) {
        counts[pos] = chunks;
        fn(counts);
        return;
    }
    for (int c = 0; c <= chunks; ++c) {
        counts[pos] = c;
        for_each_composition(slots, chunks - c, counts, pos + 1, fn);
    }
}

double binomial(std::uint64_t n, std::uint64_t k) {
    double r = 1.0;
    for (std::uint64_t t = 1; t <= k; ++t) r = r * static_cast<double>(n - k + t) / static_cast<double>(t);
    return r;
}

} // namespace

std::uint64_t pop_search_space(const PaddingProblem& problem) {
    std::uint64_t total = 1;
    for (const Window& w : problem.constraints().windows()) {
        if (total > UINT64_MAX / w.width()) return UINT64_MAX;
        total *= w.width();
    }
    return total;
}

OracleResult brute_force_pop_serial(const PaddingProblem& problem) {
    const std::uint64_t total = checked_search_space(problem);
    const FirstPass first = first_pass(problem, 0, total);
    const SecondPass second = second_pass(problem, first.vulnerability.value, 0, total);
    return assemble(problem, total, first, second);
}

OracleResult brute_force_pop(const PaddingProblem& problem) {
    const std::uint64_t total = checked_search_space(problem);
    const auto blocks = static_cast<std::ptrdiff_t>((total + kBlockSize - 1) / kBlockSize);

    std::vector<FirstPass> firsts(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
        const std::uint64_t begin = static_cast<std::uint64_t>(b) * kBlockSize;
        firsts[static_cast<std::size_t>(b)] = first_pass(problem, begin, std::min(total, begin + kBlockSize));
    }
    FirstPass first;
    for (const auto& f : firsts) {
        first.vulnerability.merge(f.vulnerability);
        first.shannon.merge(f.shannon);
    }

    std::vector<SecondPass> seconds(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
        const std::uint64_t begin = static_cast<std::uint64_t>(b) * kBlockSize;
        seconds[static_cast<std::size_t>(b)] =
            second_pass(problem, first.vulnerability.value, begin, std::min(total, begin + kBlockSize));
    }
    SecondPass second;
    for (const auto& s : seconds) {
        second.optimal += s.optimal;
        second.bandwidth.merge(s.bandwidth);
    }
    return assemble(problem, total, first, second);
}

double grid_search_prp(const PaddingProblem& problem, int resolution) {
    if (problem.n() > kMaxGridFiles || problem.m() > kMaxGridColumns) {
        throw ValidationError("grid search supports at most " + std::to_string(kMaxGridFiles) + " files and " +
                              std::to_string(kMaxGridColumns) + " columns");
    }
    if (resolution < 1 || resolution > kMaxGridResolution) {
        throw ValidationError("grid resolution must be in [1, " + std::to_string(kMaxGridResolution) + "]");
    }
    double points = 1.0;
    for (const Window& w : problem.constraints().windows()) {
        points *= binomial(static_cast<std::uint64_t>(resolution) + w.width() - 1, w.width() - 1);
    }
    if (points > static_cast<double>(kMaxGridPoints)) throw ValidationError("grid too large");

    const std::size_t n = problem.n();
    const std::size_t m = problem.m();
    double best = kInf;
    // maxima[i] holds the column maxima after rows 0..i-1 are placed.
    std::vector<std::vector<double>> maxima(n + 1, std::vector<double>(m, 0.0));
    std::vector<std::vector<int>> counts(n);

    auto place = [&](auto& self, std::size_t i) -> void {
        if (i == n) {
            double v = 0.0;
            for (double c : maxima[n]) v += c;
            best = std::min(best, v);
            return;
        }
        const Window w = problem.window(i);
        const double chunk = problem.frequency(i) / resolution;
        counts[i].assign(w.width(), 0);
        for_each_composition(w.width(), resolution, counts[i], 0, [&](const std::vector<int>& c) {
            maxima[i + 1] = maxima[i];
            for (std::size_t k = 0; k < c.size(); ++k) {
                const double mass = chunk * c[k];
                maxima[i + 1][w.l + k] = std::max(maxima[i + 1][w.l + k], mass);
            }
            self(self, i + 1);
        });
    };
    place(place, 0);
    return best;
}

AttackTrace simulate_attacker(const JointMatrix& joint, std::uint64_t trials, std::uint64_t seed,
                              std::uint64_t checkpoint_every) {
    if (trials < 1) throw ValidationError("trials must be at least 1");
    if (checkpoint_every < 1) checkpoint_every = trials;
    const PaddingProblem& pb = joint.problem();
    const std::size_t n = pb.n();

    std::vector<double> file_cdf(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) file_cdf[i] = acc += pb.frequency(i);

    // Guess per column: largest joint mass, lowest index on ties.
    std::vector<std::size_t> guess(pb.m(), 0);
    std::vector<double> best(pb.m(), -1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (const Entry& e : joint.row(i)) {
            if (e.mass > best[e.column]) {
                best[e.column] = e.mass;
                guess[e.column] = i;
            }
        }
    }

    AttackTrace trace;
    trace.trials = trials;
    trace.seed = seed;
    trace.theoretical_optimum = posterior_vulnerability(joint);

    RandomStream rng(seed, 0);
    std::uint64_t hits = 0;
    for (std::uint64_t t = 1; t <= trials; ++t) {
        const double u = rng.uniform() * file_cdf.back();
        auto it = std::upper_bound(file_cdf.begin(), file_cdf.end(), u);
        const auto file = std::min(n - 1, static_cast<std::size_t>(it - file_cdf.begin()));

        const auto row = joint.row(file);
        double target = rng.uniform() * pb.frequency(file);
        std::size_t column = row.back().column;
        for (const Entry& e : row) {
            if (target < e.mass) {
                column = e.column;
                break;
            }
            target -= e.mass;
        }
        if (guess[column] == file) ++hits;
        if (t % checkpoint_every == 0 || t == trials) {
            trace.checkpoints.emplace_back(t, static_cast<double>(hits) / static_cast<double>(t));
        }
    }
    return trace;
}

} // namespace padopt
