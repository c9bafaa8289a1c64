#include "padopt/prp.hpp"

#include "padopt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace padopt {

namespace {

// Next undrained file at or after i; drained files are skipped in amortised
// constant time.
class LiveFiles {
public:
    explicit LiveFiles(std::size_t n) : next_(n + 1) { std::iota(next_.begin(), next_.end(), std::size_t{0}); }

    std::size_t find(std::size_t i) {
        std::size_t root = i;
        while (next_[root] != root) root = next_[root];
        while (next_[i] != root) {
            const std::size_t up = next_[i];
            next_[i] = root;
            i = up;
        }
        return root;
    }

    void drain(std::size_t i) { next_[i] = i + 1; }

private:
    std::vector<std::size_t> next_;
};

constexpr double kResidueGuard = 1e-12;

struct Caps {
    std::vector<double> value;          // column maxima of the input
    std::vector<std::size_t> positive;  // columns with a nonzero maximum
};

Caps caps_of(const JointMatrix& joint) {
    Caps caps{joint.column_maxima(), {}};
    for (std::size_t j = 0; j < caps.value.size(); ++j) {
        if (caps.value[j] > 0.0) caps.positive.push_back(j);
    }
    return caps;
}

std::vector<Entry> rebuild_row(const PaddingProblem& problem, const Caps& caps, std::size_t i) {
    const Window w = problem.window(i);
    double remaining = problem.frequency(i);
    std::vector<Entry> row;
    auto it = std::lower_bound(caps.positive.begin(), caps.positive.end(), w.l);
    for (; it != caps.positive.end() && *it <= w.r && remaining > 0.0; ++it) {
        // A leftover within the guard of the cap is the cap: otherwise a
        // second pass sees an ulp of slack and shifts mass again.
        const double cap = caps.value[*it];
        const double x = remaining >= cap - kResidueGuard ? cap : remaining;
        row.push_back({*it, x});
        remaining -= x;
        if (remaining < kResidueGuard) remaining = 0.0;
    }
    if (remaining > kProbTolerance) {
        throw InternalError("bandwidth update: row " + std::to_string(i + 1) +
                            " does not fit under the column maxima");
    }
    if (remaining > 0.0 && !row.empty()) row.back().mass += remaining;
    return row;
}

void check_bandwidth_postconditions(const JointMatrix& before, const JointMatrix& after) {
    const double v_in = posterior_vulnerability(before);
    const double v_out = posterior_vulnerability(after);
    if (std::abs(v_in - v_out) > kProbTolerance) {
        throw InternalError("bandwidth update changed the vulnerability");
    }
    const double s_in = bandwidth_report(before).expected_after;
    const double s_out = bandwidth_report(after).expected_after;
    if (s_out > s_in * (1.0 + 1e-12)) {
        throw InternalError("bandwidth update increased the expected size");
    }
}

} // namespace

JointMatrix solve_prp_renyi(std::shared_ptr<const PaddingProblem> problem) {
    const PaddingProblem& pb = *problem;
    const std::size_t n = pb.n();
    const std::size_t m = pb.m();

    // Files with l_i == j occupy [starts_at[j], starts_at[j + 1]); files that
    // reach column j satisfy r_i >= j, i.e. index >= reach_from[j].
    std::vector<std::size_t> starts_at(m + 1, 0);
    std::vector<std::size_t> reach_from(m + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++starts_at[pb.window(i).l + 1];
        ++reach_from[pb.window(i).r + 1];
    }
    for (std::size_t j = 1; j <= m; ++j) {
        starts_at[j] += starts_at[j - 1];
        reach_from[j] += reach_from[j - 1];
    }

    std::vector<double> budget(n);
    for (std::size_t i = 0; i < n; ++i) budget[i] = pb.frequency(i);
    std::vector<std::vector<Entry>> rows(n);
    LiveFiles live(n);

    for (std::size_t j = m; j-- > 0;) {
        const std::size_t t_begin = starts_at[j];
        const std::size_t t_end = starts_at[j + 1];
        if (t_begin == t_end) continue;

        double cap = 0.0;
        for (std::size_t i = t_begin; i < t_end; ++i) cap = std::max(cap, budget[i]);
        for (std::size_t i = t_begin; i < t_end; ++i) {
            if (budget[i] > 0.0) rows[i].push_back({j, budget[i]});
            budget[i] = 0.0;
            live.drain(i);
        }
        if (cap == 0.0) continue;

        // Files still active with l_i < j <= r_i.
        for (std::size_t i = live.find(reach_from[j]); i < t_begin; i = live.find(i + 1)) {
            const double x = std::min(budget[i], cap);
            rows[i].push_back({j, x});
            budget[i] = std::max(0.0, budget[i] - x);
            if (budget[i] == 0.0) live.drain(i);
        }
    }
    return JointMatrix(std::move(problem), std::move(rows));
}

std::shared_ptr<const PaddingProblem> with_uniform_frequencies(const PaddingProblem& problem) {
    const double p = 1.0 / static_cast<double>(problem.n());
    std::vector<FileRecord> records(problem.files().records().begin(), problem.files().records().end());
    for (auto& r : records) r.frequency = p;
    return std::make_shared<const PaddingProblem>(FileSet::from_records(std::move(records)),
                                                  problem.alphabet(), problem.constraints(),
                                                  problem.original_sizes());
}

JointMatrix reduce_bandwidth_serial(const JointMatrix& joint) {
    const PaddingProblem& pb = joint.problem();
    const Caps caps = caps_of(joint);
    std::vector<std::vector<Entry>> rows(pb.n());
    for (std::size_t i = 0; i < pb.n(); ++i) rows[i] = rebuild_row(pb, caps, i);
    JointMatrix out(joint.problem_ptr(), std::move(rows));
    check_bandwidth_postconditions(joint, out);
    return out;
}

JointMatrix reduce_bandwidth(const JointMatrix& joint) {
    const PaddingProblem& pb = joint.problem();
    const Caps caps = caps_of(joint);
    const auto n = static_cast<std::ptrdiff_t>(pb.n());
    std::vector<std::vector<Entry>> rows(pb.n());
    bool failed = false;
#pragma omp parallel for schedule(dynamic, 1024)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            rows[static_cast<std::size_t>(i)] = rebuild_row(pb, caps, static_cast<std::size_t>(i));
        } catch (const InternalError&) {
#pragma omp atomic write
            failed = true;
        }
    }
    if (failed) throw InternalError("bandwidth update: a row does not fit under the column maxima");
    JointMatrix out(joint.problem_ptr(), std::move(rows));
    check_bandwidth_postconditions(joint, out);
    return out;
}

} // namespace padopt
