#include "padopt/pop.hpp"

#include "padopt/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <unordered_map>
#include <utility>

namespace padopt {

namespace {

// Range argmax over frequencies, lowest index on ties.
class ArgmaxTable {
public:
    explicit ArgmaxTable(const PaddingProblem& problem) : problem_(problem) {
        const std::size_t n = problem.n();
        levels_.emplace_back(n);
        for (std::size_t i = 0; i < n; ++i) levels_[0][i] = static_cast<std::uint32_t>(i);
        for (std::size_t span = 2; span <= n; span *= 2) {
            const auto& prev = levels_.back();
            std::vector<std::uint32_t> next(n - span + 1);
            for (std::size_t i = 0; i + span <= n; ++i) {
                next[i] = better(prev[i], prev[i + span / 2]);
            }
            levels_.push_back(std::move(next));
        }
    }

    // argmax over [begin, end), end > begin
    std::size_t query(std::size_t begin, std::size_t end) const {
        const std::size_t len = end - begin;
        const std::size_t level = std::bit_width(len) - 1;
        return better(levels_[level][begin], levels_[level][end - (std::size_t{1} << level)]);
    }

private:
    std::uint32_t better(std::uint32_t a, std::uint32_t b) const {
        const double pa = problem_.frequency(a);
        const double pb = problem_.frequency(b);
        if (pa > pb) return a;
        if (pb > pa) return b;
        return std::min(a, b);
    }

    const PaddingProblem& problem_;
    std::vector<std::vector<std::uint32_t>> levels_;
};

struct IntervalKey {
    std::size_t a;
    std::size_t b;
    bool operator==(const IntervalKey&) const = default;
};

struct IntervalHash {
    std::size_t operator()(const IntervalKey& k) const {
        return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(k.a) << 32) ^ k.b);
    }
};

struct Decision {
    double value = 0.0;
    std::size_t choice = 0;
};

// PopRe state machine over half-open file ranges [a, b).
class RenyiDp {
public:
    explicit RenyiDp(const PaddingProblem& problem) : problem_(problem), argmax_(problem) {
        const std::size_t n = problem.n();
        const std::size_t m = problem.m();
        right_below_.assign(m, 0);
        left_upto_.assign(m, 0);
        // right_below_[k] = #{i : r_i < k}, left_upto_[k] = #{i : l_i <= k}
        for (std::size_t i = 0; i < n; ++i) {
            const Window w = problem.window(i);
            if (w.r + 1 < m) ++right_below_[w.r + 1];
            ++left_upto_[w.l];
        }
        for (std::size_t k = 1; k < m; ++k) {
            right_below_[k] += right_below_[k - 1];
            left_upto_[k] += left_upto_[k - 1];
        }
    }

    double solve() {
        const std::size_t n = problem_.n();
        std::vector<IntervalKey> stack{{0, n}};
        while (!stack.empty()) {
            const IntervalKey s = stack.back();
            if (memo_.contains(s)) {
                stack.pop_back();
                continue;
            }
            const std::size_t before = stack.size();
            for_each_choice(s, [&](std::size_t, IntervalKey left, IntervalKey right) {
                if (!known(left)) stack.push_back(left);
                if (!known(right)) stack.push_back(right);
            });
            if (stack.size() != before) continue;
            stack.pop_back();
            memo_.emplace(s, decide(s));
        }
        return value({0, n});
    }

    DeterministicScheme reconstruct() const {
        DeterministicScheme scheme;
        scheme.assignment.assign(problem_.n(), 0);
        std::vector<IntervalKey> stack{{0, problem_.n()}};
        while (!stack.empty()) {
            const IntervalKey s = stack.back();
            stack.pop_back();
            if (s.a == s.b) continue;
            const std::size_t k = memo_.at(s).choice;
            const auto [lo, hi] = group(s, k);
            for (std::size_t i = lo; i < hi; ++i) scheme.assignment[i] = k;
            stack.push_back({s.a, lo});
            stack.push_back({hi, s.b});
        }
        return scheme;
    }

private:
    // Files of [a, b) that admit column k; contiguous by monotonicity of l, r.
    std::pair<std::size_t, std::size_t> group(IntervalKey s, std::size_t k) const {
        return {std::max(s.a, right_below_[k]), std::min(s.b, left_upto_[k])};
    }

    template <typename Fn>
    void for_each_choice(IntervalKey s, Fn&& fn) const {
        const std::size_t top = argmax_.query(s.a, s.b);
        const Window w = problem_.window(top);
        for (std::size_t k = w.l; k <= w.r; ++k) {
            const auto [lo, hi] = group(s, k);
            fn(k, IntervalKey{s.a, lo}, IntervalKey{hi, s.b});
        }
    }

    bool known(IntervalKey s) const { return s.a == s.b || memo_.contains(s); }
    double value(IntervalKey s) const { return s.a == s.b ? 0.0 : memo_.at(s).value; }

    Decision decide(IntervalKey s) const {
        const double top = problem_.frequency(argmax_.query(s.a, s.b));
        Decision best{std::numeric_limits<double>::infinity(), 0};
        for_each_choice(s, [&](std::size_t k, IntervalKey left, IntervalKey right) {
            const double candidate = top + value(left) + value(right);
            if (candidate < best.value - kTieTolerance) best = {candidate, k};
        });
        return best;
    }

    const PaddingProblem& problem_;
    ArgmaxTable argmax_;
    std::vector<std::size_t> right_below_;
    std::vector<std::size_t> left_upto_;
    std::unordered_map<IntervalKey, Decision, IntervalHash> memo_;
};

std::vector<double> assigned_maxima(const PaddingProblem& problem, const DeterministicScheme& scheme) {
    std::vector<double> c(problem.m(), 0.0);
    for (std::size_t i = 0; i < problem.n(); ++i) {
        c[scheme.assignment[i]] = std::max(c[scheme.assignment[i]], problem.frequency(i));
    }
    return c;
}

PossSets poss_from_maxima(const PaddingProblem& problem, const std::vector<double>& maxima) {
    std::vector<std::size_t> used;
    for (std::size_t j = 0; j < maxima.size(); ++j) {
        if (maxima[j] > 0.0) used.push_back(j);
    }
    PossSets poss(problem.n());
    for (std::size_t i = 0; i < problem.n(); ++i) {
        const Window w = problem.window(i);
        const double p = problem.frequency(i);
        auto it = std::lower_bound(used.begin(), used.end(), w.l);
        for (; it != used.end() && *it <= w.r; ++it) {
            if (maxima[*it] >= p - kTieTolerance) poss[i].push_back(*it);
        }
    }
    return poss;
}

// Shannon refinement DP over one cluster of columns. Columns are compressed
// to the used ones; files are restricted to those whose poss span lies in the
// cluster.
class ShannonRefineDp {
public:
    struct File {
        std::size_t index;
        double p;
        std::vector<std::size_t> poss;  // compressed, ascending
    };

    explicit ShannonRefineDp(std::vector<File> files) : files_(std::move(files)) {}

    void solve_into(std::size_t first, std::size_t last, const std::vector<std::size_t>& columns,
                    DeterministicScheme& scheme) {
        solve(first, last);
        assign(first, last, columns, scheme);
    }

private:
    bool in_scope(const File& f, std::size_t a, std::size_t b) const {
        return f.poss.front() >= a && f.poss.back() <= b;
    }

    double solve(std::size_t a, std::size_t b) {
        if (a > b) return 0.0;
        const IntervalKey key{a, b};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second.value;

        const std::size_t width = b - a + 1;
        std::vector<double> mass(width, 0.0);
        std::vector<int> interior(width, 0);
        std::vector<int> interior_member(width, 0);
        bool any = false;
        for (const File& f : files_) {
            if (!in_scope(f, a, b)) continue;
            any = true;
            const std::size_t lo = f.poss.front();
            const std::size_t hi = f.poss.back();
            for (std::size_t j : f.poss) {
                mass[j - a] += f.p;
                if (lo < j && j < hi) ++interior_member[j - a];
            }
            for (std::size_t j = lo + 1; j < hi; ++j) ++interior[j - a];
        }
        Decision best{std::numeric_limits<double>::infinity(), a};
        if (!any) {
            best.value = 0.0;
        } else {
            for (std::size_t j = a; j <= b; ++j) {
                if (interior[j - a] != interior_member[j - a]) continue;  // straddler
                const double left = j > a ? solve(a, j - 1) : 0.0;
                const double right = solve(j + 1, b);
                const double candidate = entropy_term(mass[j - a]) + left + right;
                if (candidate < best.value - kTieTolerance) best = {candidate, j};
            }
            if (!std::isfinite(best.value)) {
                throw InternalError("shannon refinement: no straddler-free column");
            }
        }
        memo_.emplace(key, best);
        return best.value;
    }

    void assign(std::size_t a, std::size_t b, const std::vector<std::size_t>& columns,
                DeterministicScheme& scheme) const {
        if (a > b) return;
        const Decision& d = memo_.at({a, b});
        const std::size_t j = d.choice;
        bool any = false;
        for (const File& f : files_) {
            if (!in_scope(f, a, b)) continue;
            any = true;
            if (std::binary_search(f.poss.begin(), f.poss.end(), j)) scheme.assignment[f.index] = columns[j];
        }
        if (!any) return;
        if (j > a) assign(a, j - 1, columns, scheme);
        assign(j + 1, b, columns, scheme);
    }

    std::vector<File> files_;
    std::unordered_map<IntervalKey, Decision, IntervalHash> memo_;
};

} // namespace

PopSolution solve_pop_renyi(const PaddingProblem& problem) {
    RenyiDp dp(problem);
    PopSolution out;
    out.objective = dp.solve();
    out.scheme = dp.reconstruct();
    return out;
}

PossSets compute_poss(const PaddingProblem& problem, const JointMatrix& joint) {
    return poss_from_maxima(problem, joint.column_maxima());
}

PossSets compute_poss(const PaddingProblem& problem, const DeterministicScheme& scheme) {
    return poss_from_maxima(problem, assigned_maxima(problem, scheme));
}

DeterministicScheme refine_shannon(const PaddingProblem& problem, const DeterministicScheme& scheme) {
    const PossSets poss = compute_poss(problem, scheme);

    std::vector<std::size_t> columns;  // used columns, ascending
    {
        std::vector<bool> used(problem.m(), false);
        for (const auto& ps : poss) {
            for (std::size_t j : ps) used[j] = true;
        }
        for (std::size_t j = 0; j < used.size(); ++j) {
            if (used[j]) columns.push_back(j);
        }
    }
    auto compress = [&](std::size_t j) {
        return static_cast<std::size_t>(std::lower_bound(columns.begin(), columns.end(), j) - columns.begin());
    };

    std::vector<ShannonRefineDp::File> files(problem.n());
    for (std::size_t i = 0; i < problem.n(); ++i) {
        if (poss[i].empty()) throw InternalError("shannon refinement: empty poss set");
        files[i].index = i;
        files[i].p = problem.frequency(i);
        for (std::size_t j : poss[i]) files[i].poss.push_back(compress(j));
    }
    std::stable_sort(files.begin(), files.end(), [](const auto& x, const auto& y) {
        return x.poss.front() < y.poss.front();
    });

    // Files whose poss spans do not overlap never interact; solve each
    // connected cluster of columns on its own.
    DeterministicScheme refined = scheme;
    std::size_t begin = 0;
    while (begin < files.size()) {
        std::size_t end = begin + 1;
        std::size_t reach = files[begin].poss.back();
        while (end < files.size() && files[end].poss.front() <= reach) {
            reach = std::max(reach, files[end].poss.back());
            ++end;
        }
        const std::size_t first = files[begin].poss.front();
        std::vector<ShannonRefineDp::File> cluster(std::make_move_iterator(files.begin() + static_cast<std::ptrdiff_t>(begin)),
                                                   std::make_move_iterator(files.begin() + static_cast<std::ptrdiff_t>(end)));
        ShannonRefineDp dp(std::move(cluster));
        dp.solve_into(first, reach, columns, refined);
        begin = end;
    }

    const double v_in = scheme_vulnerability(problem, scheme);
    const double v_out = scheme_vulnerability(problem, refined);
    if (std::abs(v_out - v_in) > kProbTolerance) {
        throw InternalError("shannon refinement changed the vulnerability");
    }
    // The straddler restriction can exclude every scheme at or below the
    // input's entropy; fall back to the input then.
    if (scheme_entropy(problem, refined) > scheme_entropy(problem, scheme)) return scheme;
    return refined;
}

ShannonSolution solve_pop_shannon(const PaddingProblem& problem) {
    const std::size_t n = problem.n();
    std::vector<double> best(n + 1, 0.0);
    std::vector<std::size_t> cut(n, 0);
    for (std::size_t i = n; i-- > 0;) {
        const std::size_t right = problem.window(i).r;
        double mass = 0.0;
        best[i] = std::numeric_limits<double>::infinity();
        for (std::size_t k = i; k < n && problem.window(k).l <= right; ++k) {
            mass += problem.frequency(k);
            const double candidate = entropy_term(mass) + best[k + 1];
            if (candidate < best[i] - kTieTolerance) {
                best[i] = candidate;
                cut[i] = k;
            }
        }
    }
    ShannonSolution out;
    out.scheme.assignment.assign(n, 0);
    for (std::size_t i = 0; i < n;) {
        const std::size_t k = cut[i];
        for (std::size_t t = i; t <= k; ++t) out.scheme.assignment[t] = problem.window(k).l;
        i = k + 1;
    }
    out.shannon_bits = scheme_entropy(problem, out.scheme);
    return out;
}

double scheme_vulnerability(const PaddingProblem& problem, const DeterministicScheme& scheme) {
    double v = 0.0;
    for (double c : assigned_maxima(problem, scheme)) v += c;
    return v;
}

double scheme_entropy(const PaddingProblem& problem, const DeterministicScheme& scheme) {
    std::vector<double> mass(problem.m(), 0.0);
    for (std::size_t i = 0; i < problem.n(); ++i) mass[scheme.assignment[i]] += problem.frequency(i);
    return entropy_bits(mass);
}

double scheme_expected_size(const PaddingProblem& problem, const DeterministicScheme& scheme) {
    double total = 0.0;
    for (std::size_t i = 0; i < problem.n(); ++i) {
        total += problem.frequency(i) * static_cast<double>(problem.alphabet()[scheme.assignment[i]]);
    }
    return total;
}

} // namespace padopt
