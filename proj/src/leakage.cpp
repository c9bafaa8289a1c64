#include "padopt/leakage.hpp"

#include "padopt/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace padopt {

namespace {

// Calls fn(begin, end) for each maximal run of rows sharing a secret value.
template <typename Fn>
void for_each_secret_class(const PaddingProblem& problem, Secret secret, Fn&& fn) {
    const std::size_t n = problem.n();
    if (secret == Secret::File) {
        for (std::size_t i = 0; i < n; ++i) fn(i, i + 1);
        return;
    }
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i == n || problem.unpadded_size(i) != problem.unpadded_size(begin)) {
            fn(begin, i);
            begin = i;
        }
    }
}

// Column sums over a block of rows, accumulated into a dense scratch buffer;
// touched lists the nonzero columns.
struct BlockSums {
    std::vector<double> sums;
    std::vector<std::size_t> touched;

    explicit BlockSums(std::size_t m) : sums(m, 0.0) {}

    void accumulate(const JointMatrix& joint, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            for (const Entry& e : joint.row(i)) {
                if (sums[e.column] == 0.0) touched.push_back(e.column);
                sums[e.column] += e.mass;
            }
        }
    }

    void clear() {
        for (std::size_t j : touched) sums[j] = 0.0;
        touched.clear();
    }
};

} // namespace

double entropy_term(double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; }

double entropy_bits(std::span<const double> masses) {
    double h = 0.0;
    for (double x : masses) h += entropy_term(x);
    return h;
}

JointMatrix::JointMatrix(std::shared_ptr<const PaddingProblem> problem,
                         std::vector<std::vector<Entry>> rows)
    : problem_(std::move(problem)) {
    const PaddingProblem& pb = *problem_;
    if (rows.size() != pb.n()) {
        throw ValidationError("joint matrix has " + std::to_string(rows.size()) + " rows, expected " +
                              std::to_string(pb.n()));
    }
    row_start_.reserve(rows.size() + 1);
    row_start_.push_back(0);
    std::size_t total = 0;
    for (const auto& r : rows) total += r.size();
    entries_.reserve(total);

    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& row = rows[i];
        std::sort(row.begin(), row.end(),
                  [](const Entry& a, const Entry& b) { return a.column < b.column; });
        const Window w = pb.window(i);
        double sum = 0.0;
        const std::size_t first = entries_.size();
        for (const Entry& e : row) {
            if (!(e.mass >= 0.0) || !std::isfinite(e.mass)) {
                throw ValidationError("row " + std::to_string(i + 1) + ": negative or non-finite mass");
            }
            if (e.mass == 0.0) continue;
            if (!w.contains(e.column)) {
                throw ValidationError("row " + std::to_string(i + 1) + ": mass in column " +
                                      std::to_string(e.column + 1) + " outside [" +
                                      std::to_string(w.l + 1) + ", " + std::to_string(w.r + 1) + "]");
            }
            if (entries_.size() > first && entries_.back().column == e.column) {
                entries_.back().mass += e.mass;
            } else {
                entries_.push_back(e);
            }
            sum += e.mass;
        }
        if (std::abs(sum - pb.frequency(i)) > kProbTolerance) {
            throw ValidationError("row " + std::to_string(i + 1) + ": sum " + std::to_string(sum) +
                                  " differs from frequency " + std::to_string(pb.frequency(i)));
        }
        row_start_.push_back(entries_.size());
    }
}

JointMatrix JointMatrix::from_scheme(std::shared_ptr<const PaddingProblem> problem,
                                     const DeterministicScheme& scheme) {
    if (scheme.assignment.size() != problem->n()) {
        throw ValidationError("scheme has " + std::to_string(scheme.assignment.size()) +
                              " assignments, expected " + std::to_string(problem->n()));
    }
    std::vector<std::vector<Entry>> rows(problem->n());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].push_back({scheme.assignment[i], problem->frequency(i)});
    }
    return JointMatrix(std::move(problem), std::move(rows));
}

double JointMatrix::at(std::size_t i, std::size_t j) const {
    auto r = row(i);
    auto it = std::lower_bound(r.begin(), r.end(), j,
                               [](const Entry& e, std::size_t col) { return e.column < col; });
    return (it != r.end() && it->column == j) ? it->mass : 0.0;
}

std::vector<double> JointMatrix::column_maxima() const {
    std::vector<double> c(cols(), 0.0);
    for (const Entry& e : entries_) c[e.column] = std::max(c[e.column], e.mass);
    return c;
}

std::vector<double> JointMatrix::column_masses() const {
    std::vector<double> q(cols(), 0.0);
    for (const Entry& e : entries_) q[e.column] += e.mass;
    return q;
}

bool JointMatrix::is_deterministic() const {
    for (std::size_t i = 0; i < rows(); ++i) {
        if (row(i).size() != 1) return false;
    }
    return true;
}

DeterministicScheme JointMatrix::to_scheme() const {
    if (!is_deterministic()) throw ValidationError("joint matrix is not deterministic");
    DeterministicScheme s;
    s.assignment.reserve(rows());
    for (std::size_t i = 0; i < rows(); ++i) s.assignment.push_back(row(i).front().column);
    return s;
}

double prior_vulnerability(const PaddingProblem& problem, Secret secret) {
    double best = 0.0;
    for_each_secret_class(problem, secret, [&](std::size_t b, std::size_t e) {
        double mass = 0.0;
        for (std::size_t i = b; i < e; ++i) mass += problem.frequency(i);
        best = std::max(best, mass);
    });
    return best;
}

double posterior_vulnerability(const JointMatrix& joint, Secret secret) {
    if (secret == Secret::File) {
        double v = 0.0;
        for (double c : joint.column_maxima()) v += c;
        return v;
    }
    std::vector<double> best(joint.cols(), 0.0);
    BlockSums block(joint.cols());
    for_each_secret_class(joint.problem(), secret, [&](std::size_t b, std::size_t e) {
        block.accumulate(joint, b, e);
        for (std::size_t j : block.touched) best[j] = std::max(best[j], block.sums[j]);
        block.clear();
    });
    double v = 0.0;
    for (double c : best) v += c;
    return v;
}

double renyi_min_leakage(const JointMatrix& joint, Secret secret) {
    return std::log2(posterior_vulnerability(joint, secret) /
                     prior_vulnerability(joint.problem(), secret));
}

double shannon_leakage(const JointMatrix& joint, Secret secret) {
    const double output_entropy = entropy_bits(joint.column_masses());
    // H(output | secret) = sum over classes of -sum_j I_cj log2(I_cj / p_c)
    double conditional = 0.0;
    BlockSums block(joint.cols());
    for_each_secret_class(joint.problem(), secret, [&](std::size_t b, std::size_t e) {
        block.accumulate(joint, b, e);
        double mass = 0.0;
        for (std::size_t j : block.touched) mass += block.sums[j];
        for (std::size_t j : block.touched) {
            const double x = block.sums[j];
            if (x > 0.0) conditional -= x * std::log2(x / mass);
        }
        block.clear();
    });
    return output_entropy - conditional;
}

BandwidthReport bandwidth_report(const JointMatrix& joint) {
    const PaddingProblem& pb = joint.problem();
    BandwidthReport r;
    for (std::size_t i = 0; i < pb.n(); ++i) {
        r.expected_before += pb.frequency(i) * static_cast<double>(pb.unpadded_size(i));
        for (const Entry& e : joint.row(i)) {
            r.expected_after += e.mass * static_cast<double>(pb.alphabet()[e.column]);
        }
    }
    r.percent = 100.0 * (r.expected_after - r.expected_before) / r.expected_before;
    return r;
}

namespace {

// Rounding can leave a leakage of -1e-17 where the exact value is 0.
double clamp_rounding(double bits) { return (bits < 0.0 && bits > -1e-12) ? 0.0 : bits; }

} // namespace

LeakageReport evaluate(const JointMatrix& joint, Secret secret) {
    LeakageReport r;
    r.prior_vulnerability = prior_vulnerability(joint.problem(), secret);
    r.posterior_vulnerability = posterior_vulnerability(joint, secret);
    r.renyi_bits = clamp_rounding(std::log2(r.posterior_vulnerability / r.prior_vulnerability));
    r.shannon_bits = clamp_rounding(shannon_leakage(joint, secret));
    const BandwidthReport bw = bandwidth_report(joint);
    r.expected_size_before = bw.expected_before;
    r.expected_size_after = bw.expected_after;
    r.bandwidth_increase_percent = bw.percent;
    return r;
}

} // namespace padopt
