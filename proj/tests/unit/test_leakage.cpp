#include "padopt/error.hpp"
#include "padopt/leakage.hpp"
#include "support/instances.hpp"
#include "support/reference.hpp"

#include <doctest.h>

#include <cmath>

using namespace padopt;
using namespace padopt::testing;

namespace {

JointMatrix scheme(std::shared_ptr<const PaddingProblem> pb, std::vector<std::size_t> one_based) {
    DeterministicScheme s;
    for (std::size_t j : one_based) s.assignment.push_back(j - 1);
    return JointMatrix::from_scheme(std::move(pb), s);
}

// Random joint matrix: each row splits p_i over its window with random
// weights, some entries zeroed.
JointMatrix random_joint(std::shared_ptr<const PaddingProblem> pb, RandomStream& rng) {
    std::vector<std::vector<Entry>> rows(pb->n());
    for (std::size_t i = 0; i < pb->n(); ++i) {
        const Window w = pb->window(i);
        std::vector<double> weights(w.width());
        double total = 0.0;
        for (auto& x : weights) {
            x = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
            total += x;
        }
        if (total == 0.0) {
            weights[0] = 1.0;
            total = 1.0;
        }
        for (std::size_t k = 0; k < weights.size(); ++k) {
            rows[i].push_back({w.l + k, pb->frequency(i) * weights[k] / total});
        }
    }
    return JointMatrix(std::move(pb), std::move(rows));
}

} // namespace

TEST_CASE("six-file scheme metrics") {
    const auto joint = scheme(six_file_problem(), {3, 3, 3, 6, 6, 6});
    CHECK(posterior_vulnerability(joint) == doctest::Approx(0.43).epsilon(1e-12));
    CHECK(renyi_min_leakage(joint) == doctest::Approx(0.902702).epsilon(1e-6));
    CHECK(shannon_leakage(joint) == doctest::Approx(1.0).epsilon(1e-12));
    const auto bw = bandwidth_report(joint);
    CHECK(bw.expected_before == doctest::Approx(1088.3));
    CHECK(bw.expected_after == doctest::Approx(1120.0));
    CHECK(bw.percent == doctest::Approx(2.9128).epsilon(1e-5));

    const auto report = evaluate(joint);
    CHECK(report.prior_vulnerability == doctest::Approx(0.23));
    CHECK(report.posterior_vulnerability == doctest::Approx(0.43));
    CHECK(report.renyi_bits == doctest::Approx(0.902702).epsilon(1e-6));
    CHECK(report.shannon_bits == doctest::Approx(1.0));
    CHECK(report.expected_size_after >= report.expected_size_before);
}

TEST_CASE("entropy-optimal grouping of the six-file instance") {
    const auto joint = scheme(six_file_problem(), {1, 6, 6, 6, 6, 6});
    CHECK(shannon_leakage(joint) == doctest::Approx(0.760167).epsilon(1e-6));
    CHECK(posterior_vulnerability(joint) == doctest::Approx(0.45));
}

TEST_CASE("degenerate schemes") {
    SUBCASE("all to one column") {
        const auto pb = make_problem({10, 11, 12}, {0.2, 0.5, 0.3}, 2.0);
        const auto joint = scheme(pb, {3, 3, 3});
        CHECK(posterior_vulnerability(joint) == doctest::Approx(0.5));
        CHECK(renyi_min_leakage(joint) == doctest::Approx(0.0));
        CHECK(shannon_leakage(joint) == doctest::Approx(0.0));
    }
    SUBCASE("identity, uniform over four sizes") {
        const auto pb = make_problem({1, 2, 3, 4}, {0.25, 0.25, 0.25, 0.25}, 1.0);
        const auto joint = scheme(pb, {1, 2, 3, 4});
        CHECK(posterior_vulnerability(joint) == doctest::Approx(1.0));
        CHECK(renyi_min_leakage(joint) == doctest::Approx(2.0));
        CHECK(shannon_leakage(joint) == doctest::Approx(2.0));
        CHECK(bandwidth_report(joint).percent == doctest::Approx(0.0));
    }
    SUBCASE("identity with skewed frequencies") {
        const std::vector<double> p{0.1, 0.6, 0.3};
        const auto pb = make_problem({5, 6, 7}, p, 1.0);
        const auto report = evaluate(scheme(pb, {1, 2, 3}));
        CHECK(report.renyi_bits == doctest::Approx(std::log2(1.0 / 0.6)));
        CHECK(report.shannon_bits == doctest::Approx(xlog(0.1) + xlog(0.6) + xlog(0.3)));
        CHECK(report.bandwidth_increase_percent == doctest::Approx(0.0));
    }
}

TEST_CASE("joint matrix validation") {
    const auto pb = make_problem({10, 11, 20}, {0.5, 0.2, 0.3}, 1.2);
    CHECK_THROWS_AS(JointMatrix(pb, {{{0, 0.5}}, {{1, 0.2}}}), ValidationError);             // row count
    CHECK_THROWS_AS(JointMatrix(pb, {{{0, 0.4}}, {{1, 0.2}}, {{2, 0.3}}}), ValidationError); // row sum
    CHECK_THROWS_AS(JointMatrix(pb, {{{2, 0.5}}, {{1, 0.2}}, {{2, 0.3}}}), ValidationError); // support
    CHECK_THROWS_AS(JointMatrix(pb, {{{0, 0.6}, {1, -0.1}}, {{1, 0.2}}, {{2, 0.3}}}), ValidationError);
    const JointMatrix ok(pb, {{{1, 0.2}, {0, 0.3}}, {{1, 0.2}}, {{2, 0.3}}});
    CHECK(ok.at(0, 0) == doctest::Approx(0.3));
    CHECK(ok.row(0).front().column == 0);  // sorted
    CHECK_FALSE(ok.is_deterministic());
    CHECK_THROWS_AS(ok.to_scheme(), ValidationError);
}

TEST_CASE("size secret merges files of equal size") {
    // Two files of size 10 (0.3 each) and one of size 20 (0.4); everything
    // padded to 20.
    const auto pb = make_problem({10, 10, 20}, {0.3, 0.3, 0.4}, 2.0);
    const auto joint = scheme(pb, {2, 2, 2});
    CHECK(prior_vulnerability(*pb, Secret::File) == doctest::Approx(0.4));
    CHECK(prior_vulnerability(*pb, Secret::Size) == doctest::Approx(0.6));
    CHECK(posterior_vulnerability(joint, Secret::Size) == doctest::Approx(0.6));
    CHECK(renyi_min_leakage(joint, Secret::Size) == doctest::Approx(0.0));
    CHECK(shannon_leakage(joint, Secret::Size) == doctest::Approx(0.0));

    // Identity: each size class is revealed.
    const auto id = scheme(pb, {1, 1, 2});
    CHECK(posterior_vulnerability(id, Secret::Size) == doctest::Approx(1.0));
    CHECK(renyi_min_leakage(id, Secret::Size) == doctest::Approx(std::log2(1.0 / 0.6)));
    CHECK(shannon_leakage(id, Secret::Size) == doctest::Approx(xlog(0.6) + xlog(0.4)));
    CHECK(posterior_vulnerability(id, Secret::File) == doctest::Approx(0.7));
}

TEST_CASE("property: metrics agree with dense references and stay nonnegative") {
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        const double c = kSweepMultipliers[seed % 5];
        const auto pb = random_problem(seed, 8, c);
        RandomStream rng(seed, 11);
        const JointMatrix joint = random_joint(pb, rng);
        const Dense d = dense(joint);

        const double v = posterior_vulnerability(joint);
        CHECK(v == doctest::Approx(dense_vulnerability(d)).epsilon(1e-12));
        CHECK(v >= pb->files().max_frequency() - 1e-12);
        CHECK(renyi_min_leakage(joint) >= -1e-9);
        const double mi = shannon_leakage(joint);
        CHECK(mi >= -1e-9);
        CHECK(mi == doctest::Approx(dense_mutual_information(d)).epsilon(1e-9));
        CHECK(bandwidth_report(joint).percent >= -1e-9);

        // deterministic round trip
        DeterministicScheme s;
        for (std::size_t i = 0; i < pb->n(); ++i) {
            const Window w = pb->window(i);
            s.assignment.push_back(w.l + rng.below(w.width()));
        }
        const JointMatrix det = JointMatrix::from_scheme(pb, s);
        CHECK(det.is_deterministic());
        CHECK(det.to_scheme().assignment == s.assignment);
        CHECK(posterior_vulnerability(det) == doctest::Approx(assignment_vulnerability(*pb, s.assignment)));
        CHECK(shannon_leakage(det) == doctest::Approx(assignment_entropy(*pb, s.assignment)).epsilon(1e-12));
    }
}
