#include "padopt/error.hpp"
#include "padopt/leakage.hpp"
#include "padopt/pop.hpp"
#include "padopt/prp.hpp"
#include "padopt/verification.hpp"
#include "support/instances.hpp"
#include "support/reference.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace padopt;
using namespace padopt::testing;

TEST_CASE("brute_force_pop examples") {
    SUBCASE("six-file instance") {
        const auto r = brute_force_pop(*six_file_problem());
        CHECK(r.min_vulnerability == doctest::Approx(0.43).epsilon(1e-12));
        CHECK(r.min_shannon_bits == doctest::Approx(0.760167).epsilon(1e-6));
        CHECK(r.optimal_scheme_count == 2);
        CHECK(r.schemes_enumerated == 3 * 5 * 4 * 3 * 2 * 1);
        CHECK(r.vulnerability_witness.assignment == std::vector<std::size_t>{2, 2, 2, 5, 5, 5});
        CHECK(r.shannon_witness.assignment == std::vector<std::size_t>{0, 5, 5, 5, 5, 5});
    }
    SUBCASE("two files") {
        const auto r = brute_force_pop(*make_problem({1, 2}, {0.3, 0.7}, 2.0));
        CHECK(r.min_vulnerability == doctest::Approx(0.7));
        CHECK(r.schemes_enumerated == 2);
    }
    SUBCASE("c = 1 has one scheme") {
        const auto pb = make_problem({4, 8, 9}, {0.2, 0.3, 0.5}, 1.0);
        const auto r = brute_force_pop(*pb);
        CHECK(r.schemes_enumerated == 1);
        CHECK(r.optimal_scheme_count == 1);
        CHECK(r.min_vulnerability == doctest::Approx(1.0));
        CHECK(r.min_bandwidth_among_vulnerability_optimal == doctest::Approx(0.8 + 2.4 + 4.5));
    }
    SUBCASE("search space bound") {
        std::vector<std::int64_t> sizes;
        std::vector<double> freqs;
        for (int i = 0; i < 30; ++i) {
            sizes.push_back(100 + i);
            freqs.push_back(1.0);
        }
        const auto pb = make_problem(sizes, freqs, 2.0);
        CHECK(pop_search_space(*pb) > kMaxPopSchemes);
        try {
            brute_force_pop(*pb);
            FAIL("expected a ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("search space") != std::string::npos);
        }
    }
}

TEST_CASE("grid_search_prp examples") {
    CHECK(grid_search_prp(*make_problem({1, 2, 3}, {0.2, 0.5, 0.3}, 2.0), 10) == doctest::Approx(0.5));
    for (int k : {1, 2, 5, 10}) {
        CHECK(grid_search_prp(*make_problem({1, 2}, {0.3, 0.7}, 2.0), k) == doctest::Approx(0.7));
    }
    CHECK(grid_search_prp(*make_problem({10, 11, 20}, {0.5, 0.2, 0.3}, 1.2), 10) == doctest::Approx(0.8));
    CHECK_THROWS_AS(grid_search_prp(*six_file_problem(), 4), ValidationError);
    CHECK_THROWS_AS(grid_search_prp(*make_problem({1, 2}, {0.3, 0.7}, 2.0), 0), ValidationError);
}

TEST_CASE("property: oracles agree with the dense references") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const auto pb = random_problem(20000 + seed, 7, kSweepMultipliers[seed % 5]);
        INFO("seed " << seed);
        const auto ref = reference_minima(*pb);
        const auto r = brute_force_pop(*pb);
        CHECK(r.schemes_enumerated == ref.schemes);
        CHECK(r.schemes_enumerated == pop_search_space(*pb));
        CHECK(r.min_vulnerability == doctest::Approx(ref.vulnerability).epsilon(1e-12));
        CHECK(r.min_shannon_bits == doctest::Approx(ref.entropy).epsilon(1e-12));
        CHECK(r.min_bandwidth_among_vulnerability_optimal ==
              doctest::Approx(ref.size_among_optimal).epsilon(1e-12));
        CHECK(assignment_vulnerability(*pb, r.vulnerability_witness.assignment) ==
              doctest::Approx(r.min_vulnerability));

        const auto s = brute_force_pop_serial(*pb);
        CHECK(s.min_vulnerability == r.min_vulnerability);
        CHECK(s.min_shannon_bits == r.min_shannon_bits);
        CHECK(s.min_bandwidth_among_vulnerability_optimal == r.min_bandwidth_among_vulnerability_optimal);
        CHECK(s.optimal_scheme_count == r.optimal_scheme_count);
        CHECK(s.vulnerability_witness.assignment == r.vulnerability_witness.assignment);
        CHECK(s.shannon_witness.assignment == r.shannon_witness.assignment);
        CHECK(s.bandwidth_witness.assignment == r.bandwidth_witness.assignment);

        if (pb->n() <= 4 && pb->m() <= 4) {
            CHECK(grid_search_prp(*pb, 1) == doctest::Approx(r.min_vulnerability).epsilon(1e-12));
        }
    }
}

TEST_CASE("attacker simulation") {
    SUBCASE("six-file scheme converges") {
        const auto pb = six_file_problem();
        const auto joint = JointMatrix::from_scheme(pb, solve_pop_renyi(*pb).scheme);
        const auto trace = simulate_attacker(joint, 100000, 0, 10000);
        CHECK(trace.theoretical_optimum == doctest::Approx(0.43));
        REQUIRE(trace.checkpoints.size() == 10);
        CHECK(trace.checkpoints.back().first == 100000);
        CHECK(std::abs(trace.checkpoints.back().second - 0.43) <= 0.01);
        for (std::size_t k = 1; k < trace.checkpoints.size(); ++k) {
            CHECK(trace.checkpoints[k].first > trace.checkpoints[k - 1].first);
        }
    }
    SUBCASE("single file always wins") {
        const auto joint = solve_prp_renyi(make_problem({5}, {1.0}, 2.0));
        const auto trace = simulate_attacker(joint, 1000, 3, 100);
        for (const auto& [t, rate] : trace.checkpoints) CHECK(rate == 1.0);
    }
    SUBCASE("all to one column, uniform") {
        const auto pb = make_problem({10, 11, 12, 13}, {1, 1, 1, 1}, 2.0);
        const auto joint = JointMatrix::from_scheme(pb, DeterministicScheme{{3, 3, 3, 3}});
        const auto trace = simulate_attacker(joint, 100000, 9, 100000);
        CHECK(std::abs(trace.checkpoints.back().second - 0.25) <= 0.01);
    }
    SUBCASE("checkpoint at the last trial") {
        const auto joint = solve_prp_renyi(six_file_problem());
        const auto trace = simulate_attacker(joint, 2500, 1, 1000);
        REQUIRE(trace.checkpoints.size() == 3);
        CHECK(trace.checkpoints[2].first == 2500);
    }
    SUBCASE("same seed, same trace") {
        const auto joint = solve_prp_renyi(six_file_problem());
        const auto a = simulate_attacker(joint, 20000, 42, 1000);
        const auto b = simulate_attacker(joint, 20000, 42, 1000);
        const auto c = simulate_attacker(joint, 20000, 43, 1000);
        CHECK(a.checkpoints == b.checkpoints);
        CHECK(a.checkpoints != c.checkpoints);
    }
}
