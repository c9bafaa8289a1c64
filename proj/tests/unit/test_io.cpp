#include "padopt/dataset.hpp"
#include "padopt/error.hpp"
#include "padopt/pop.hpp"
#include "padopt/prp.hpp"
#include "padopt/scheme_io.hpp"
#include "support/instances.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

using namespace padopt;
using namespace padopt::testing;

namespace {

FileSet parse(const std::string& text) {
    std::istringstream in(text);
    return load_dataset(in);
}

std::string error_of(auto&& fn) {
    try {
        fn();
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

bool identical(const JointMatrix& a, const JointMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (a.problem().size(i) != b.problem().size(i)) return false;
        if (a.problem().frequency(i) != b.problem().frequency(i)) return false;
        if (a.problem().window(i).l != b.problem().window(i).l) return false;
        if (a.problem().window(i).r != b.problem().window(i).r) return false;
        const auto ra = a.row(i);
        const auto rb = b.row(i);
        if (ra.size() != rb.size()) return false;
        for (std::size_t k = 0; k < ra.size(); ++k) {
            if (ra[k].column != rb[k].column || ra[k].mass != rb[k].mass) return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("load_dataset") {
    SUBCASE("six-file data") {
        const FileSet fs = parse("size,frequency\n1000,0.22\n1050,0.05\n1100,0.23\n1110,0.12\n1120,0.18\n1140,0.20\n");
        REQUIRE(fs.size() == 6);
        double total = 0.0;
        for (const auto& r : fs.records()) total += r.frequency;
        CHECK(total == doctest::Approx(1.0));
        CHECK(fs[2].size == 1100);
    }
    SUBCASE("counts are renormalized") {
        const FileSet fs = parse("size,frequency\n10,3\n20,1\n");
        CHECK(fs[0].frequency == doctest::Approx(0.75));
        CHECK(fs[1].frequency == doctest::Approx(0.25));
    }
    SUBCASE("CRLF, BOM and blank lines") {
        const FileSet fs = parse("\xEF\xBB\xBFsize,frequency\r\n10,1\r\n\r\n20,1\r\n");
        CHECK(fs.size() == 2);
    }
    SUBCASE("errors carry the line number") {
        CHECK(error_of([] { parse("size,frequency\n10,-1\n"); }).find("line 2") == 0);
        CHECK(error_of([] { parse("size,frequency\n10,1\n20\n"); }).find("line 3") == 0);
        CHECK(error_of([] { parse("size,frequency\nx,1\n"); }).find("line 2") == 0);
        CHECK(error_of([] { parse("size,freq\n10,1\n"); }).find("line 1") == 0);
        CHECK_THROWS_AS(parse(""), ValidationError);
        CHECK_THROWS_AS(parse("size,frequency\n"), ValidationError);
    }
    SUBCASE("write then read") {
        const FileSet fs = make_files({30, 10, 20}, {0.2, 0.5, 0.3});
        std::ostringstream out;
        write_dataset(out, fs);
        const FileSet back = parse(out.str());
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(back[i].size == fs[i].size);
            CHECK(back[i].frequency == fs[i].frequency);
        }
    }
}

TEST_CASE("generate_synthetic") {
    SUBCASE("single file") {
        SyntheticSpec spec;
        spec.n = 1;
        const FileSet fs = generate_synthetic(spec);
        REQUIRE(fs.size() == 1);
        CHECK(fs[0].frequency == 1.0);
    }
    SUBCASE("deterministic and distinct") {
        SyntheticSpec spec;
        spec.n = 500;
        spec.seed = 99;
        const FileSet a = generate_synthetic(spec);
        const FileSet b = generate_synthetic(spec);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].size == b[i].size);
            CHECK(a[i].frequency == b[i].frequency);
            if (i > 0) CHECK(a[i].size > a[i - 1].size);
            CHECK(a[i].size >= spec.size_min);
            CHECK(a[i].size <= spec.size_max);
        }
    }
    SUBCASE("inverse-size puts the largest frequency first") {
        SyntheticSpec spec;
        spec.n = 50;
        spec.frequency_assignment = FrequencyAssignment::InverseSize;
        const FileSet fs = generate_synthetic(spec);
        for (std::size_t i = 1; i < fs.size(); ++i) CHECK(fs[i].frequency < fs[i - 1].frequency);
    }
    SUBCASE("bad specs") {
        SyntheticSpec spec;
        spec.n = 0;
        CHECK_THROWS_AS(generate_synthetic(spec), ValidationError);
        spec.n = 10;
        spec.size_min = 5;
        spec.size_max = 8;
        CHECK_THROWS_AS(generate_synthetic(spec), ValidationError);
        CHECK_THROWS_AS(parse_frequency_assignment("zipf"), ValidationError);
    }
}

TEST_CASE("frozen synthetic corpus") {
    SyntheticSpec spec;
    spec.n = 1000;
    spec.zipf_exponent = 1.0;
    spec.seed = 7;
    std::ostringstream out;
    write_dataset(out, generate_synthetic(spec));
    CHECK(fnv1a(out.str()) == 0xd317bbd6d7e901c1ULL);

    std::ifstream in(PADOPT_FIXTURE_DIR "/synthetic_n1000_s7.csv", std::ios::binary);
    REQUIRE(in);
    const std::string committed((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(committed == out.str());
}

TEST_CASE("scheme documents") {
    const auto pb = six_file_problem();

    SUBCASE("deterministic round trip") {
        const JointMatrix joint = JointMatrix::from_scheme(pb, solve_pop_renyi(*pb).scheme);
        std::stringstream buf;
        save_scheme(buf, {"popre", "multiplier", 1.1, joint});
        const auto json = nlohmann::json::parse(buf.str());
        for (const auto& f : json.at("files")) {
            REQUIRE(f.at("choices").size() == 1);
            CHECK(f.at("choices")[0].at("probability").get<double>() == 1.0);
        }
        CHECK(json.at("files")[0].at("choices")[0].at("column").get<int>() == 3);
        CHECK(json.at("report").at("posterior_vulnerability").get<double>() == doctest::Approx(0.43));

        const SchemeDocument back = load_scheme(buf);
        CHECK(back.algorithm == "popre");
        CHECK(back.constraint_source == "multiplier");
        REQUIRE(back.c);
        CHECK(*back.c == 1.1);
        CHECK(identical(back.joint, joint));
    }
    SUBCASE("randomized round trip is exact") {
        const JointMatrix joint = reduce_bandwidth(solve_prp_renyi(random_problem(5, 8, 2.0)));
        std::stringstream buf;
        save_scheme(buf, {"prpreba", "multiplier", 2.0, joint});
        CHECK(identical(load_scheme(buf).joint, joint));
    }
    SUBCASE("original sizes survive") {
        auto red = std::make_shared<const PaddingProblem>(
            server_identity_reduction(make_files({6, 14}, {0.5, 0.5}), OutputAlphabet({8, 16, 32}), 2.0));
        const JointMatrix joint = solve_prp_renyi(red);
        std::stringstream buf;
        save_scheme(buf, {"prpre", "server-identity", std::nullopt, joint});
        const SchemeDocument back = load_scheme(buf);
        CHECK_FALSE(back.c);
        REQUIRE(back.joint.problem().original_sizes());
        CHECK(back.joint.problem().unpadded_size(0) == 6);
    }
    SUBCASE("tampered row sum") {
        const JointMatrix joint = JointMatrix::from_scheme(pb, solve_pop_renyi(*pb).scheme);
        std::stringstream buf;
        save_scheme(buf, {"popre", "multiplier", 1.1, joint});
        auto json = nlohmann::json::parse(buf.str());
        json["files"][3]["choices"][0]["probability"] = 0.9;
        std::istringstream in(json.dump());
        const auto msg = error_of([&] { load_scheme(in); });
        CHECK(msg.find("row 4") == 0);
    }
    SUBCASE("schema violations") {
        std::istringstream not_json("{");
        CHECK_THROWS_AS(load_scheme(not_json), ValidationError);
        std::istringstream wrong("{\"format\": \"other\"}");
        CHECK_THROWS_AS(load_scheme(wrong), ValidationError);
    }
}
