// padopt: padding-scheme solver, evaluator, oracle and benchmark driver.
//
// Exit codes: 0 success, 1 validation error, 2 internal assertion failure.

#include "padopt/bench.hpp"
#include "padopt/dataset.hpp"
#include "padopt/error.hpp"
#include "padopt/pop.hpp"
#include "padopt/prp.hpp"
#include "padopt/scheme_io.hpp"
#include "padopt/verification.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace padopt;
using nlohmann::json;

struct ProblemOptions {
    std::string dataset;
    double c = 1.0;
    std::string per_file_c;
    std::string alphabet;
    bool strict_lstar = false;
};

void add_problem_options(CLI::App* cmd, ProblemOptions& o) {
    cmd->add_option("dataset", o.dataset, "Dataset CSV with header size,frequency")->required();
    cmd->add_option("--c", o.c, "Multiplicative padding bound (>= 1)")->default_val(1.0);
    cmd->add_option("--per-file-c", o.per_file_c,
                    "File with one multiplier per dataset row, in dataset order");
    cmd->add_option("--alphabet", o.alphabet,
                    "Shared output sizes, one per line (server-identity mode)");
    cmd->add_flag("--strict-lstar-bound", o.strict_lstar,
                  "Server-identity mode: bound by z < c * rounded size instead of z <= c * original size");
}

std::vector<std::string> data_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        lines.push_back(line);
    }
    return lines;
}

template <typename T>
T parse_value(const std::string& text, const std::string& path, std::size_t k) {
    std::istringstream is(text);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof()) {
        throw ValidationError(path + ": malformed value `" + text + "` (entry " + std::to_string(k + 1) + ")");
    }
    return v;
}

FileSet load_files(const std::string& path) {
    FileSet files = load_dataset(std::filesystem::path(path));
    if (auto total = files.renormalized_from()) {
        std::cerr << "notice: frequencies summed to " << *total << "; renormalized\n";
    }
    return files;
}

struct BuiltProblem {
    std::shared_ptr<const PaddingProblem> problem;
    std::string source;
    std::optional<double> c;
};

BuiltProblem build_problem(const ProblemOptions& o) {
    const FileSet files = load_files(o.dataset);
    if (!o.per_file_c.empty() && !o.alphabet.empty()) {
        throw ValidationError("--per-file-c and --alphabet are mutually exclusive");
    }
    if (!o.alphabet.empty()) {
        std::vector<std::int64_t> sizes;
        const auto lines = data_lines(o.alphabet);
        for (std::size_t k = 0; k < lines.size(); ++k) sizes.push_back(parse_value<std::int64_t>(lines[k], o.alphabet, k));
        const auto rule = o.strict_lstar ? UpperBoundRule::StrictRoundedSize : UpperBoundRule::OriginalSize;
        return {std::make_shared<const PaddingProblem>(
                    server_identity_reduction(files, OutputAlphabet(std::move(sizes)), o.c, rule)),
                o.strict_lstar ? "server-identity-strict" : "server-identity", o.c};
    }
    if (!o.per_file_c.empty()) {
        const auto lines = data_lines(o.per_file_c);
        if (lines.size() != files.size()) {
            throw ValidationError(o.per_file_c + ": expected " + std::to_string(files.size()) + " multipliers, got " +
                                  std::to_string(lines.size()));
        }
        std::vector<double> multipliers(files.size());
        for (std::size_t i = 0; i < files.size(); ++i) {
            const std::size_t k = files.source_index(i);
            multipliers[i] = parse_value<double>(lines[k], o.per_file_c, k);
        }
        return {std::make_shared<const PaddingProblem>(problem_from_per_file_multipliers(files, multipliers)),
                "per-file", std::nullopt};
    }
    return {std::make_shared<const PaddingProblem>(problem_from_multiplier(files, o.c)), "multiplier", o.c};
}

Secret parse_secret(const std::string& s) {
    if (s == "file") return Secret::File;
    if (s == "size") return Secret::Size;
    throw ValidationError("--secret must be `file` or `size`");
}

// Writes to `path`, or stdout when empty.
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
    if (path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    fn(out);
}

json report_json(const LeakageReport& r) {
    return json{{"prior_vulnerability", r.prior_vulnerability},
                {"posterior_vulnerability", r.posterior_vulnerability},
                {"renyi_bits", r.renyi_bits},
                {"shannon_bits", r.shannon_bits},
                {"expected_size_before", r.expected_size_before},
                {"expected_size_after", r.expected_size_after},
                {"bandwidth_increase_percent", r.bandwidth_increase_percent}};
}

json scheme_json(const DeterministicScheme& s) {
    json a = json::array();
    for (std::size_t j : s.assignment) a.push_back(j + 1);
    return a;
}

std::vector<double> parse_c_list(const std::vector<std::string>& items) {
    std::vector<double> out;
    for (std::size_t k = 0; k < items.size(); ++k) out.push_back(parse_value<double>(items[k], "--c", k));
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"Padding schemes that minimize min-entropy leakage under bandwidth constraints"};
    app.require_subcommand(1);

    // gen
    SyntheticSpec spec;
    std::string assignment = "random";
    std::string gen_output;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic Zipf-popularity dataset");
    gen->add_option("--n", spec.n, "Number of files")->default_val(spec.n);
    gen->add_option("--size-min", spec.size_min, "Smallest size in bytes")->default_val(spec.size_min);
    gen->add_option("--size-max", spec.size_max, "Largest size in bytes")->default_val(spec.size_max);
    gen->add_option("--zipf", spec.zipf_exponent, "Zipf exponent")->default_val(spec.zipf_exponent);
    gen->add_option("--seed", spec.seed, "RNG seed")->default_val(0);
    gen->add_option("--assignment", assignment, "Frequency assignment: random or inverse-size")
        ->default_val(assignment);
    gen->add_option("--output", gen_output, "Output CSV (default stdout)");

    // solve
    ProblemOptions solve_opts;
    std::string algorithm = "popre";
    std::string solve_output;
    std::string solve_secret = "file";
    auto* solve = app.add_subcommand("solve", "Compute a padding scheme");
    add_problem_options(solve, solve_opts);
    solve->add_option("--algorithm", algorithm, "popre, popresh, popsh, prpre or prpreba")->default_val(algorithm);
    solve->add_option("--secret", solve_secret, "Secret for the embedded report: file or size")->default_val("file");
    solve->add_option("--output", solve_output, "Scheme document (default stdout)");

    // eval
    std::string eval_scheme;
    std::string eval_secret = "file";
    std::string eval_output;
    auto* eval = app.add_subcommand("eval", "Report leakage and bandwidth of a scheme document");
    eval->add_option("scheme", eval_scheme, "Scheme document")->required();
    eval->add_option("--secret", eval_secret, "file or size")->default_val("file");
    eval->add_option("--output", eval_output, "Report JSON (default stdout)");

    // attack
    std::string attack_scheme;
    std::uint64_t trials = 100000;
    std::uint64_t attack_seed = 0;
    std::uint64_t checkpoint_every = 1000;
    std::string attack_output;
    auto* attack = app.add_subcommand("attack", "Simulate the one-try attacker against a scheme");
    attack->add_option("scheme", attack_scheme, "Scheme document")->required();
    attack->add_option("--trials", trials, "Number of trials")->default_val(trials);
    attack->add_option("--seed", attack_seed, "RNG seed")->default_val(0);
    attack->add_option("--checkpoint-every", checkpoint_every, "Trials between trace rows")->default_val(checkpoint_every);
    attack->add_option("--output", attack_output, "Trace CSV (default stdout)");

    // oracle
    ProblemOptions oracle_opts;
    int resolution = 0;
    bool oracle_parallel = false;
    std::string oracle_output;
    auto* oracle = app.add_subcommand("oracle", "Exhaustive deterministic search (and optional randomized grid)");
    add_problem_options(oracle, oracle_opts);
    oracle->add_option("--resolution", resolution, "Also run the randomized grid with this many chunks per row");
    oracle->add_flag("--parallel", oracle_parallel, "Split the enumeration across threads");
    oracle->add_option("--output", oracle_output, "Result JSON (default stdout)");

    // bench
    std::string bench_dataset;
    std::vector<std::string> bench_c;
    std::vector<std::string> bench_algorithms;
    bool bench_parallel = false;
    std::string bench_output;
    auto* bench = app.add_subcommand("bench", "Sweep algorithms over multipliers");
    bench->add_option("dataset", bench_dataset, "Dataset CSV")->required();
    bench->add_option("--c", bench_c, "Multipliers (comma-separated)")->delimiter(',');
    bench->add_option("--algorithm", bench_algorithms, "Algorithms (comma-separated; default all)")->delimiter(',');
    bench->add_flag("--parallel", bench_parallel, "Run cells concurrently");
    bench->add_option("--output", bench_output, "Results CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (gen->parsed()) {
        spec.frequency_assignment = parse_frequency_assignment(assignment);
        const FileSet files = generate_synthetic(spec);
        emit(gen_output, [&](std::ostream& out) { write_dataset(out, files); });
    } else if (solve->parsed()) {
        const Algorithm a = parse_algorithm(algorithm);
        const Secret secret = parse_secret(solve_secret);
        BuiltProblem built = build_problem(solve_opts);
        SchemeDocument doc{std::string(algorithm_name(a)), built.source, built.c,
                           run_algorithm(a, built.problem)};
        emit(solve_output, [&](std::ostream& out) { save_scheme(out, doc, secret); });
    } else if (eval->parsed()) {
        const Secret secret = parse_secret(eval_secret);
        const SchemeDocument doc = load_scheme(std::filesystem::path(eval_scheme));
        json out = report_json(evaluate(doc.joint, secret));
        out["secret"] = eval_secret;
        out["algorithm"] = doc.algorithm;
        emit(eval_output, [&](std::ostream& os) { os << out.dump(2) << '\n'; });
    } else if (attack->parsed()) {
        const SchemeDocument doc = load_scheme(std::filesystem::path(attack_scheme));
        const AttackTrace trace = simulate_attacker(doc.joint, trials, attack_seed, checkpoint_every);
        emit(attack_output, [&](std::ostream& out) {
            out << "trials,success_rate,theoretical_optimum\n" << std::setprecision(6);
            for (const auto& [t, rate] : trace.checkpoints) {
                out << t << ',' << rate << ',' << trace.theoretical_optimum << '\n';
            }
        });
    } else if (oracle->parsed()) {
        BuiltProblem built = build_problem(oracle_opts);
        const OracleResult r = oracle_parallel ? brute_force_pop(*built.problem) : brute_force_pop_serial(*built.problem);
        json out{{"schemes_enumerated", r.schemes_enumerated},
                 {"min_vulnerability", r.min_vulnerability},
                 {"min_shannon_bits", r.min_shannon_bits},
                 {"min_bandwidth_among_vulnerability_optimal", r.min_bandwidth_among_vulnerability_optimal},
                 {"optimal_scheme_count", r.optimal_scheme_count},
                 {"vulnerability_witness", scheme_json(r.vulnerability_witness)},
                 {"shannon_witness", scheme_json(r.shannon_witness)},
                 {"bandwidth_witness", scheme_json(r.bandwidth_witness)}};
        if (resolution > 0) {
            out["grid_resolution"] = resolution;
            out["grid_min_vulnerability"] = grid_search_prp(*built.problem, resolution);
        }
        emit(oracle_output, [&](std::ostream& os) { os << out.dump(2) << '\n'; });
    } else if (bench->parsed()) {
        const FileSet files = load_files(bench_dataset);
        const std::vector<double> c_list = parse_c_list(bench_c);
        std::vector<Algorithm> algorithms;
        for (const auto& name : bench_algorithms) algorithms.push_back(parse_algorithm(name));
        if (algorithms.empty()) algorithms.assign(std::begin(kAllAlgorithms), std::end(kAllAlgorithms));
        const auto records = run_bench(files, c_list, algorithms, bench_parallel);
        for (const auto& r : records) {
            if (!r.error.empty()) std::cerr << "error: " << r.algorithm << " c=" << r.c << ": " << r.error << '\n';
        }
        emit(bench_output, [&](std::ostream& out) { write_bench_csv(out, records); });
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const padopt::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
}
