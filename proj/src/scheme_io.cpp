#include "padopt/scheme_io.hpp"

#include "padopt/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>

namespace padopt {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "padopt-scheme";
constexpr int kVersion = 1;

json report_json(const LeakageReport& r, Secret secret) {
    return json{{"secret", secret == Secret::File ? "file" : "size"},
                {"prior_vulnerability", r.prior_vulnerability},
                {"posterior_vulnerability", r.posterior_vulnerability},
                {"renyi_bits", r.renyi_bits},
                {"shannon_bits", r.shannon_bits},
                {"expected_size_before", r.expected_size_before},
                {"expected_size_after", r.expected_size_after},
                {"bandwidth_increase_percent", r.bandwidth_increase_percent}};
}

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ValidationError(where + ": missing field `" + key + "`");
    }
    return obj.at(key);
}

template <typename T>
T get_as(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ValidationError(where + ": field `" + key + "` has the wrong type");
    }
}

std::size_t column_index(const json& obj, const char* key, std::size_t m, const std::string& where) {
    const auto v = get_as<std::int64_t>(obj, key, where);
    if (v < 1 || static_cast<std::size_t>(v) > m) {
        throw ValidationError(where + ": `" + key + "` out of range");
    }
    return static_cast<std::size_t>(v - 1);
}

} // namespace

void save_scheme(std::ostream& out, const SchemeDocument& doc, Secret secret) {
    const JointMatrix& joint = doc.joint;
    const PaddingProblem& pb = joint.problem();
    json files = json::array();
    for (std::size_t i = 0; i < pb.n(); ++i) {
        json choices = json::array();
        for (const Entry& e : joint.row(i)) {
            choices.push_back({{"column", e.column + 1},
                               {"size", pb.alphabet()[e.column]},
                               {"probability", e.mass / pb.frequency(i)},
                               {"mass", e.mass}});
        }
        json row{{"size", pb.size(i)},
                 {"frequency", pb.frequency(i)},
                 {"l", pb.window(i).l + 1},
                 {"r", pb.window(i).r + 1},
                 {"choices", std::move(choices)}};
        if (pb.original_sizes()) row["original_size"] = pb.unpadded_size(i);
        files.push_back(std::move(row));
    }
    json doc_json{{"format", kFormat},
                  {"version", kVersion},
                  {"algorithm", doc.algorithm},
                  {"constraint_source", doc.constraint_source},
                  {"c", doc.c ? json(*doc.c) : json(nullptr)},
                  {"alphabet", pb.alphabet().sizes()},
                  {"files", std::move(files)},
                  {"report", report_json(evaluate(joint, secret), secret)}};
    out << doc_json.dump(1) << '\n';
}

void save_scheme(const std::filesystem::path& path, const SchemeDocument& doc, Secret secret) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    save_scheme(out, doc, secret);
}

SchemeDocument load_scheme(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("scheme document is not valid JSON: ") + e.what());
    }
    const std::string top = "scheme";
    if (get_as<std::string>(doc, "format", top) != kFormat) throw ValidationError("not a padopt scheme document");
    if (get_as<int>(doc, "version", top) != kVersion) throw ValidationError("unsupported scheme version");

    OutputAlphabet alphabet(get_as<std::vector<std::int64_t>>(doc, "alphabet", top));
    const json& files = field(doc, "files", top);
    if (!files.is_array() || files.empty()) throw ValidationError("scheme: `files` must be a nonempty array");

    const std::size_t n = files.size();
    std::vector<FileRecord> records(n);
    std::vector<Window> windows(n);
    std::vector<std::int64_t> original(n);
    bool has_original = false;
    std::vector<std::vector<Entry>> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        const json& f = files[i];
        const std::string where = "row " + std::to_string(i + 1);
        records[i] = {get_as<std::int64_t>(f, "size", where), get_as<double>(f, "frequency", where)};
        windows[i] = {column_index(f, "l", alphabet.size(), where), column_index(f, "r", alphabet.size(), where)};
        if (f.contains("original_size")) {
            has_original = true;
            original[i] = get_as<std::int64_t>(f, "original_size", where);
        } else {
            original[i] = records[i].size;
        }
        if (i > 0 && records[i].size < records[i - 1].size) {
            throw ValidationError(where + ": files must be sorted by size");
        }
        const json& choices = field(f, "choices", where);
        if (!choices.is_array() || choices.empty()) throw ValidationError(where + ": `choices` must be a nonempty array");
        double probability_sum = 0.0;
        for (const json& ch : choices) {
            const std::size_t j = column_index(ch, "column", alphabet.size(), where);
            const auto probability = get_as<double>(ch, "probability", where);
            probability_sum += probability;
            const double mass = ch.contains("mass") ? get_as<double>(ch, "mass", where)
                                                    : probability * records[i].frequency;
            rows[i].push_back({j, mass});
        }
        if (std::abs(probability_sum - 1.0) > kProbTolerance) {
            throw ValidationError(where + ": probabilities sum to " + std::to_string(probability_sum) +
                                  ", expected 1");
        }
    }

    FileSet fileset = FileSet::from_records(std::move(records));
    auto constraints = validate_constraints(std::move(windows), alphabet.size());
    auto problem = std::make_shared<const PaddingProblem>(
        std::move(fileset), std::move(alphabet), std::move(constraints),
        has_original ? std::optional(std::move(original)) : std::nullopt);

    SchemeDocument out{get_as<std::string>(doc, "algorithm", top),
                       doc.contains("constraint_source") ? get_as<std::string>(doc, "constraint_source", top) : "",
                       std::nullopt, JointMatrix(std::move(problem), std::move(rows))};
    if (doc.contains("c") && !doc.at("c").is_null()) out.c = get_as<double>(doc, "c", top);
    return out;
}

SchemeDocument load_scheme(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    return load_scheme(in);
}

} // namespace padopt
