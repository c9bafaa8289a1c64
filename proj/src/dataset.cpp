#include "padopt/dataset.hpp"

#include "padopt/error.hpp"
#include "padopt/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace padopt {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
    throw ValidationError("line " + std::to_string(line) + ": " + what);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

} // namespace

FileSet load_dataset(std::istream& in) {
    std::string text;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<FileRecord> records;
    while (std::getline(in, text)) {
        ++line_no;
        const std::string_view line = trim(text);
        if (!header_seen) {
            std::string_view h = line;
            if (h.starts_with("\xEF\xBB\xBF")) h.remove_prefix(3);
            if (h != "size,frequency") fail_line(line_no, "expected header `size,frequency`");
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
            fail_line(line_no, "expected two comma-separated fields");
        }
        FileRecord r;
        if (!parse_number(trim(line.substr(0, comma)), r.size)) fail_line(line_no, "malformed size");
        if (!parse_number(trim(line.substr(comma + 1)), r.frequency)) fail_line(line_no, "malformed frequency");
        if (r.size < 1) fail_line(line_no, "size must be positive");
        if (!(r.frequency > 0.0) || !std::isfinite(r.frequency)) fail_line(line_no, "frequency must be positive");
        records.push_back(r);
    }
    if (!header_seen) throw ValidationError("dataset is empty");
    if (records.empty()) throw ValidationError("dataset has no rows");
    return FileSet::from_records(std::move(records));
}

FileSet load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    return load_dataset(in);
}

void write_dataset(std::ostream& out, const FileSet& files) {
    out << "size,frequency\n";
    out << std::setprecision(17);
    for (const auto& r : files.records()) out << r.size << ',' << r.frequency << '\n';
}

FileSet generate_synthetic(const SyntheticSpec& spec) {
    if (spec.n < 1) throw ValidationError("n must be at least 1");
    if (spec.size_min < 1 || spec.size_min > spec.size_max) {
        throw ValidationError("sizes must satisfy 1 <= size_min <= size_max");
    }
    if (!(spec.zipf_exponent > 0.0)) throw ValidationError("zipf exponent must be positive");
    if (static_cast<std::uint64_t>(spec.size_max - spec.size_min) + 1 < spec.n) {
        throw ValidationError("size range too narrow for n distinct sizes");
    }

    RandomStream size_rng(spec.seed, 0);
    const double lo = std::log(static_cast<double>(spec.size_min));
    const double hi = std::log(static_cast<double>(spec.size_max) + 1.0);
    std::unordered_set<std::int64_t> seen;
    seen.reserve(spec.n * 2);
    std::vector<std::int64_t> sizes;
    sizes.reserve(spec.n);
    while (sizes.size() < spec.n) {
        auto s = static_cast<std::int64_t>(std::floor(std::exp(lo + size_rng.uniform() * (hi - lo))));
        s = std::clamp(s, spec.size_min, spec.size_max);
        if (seen.insert(s).second) sizes.push_back(s);
    }

    std::vector<double> zipf(spec.n);
    double total = 0.0;
    for (std::size_t r = 0; r < spec.n; ++r) {
        zipf[r] = 1.0 / std::pow(static_cast<double>(r + 1), spec.zipf_exponent);
        total += zipf[r];
    }
    for (double& z : zipf) z /= total;

    // rank_of[k]: popularity rank of the k-th file in size order.
    std::sort(sizes.begin(), sizes.end());
    std::vector<std::size_t> rank_of(spec.n);
    for (std::size_t k = 0; k < spec.n; ++k) rank_of[k] = k;
    if (spec.frequency_assignment == FrequencyAssignment::Random) {
        RandomStream perm_rng(spec.seed, 1);
        for (std::size_t k = spec.n; k > 1; --k) {
            std::swap(rank_of[k - 1], rank_of[perm_rng.below(k)]);
        }
    }

    std::vector<FileRecord> records(spec.n);
    for (std::size_t k = 0; k < spec.n; ++k) records[k] = {sizes[k], zipf[rank_of[k]]};
    return FileSet::from_records(std::move(records));
}

FrequencyAssignment parse_frequency_assignment(const std::string& name) {
    if (name == "random") return FrequencyAssignment::Random;
    if (name == "inverse-size") return FrequencyAssignment::InverseSize;
    throw ValidationError("unknown frequency assignment `" + name + "` (random, inverse-size)");
}

} // namespace padopt
