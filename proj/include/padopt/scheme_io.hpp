#pragma once

// Scheme documents: a padding problem, its joint matrix and a leakage report
// as JSON. Rows list their nonzero choices with the conditional probability
// and the joint mass; masses are what the loader uses, so a save/load cycle
// reproduces the matrix exactly.

#include "padopt/leakage.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace padopt {

struct SchemeDocument {
    std::string algorithm;
    // Free-form description of how the constraints were built, e.g.
    // "multiplier", "per-file", "server-identity".
    std::string constraint_source;
    std::optional<double> c;
    JointMatrix joint;
};

void save_scheme(std::ostream& out, const SchemeDocument& doc, Secret secret = Secret::File);
void save_scheme(const std::filesystem::path& path, const SchemeDocument& doc, Secret secret = Secret::File);

// Throws ValidationError on schema violations or rows whose probabilities do
// not sum to 1 (the message names the row).
SchemeDocument load_scheme(std::istream& in);
SchemeDocument load_scheme(const std::filesystem::path& path);

} // namespace padopt
