#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace arct::text {

// Canonical tokenization used by the language model, the neural models and
// the embedding provider: lowercase ASCII, tokens are maximal runs of
// alphanumeric characters, everything else separates. Must stay in sync with
// the format documentation in the README.
std::vector<std::string> tokenize(const std::string& s);

std::string lower(std::string s);

// Splits on a single delimiter, keeping empty fields.
std::vector<std::string> split(const std::string& s, char delim);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

std::string trim(const std::string& s);

// Strict ISO-8601 UTC timestamp ("YYYY-MM-DDTHH:MM:SS[.fff]Z") to seconds
// since the epoch. Throws arct::Error on malformed input.
double parse_iso8601_utc(const std::string& s);

std::string format_iso8601_utc(double epoch_seconds);

} // namespace arct::text
