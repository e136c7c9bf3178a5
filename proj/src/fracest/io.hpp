#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "fracest/estimator.hpp"
#include "fracest/mc.hpp"
#include "fracest/multivariate.hpp"

namespace fracest {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// One or two comma-separated columns per line; blank and `#` lines skipped.
/// The first data line fixes the column count.
std::variant<Sample, Sample2D> parse_sample_text(const std::string& text);
std::variant<Sample, Sample2D> ingest_sample(const std::string& path);

/// Flat key=value lines, `#` comments, duplicate keys rejected.
std::map<std::string, std::string> parse_kv(const std::string& text);

/// %.17g, with "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

/// Flat object: experiment, seed, reps and every scalar, series, string and
/// flag under its own key. Keys sorted; doubles at 17 significant digits.
std::string report_json(const McReport& report);
/// key,value rows; series entries become key[i].
std::string report_csv(const McReport& report);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace fracest
