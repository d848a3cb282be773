#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "starlab/harness.hpp"

// RunRecord persistence: JSON carries the full record, CSV one row per
// (grid point, metric). Non-finite numbers are stored in JSON as the strings
// "inf", "-inf" and "nan".
namespace starlab::io {

inline constexpr std::string_view kSchemaVersion = "v1";

/// Column order of the CSV export.
inline constexpr std::string_view kCsvHeader =
    "experiment,n,m,k,alpha,grid_name,grid_value,metric,estimate,stderr,replicates,seed";

std::string to_json(const harness::RunRecord& record);
/// Throws SchemaError on a missing or unknown schema version or malformed content.
harness::RunRecord from_json(std::string_view text);

void persist(const harness::RunRecord& record, const std::filesystem::path& path);
harness::RunRecord load(const std::filesystem::path& path);

void write_csv(std::ostream& out, const harness::RunRecord& record);
std::string render_csv(const harness::RunRecord& record);

/// Shortest decimal form that reads back to the same double.
std::string format_number(double x);

/// Flat `key = value` config file; `#` starts a comment. Keys are returned
/// as written, duplicates keep the last value.
std::map<std::string, std::string> read_key_values(std::istream& in);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

}  // namespace starlab::io
