#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace flexbid {

// Minimal CSV layer. Files produced here are plain comma-separated values
// with a single header row; lines starting with '#' carry provenance
// metadata (tool version, parameters, input digests) and are skipped by the
// reader. No quoting: none of the schemas contain free text.

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a named column; throws DataError if absent.
  std::size_t col(std::string_view name) const;
};

// Reads a whole CSV file. Throws DataError on missing file, empty file, or
// rows whose field count differs from the header.
CsvTable read_csv(const std::filesystem::path& path);

// Field parsing helpers (std::from_chars based; locale independent).
// Throw DataError with the offending text on failure.
double parse_double(std::string_view field);
std::int64_t parse_int(std::string_view field);

// Shortest round-trip decimal text for a double (std::to_chars).
std::string format_double(double v);

// Writes content to path atomically: a sibling temp file is written and
// renamed over the target, so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// 64-bit FNV-1a digest, used to stamp input fingerprints into '#' headers.
std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

// Renders "# key: value" metadata lines followed by the header row.
std::string manifest_comment(const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace flexbid
