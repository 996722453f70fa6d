// io.hpp: artifact plumbing: atomic writes, headers and hashing.

#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace effham {

inline constexpr int kSchemaVersion = 1;

// Writes to a sibling temporary file and renames it over the target, so a
// reader never observes a half-written artifact.
void atomic_write(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

// 16 hex digits of FNV-1a over the compact dump of j.
std::string content_hash(const nlohmann::json& j);
std::string hex64(std::uint64_t v);

// {"kind": kind, "schema_version": kSchemaVersion, "config_hash": hash}
nlohmann::json artifact_header(std::string_view kind, std::string_view config_hash);

// Throws SchemaError unless j is a header of the expected kind and version.
void check_artifact_header(const nlohmann::json& j, std::string_view kind);

// "# effham <kind> schema_version=1 config_hash=<hash>" first line for CSV files.
std::string csv_preamble(std::string_view kind, std::string_view config_hash);

}  // namespace effham
