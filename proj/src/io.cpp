#include "effham/io.hpp"

#include "effham/random.hpp"
#include "effham/types.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace effham {

void atomic_write(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(fmt::format("cannot open '{}' for writing", tmp.string()));
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error(fmt::format("write to '{}' failed", tmp.string()));
    }
    std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

std::string content_hash(const nlohmann::json& j) { return hex64(fnv1a64(j.dump())); }

nlohmann::json artifact_header(std::string_view kind, std::string_view config_hash) {
    return {{"kind", std::string(kind)}, {"schema_version", kSchemaVersion}, {"config_hash", std::string(config_hash)}};
}

void check_artifact_header(const nlohmann::json& j, std::string_view kind) {
    if (!j.is_object() || !j.contains("kind") || !j.contains("schema_version"))
        throw SchemaError("missing artifact header");
    if (j.at("kind") != kind)
        throw SchemaError(fmt::format("expected a '{}' artifact, found '{}'", kind, j.at("kind").dump()));
    if (!j.at("schema_version").is_number_integer() || j.at("schema_version").get<int>() != kSchemaVersion)
        throw SchemaError(fmt::format("unsupported schema version {} for '{}' (expected {})",
                                      j.at("schema_version").dump(), kind, kSchemaVersion));
}

std::string csv_preamble(std::string_view kind, std::string_view config_hash) {
    return fmt::format("# effham {} schema_version={} config_hash={}\n", kind, kSchemaVersion, config_hash);
}

}  // namespace effham
