#pragma once

// Tabular sweep reports and their deterministic CSV / JSON rendering.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "json.hpp"

#include "wine/error.hpp"

namespace wine {

inline constexpr std::string_view tool_version = "0.3.0";

enum class report_format { csv, json };

inline report_format parse_format(std::string_view s) {
    if (s == "csv") return report_format::csv;
    if (s == "json") return report_format::json;
    throw config_error(fmt::format("unknown format '{}' (csv or json)", s));
}

inline const char* extension(report_format f) { return f == report_format::csv ? "csv" : "json"; }

inline std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw io_error("sha256: digest failed");
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
    return out;
}

struct ReportMetadata {
    std::uint64_t seed = 0;
    std::string config_digest;
    std::string tool_version{wine::tool_version};
};

using Cell = std::variant<std::int64_t, double, std::string>;

/// Rows are stored in the order the pipeline produced them, which is the
/// parameter-tuple order of the sweep lists.
struct SweepReport {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    ReportMetadata metadata;

    void add(std::vector<Cell> row) {
        if (row.size() != columns.size())
            throw domain_error(fmt::format("report {}: row has {} cells, expected {}", name, row.size(),
                                           columns.size()));
        rows.push_back(std::move(row));
    }

    std::size_t column(std::string_view c) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == c) return i;
        throw domain_error(fmt::format("report {}: no column '{}'", name, c));
    }

    double number(std::size_t row, std::string_view c) const {
        const Cell& v = rows.at(row).at(column(c));
        if (const auto* d = std::get_if<double>(&v)) return *d;
        if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
        throw domain_error(fmt::format("report {}: column '{}' is not numeric", name, c));
    }

    const std::string& text(std::size_t row, std::string_view c) const {
        return std::get<std::string>(rows.at(row).at(column(c)));
    }
};

namespace detail {

// Shortest round-trip representation; fmt formats doubles itself, so the
// text does not depend on the C library or locale.
inline std::string cell_text(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return fmt::format("{}", *i);
    if (const auto* d = std::get_if<double>(&c)) return fmt::format("{}", *d);
    return std::get<std::string>(c);
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace detail

inline std::string render_csv(const SweepReport& r) {
    std::string out;
    for (std::size_t i = 0; i < r.columns.size(); ++i) out += (i ? "," : "") + detail::csv_field(r.columns[i]);
    out += '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + detail::csv_field(detail::cell_text(row[i]));
        out += '\n';
    }
    return out;
}

inline std::string render_json(const SweepReport& r) {
    using ojson = nlohmann::ordered_json;
    ojson doc;
    doc["report"] = r.name;
    doc["metadata"] = {{"seed", r.metadata.seed},
                       {"config_digest", r.metadata.config_digest},
                       {"tool_version", r.metadata.tool_version}};
    doc["columns"] = r.columns;
    ojson rows = ojson::array();
    for (const auto& row : r.rows) {
        ojson o = ojson::object();
        for (std::size_t i = 0; i < row.size(); ++i)
            std::visit([&](const auto& v) { o[r.columns[i]] = v; }, row[i]);
        rows.push_back(std::move(o));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

inline std::string render(const SweepReport& r, report_format f) {
    return f == report_format::csv ? render_csv(r) : render_json(r);
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error(fmt::format("cannot write '{}'", path.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw io_error(fmt::format("write failed for '{}'", path.string()));
}

/// Writes reports into `dir` together with a manifest carrying the run
/// metadata and a checksum per file. A directory already holding reports
/// from a different config digest is refused unless `force` is set.
inline std::vector<std::filesystem::path> emit_reports(const std::vector<SweepReport>& reports, report_format f,
                                                       const std::filesystem::path& dir, bool force = false) {
    if (reports.empty()) throw domain_error("emit_report: nothing to emit");
    for (const auto& r : reports)
        if (r.rows.empty()) throw domain_error(fmt::format("emit_report: report '{}' has no rows", r.name));
    const ReportMetadata& meta = reports.front().metadata;
    for (const auto& r : reports)
        if (r.metadata.config_digest != meta.config_digest)
            throw domain_error("emit_report: reports come from different configs");

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
    const fs::path manifest_path = dir / "manifest.json";
    nlohmann::ordered_json manifest;
    if (fs::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        try {
            manifest = nlohmann::ordered_json::parse(in);
        } catch (const nlohmann::json::exception&) {
            throw io_error(fmt::format("'{}' is not a readable manifest", manifest_path.string()));
        }
        const auto old = manifest.value("config_digest", std::string{});
        if (old != meta.config_digest) {
            if (!force)
                throw config_error(fmt::format("'{}' holds reports for config digest {}, this run has {}; "
                                               "use a fresh output directory or --force",
                                               dir.string(), old, meta.config_digest));
            manifest = nlohmann::ordered_json{};
        }
    }
    manifest["seed"] = meta.seed;
    manifest["config_digest"] = meta.config_digest;
    manifest["tool_version"] = meta.tool_version;
    if (!manifest.contains("files")) manifest["files"] = nlohmann::ordered_json::object();

    std::vector<fs::path> written;
    for (const auto& r : reports) {
        const std::string text = render(r, f);
        const std::string file = fmt::format("{}.{}", r.name, extension(f));
        write_file(dir / file, text);
        manifest["files"][file] = sha256_hex(text);
        written.push_back(dir / file);
    }
    // Keep file entries sorted so the manifest does not depend on emit order.
    nlohmann::ordered_json sorted = nlohmann::ordered_json::object();
    std::vector<std::string> names;
    for (auto it = manifest["files"].begin(); it != manifest["files"].end(); ++it) names.push_back(it.key());
    std::sort(names.begin(), names.end());
    for (const auto& n : names) sorted[n] = manifest["files"][n];
    manifest["files"] = std::move(sorted);
    write_file(manifest_path, manifest.dump(2) + "\n");
    return written;
}

}  // namespace wine
