#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace qrabi::cli {

struct FileRecord {
    std::string name; // relative to the output directory
    std::uintmax_t bytes = 0;
    std::string sha256;
};

struct RunManifest {
    std::string command;
    std::string version;
    std::map<std::string, std::string> config;
    std::string started_at; // ISO-8601 UTC
    std::string finished_at;
    std::vector<FileRecord> files;

    std::string to_json() const;
    static RunManifest from_json(const std::string& text);
    void save(const std::filesystem::path& path) const;
};

// Lower-case hex digest; std::ios_base::failure if unreadable.
std::string sha256_file(const std::filesystem::path& path);

std::string iso8601_utc(std::chrono::system_clock::time_point t);

// Hashes `name` inside `dir` and returns its record.
FileRecord record_file(const std::filesystem::path& dir, const std::string& name);

} // namespace qrabi::cli
