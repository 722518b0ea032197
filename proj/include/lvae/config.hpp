#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace lvae {

/// Flat key-value configuration with "section.key = value" text syntax.
/// Every key is declared with a default; unknown keys are rejected. Each
/// CLI run writes the fully resolved table next to its outputs so any
/// artifact can be traced back to the exact settings that produced it.
class Config {
public:
    Config();  // all defaults

    static Config load(const std::string& path);  // defaults + file

    void apply_file(const std::string& path);
    void apply_text(const std::string& text, const std::string& origin);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    double get_real(const std::string& key) const;
    long get_int(const std::string& key) const;

    /// Full resolved listing, one "key = value" per line, sorted by key.
    std::string snapshot() const;
    /// CRC32 of the snapshot text, for provenance manifests.
    uint32_t hash() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace lvae
