#ifndef HETVOL_CONFIG_HPP
#define HETVOL_CONFIG_HPP

#include "hetvol/process.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hetvol {

// INI-style run configuration with [data], [model], [fit], [simulate]
// sections and flat `key = value` entries. Unknown keys are rejected.
class RunConfig {
public:
    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_string(const std::string& text);

    bool has(const std::string& section_key) const;
    double number(const std::string& section_key, double fallback) const;
    double require_number(const std::string& section_key) const;
    std::string text(const std::string& section_key, const std::string& fallback) const;
    std::vector<double> numbers(const std::string& section_key) const; // space-separated

    // [model] block -> ModelSpec (density family + coupling + sigma)
    ModelSpec model() const;
    std::uint64_t seed() const { return std::uint64_t(number("simulate.seed", 12345)); }

private:
    std::map<std::string, std::string> kv_;
    void validate() const;
};

} // namespace hetvol

#endif
