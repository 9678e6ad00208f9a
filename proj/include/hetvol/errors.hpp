#ifndef HETVOL_ERRORS_HPP
#define HETVOL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hetvol {

// Exit-code contract: 1 usage/config, 2 data, 3 numerical.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};
struct DataError : std::runtime_error {
    explicit DataError(const std::string& m) : std::runtime_error(m) {}
};
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& m) : std::runtime_error(m) {}
};

} // namespace hetvol

#endif
