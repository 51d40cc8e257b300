#pragma once

#include <stdexcept>
#include <string>

namespace dbnt {

// Bad or degenerate input data (empty documents, parse failures, missing files).
struct data_error : std::runtime_error {
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration or usage (bad keys, out-of-range hyperparameters).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite losses or parameters during optimization.
struct divergence_error : std::runtime_error {
    explicit divergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace dbnt
