#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace chirpsim {

/// Thrown when a physical or dimensionless parameter violates its domain.
class invalid_parameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Carries the full list of configuration problems, not just the first one.
class config_error : public std::runtime_error {
public:
    explicit config_error(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    explicit config_error(const std::string& issue)
        : config_error(std::vector<std::string>{issue}) {}

    [[nodiscard]] const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string msg = "configuration error";
        for (const auto& s : issues) {
            msg += "\n  - " + s;
        }
        return msg;
    }

    std::vector<std::string> issues_;
};

/// Numerical failure (blow-up, divergence, failed fit). Records the
/// simulation time at failure when one is known.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg,
                             double tau = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(msg), tau_(tau) {}

    [[nodiscard]] double tau() const { return tau_; }

private:
    double tau_;
};

class io_error : public std::runtime_error {
public:
    io_error(const std::string& msg, std::string path)
        : std::runtime_error(msg + ": " + path), path_(std::move(path)) {}

    [[nodiscard]] const std::string& path() const { return path_; }

private:
    std::string path_;
};

} // namespace chirpsim
