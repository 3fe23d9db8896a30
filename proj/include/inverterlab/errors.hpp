#pragma once

#include <stdexcept>
#include <string>

namespace inverterlab {

/// Invalid configuration value. `key()` names the offending scenario entry.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Runtime failure of a closed-loop run (diverged state, controller fault).
class SimulationFault : public std::runtime_error {
public:
    SimulationFault(double time, const std::string& what)
        : std::runtime_error("t=" + std::to_string(time) + " s: " + what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace inverterlab
