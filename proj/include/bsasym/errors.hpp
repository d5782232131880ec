#pragma once

#include <stdexcept>
#include <string>

namespace bsasym {

/// Caller broke a documented precondition (index out of range, t <= 0, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Invalid or inconsistent configuration values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A time step produced NaN/Inf.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(std::string scheme, long step, double sup_norm)
        : std::runtime_error("solver blow-up: scheme=" + scheme + " step=" + std::to_string(step) +
                             " sup|u|=" + std::to_string(sup_norm)),
          scheme_(std::move(scheme)), step_(step), sup_norm_(sup_norm) {}

    const std::string& scheme() const noexcept { return scheme_; }
    long step() const noexcept { return step_; }
    double sup_norm() const noexcept { return sup_norm_; }

private:
    std::string scheme_;
    long step_;
    double sup_norm_;
};

/// Numerical post-processing could not produce a value (no level crossing, degenerate fit).
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bsasym
