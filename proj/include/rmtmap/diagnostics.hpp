// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rmtmap {

enum class Severity { Info, Warning, Error };

struct Diagnostic {
    Severity severity = Severity::Info;
    std::string message;

    static Diagnostic info(std::string msg) { return {Severity::Info, std::move(msg)}; }
    static Diagnostic warning(std::string msg) { return {Severity::Warning, std::move(msg)}; }
    static Diagnostic error(std::string msg) { return {Severity::Error, std::move(msg)}; }
};

using Diagnostics = std::vector<Diagnostic>;

inline bool has_errors(const Diagnostics &diags) {
    for (const auto &d : diags)
        if (d.severity == Severity::Error) return true;
    return false;
}

/// Unreadable or malformed input document. Maps to CLI exit code 1.
class InputError : public std::runtime_error {
  public:
    explicit InputError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Well-formed input using a construct this backend does not map
/// (variable-length headers, atomic transactions). Maps to exit code 1.
class UnsupportedError : public InputError {
  public:
    explicit UnsupportedError(const std::string &feature)
        : InputError("unsupported feature: " + feature) {}
};

/// The program is valid but does not fit the target hardware.
/// Carries the mapping phase, the exhausted resource and the program
/// element that could not be placed. Maps to exit code 2.
class RejectionError : public std::runtime_error {
  public:
    RejectionError(std::string phase, std::string resource, std::string element,
                   const std::string &reason)
        : std::runtime_error(reason), phase_(std::move(phase)), resource_(std::move(resource)),
          element_(std::move(element)) {}

    const std::string &phase() const { return phase_; }
    const std::string &resource() const { return resource_; }
    const std::string &element() const { return element_; }

  private:
    std::string phase_;
    std::string resource_;
    std::string element_;
};

}  // namespace rmtmap
