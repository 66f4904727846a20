// SPDX-License-Identifier: Apache-2.0
#ifndef EFFCAP_ERROR_HPP
#define EFFCAP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace effcap {

// Quadrature non-convergence, overflow despite log-space bookkeeping,
// or an intermediate landing outside its mathematically required range.
class numerical_error : public std::runtime_error {
  public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// All EM restarts collapsed or the optimizer could not produce a model.
class fit_error : public std::runtime_error {
  public:
    explicit fit_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed JSON input, a missing/mistyped field, or an out-of-range value
// in user-supplied configuration. Maps to exit code 64 in the CLI.
class parse_error : public std::runtime_error {
  public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace effcap

#endif
