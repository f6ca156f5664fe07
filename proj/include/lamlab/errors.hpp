#pragma once

#include <stdexcept>
#include <string>

namespace lamlab {

enum class ErrorKind {
    invalid_argument,
    model_invalid,
    not_morse,
    not_birkhoff,
    not_birkhoff_like,
    contraction_escape,
    no_convergence,
    refused,
    lamination_broken,
    check_inconclusive,
    unclassifiable_site,
    not_stationary,
    principle_violated,
    schema,
};

const char* kind_name(ErrorKind kind);

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorKind::invalid_argument, what);
}

}  // namespace lamlab
