#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace svarma {

enum class ErrorKind {
    singular_polynomial,
    domain,
    not_normalizable,
    not_factorizable,
    rank_deficient,
    degenerate,
    singular_matrix,
    invalid_argument,
    parse,
    io,
    validation,
};

std::string_view to_string(ErrorKind kind);

/// Exception type thrown across the library. The kind is used by the CLI to
/// pick an exit code and by the Python bindings to pick an exception class.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace svarma
