#include "svarma/error.hpp"

namespace svarma {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::singular_polynomial:
            return "singular_polynomial";
        case ErrorKind::domain:
            return "domain";
        case ErrorKind::not_normalizable:
            return "not_normalizable";
        case ErrorKind::not_factorizable:
            return "not_factorizable";
        case ErrorKind::rank_deficient:
            return "rank_deficient";
        case ErrorKind::degenerate:
            return "degenerate";
        case ErrorKind::singular_matrix:
            return "singular_matrix";
        case ErrorKind::invalid_argument:
            return "invalid_argument";
        case ErrorKind::parse:
            return "parse";
        case ErrorKind::io:
            return "io";
        case ErrorKind::validation:
            return "validation";
    }
    return "unknown";
}

}  // namespace svarma
