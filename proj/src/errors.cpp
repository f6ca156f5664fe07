#include "lamlab/errors.hpp"

namespace lamlab {

const char* kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::model_invalid: return "model-invalid";
        case ErrorKind::not_morse: return "not-morse";
        case ErrorKind::not_birkhoff: return "not-birkhoff";
        case ErrorKind::not_birkhoff_like: return "not-birkhoff-like";
        case ErrorKind::contraction_escape: return "contraction-escape";
        case ErrorKind::no_convergence: return "no-convergence";
        case ErrorKind::refused: return "refused";
        case ErrorKind::lamination_broken: return "lamination-broken";
        case ErrorKind::check_inconclusive: return "check-inconclusive";
        case ErrorKind::unclassifiable_site: return "unclassifiable-site";
        case ErrorKind::not_stationary: return "not-stationary";
        case ErrorKind::principle_violated: return "principle-violated";
        case ErrorKind::schema: return "schema";
    }
    return "unknown";
}

}  // namespace lamlab
