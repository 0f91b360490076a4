#include "gsi/numerics.hpp"

namespace gsi::numerics {

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw PreconditionError("QuadratureSpec: tolerances must be positive");
    }
    if (max_subdivisions < 1) {
        throw PreconditionError("QuadratureSpec: max_subdivisions must be at least 1");
    }
}

void OdeSpec::validate() const {
    if (!(step_tol > 0.0) || !(event_tol > 0.0) || !(initial_step > 0.0) || max_steps < 1) {
        throw PreconditionError("OdeSpec: tolerances, initial step and max_steps must be positive");
    }
}

} // namespace gsi::numerics
