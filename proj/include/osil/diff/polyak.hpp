#pragma once

#include "osil/diff/param_vector.hpp"

namespace osil {

// target <- (1 - zeta) * target + zeta * online. Layouts must match.
void polyak_update(ParamVector& target, const ParamVector& online, double zeta);

}  // namespace osil
