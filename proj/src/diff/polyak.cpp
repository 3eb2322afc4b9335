#include "osil/diff/polyak.hpp"

#include "osil/simd/kernels.hpp"

namespace osil {

void polyak_update(ParamVector& target, const ParamVector& online, double zeta) {
    if (zeta <= 0.0 || zeta > 1.0) throw ConfigError("polyak_update: zeta must be in (0, 1]");
    if (!target.same_layout(online)) throw DataError("polyak_update: layout mismatch");
    simd::active().lerp(online.data(), target.data(), zeta, target.size());
}

}  // namespace osil
