#pragma once

#include "errors.hpp"
#include "optics_core.hpp"
#include "transfer_matrix.hpp"
#include "roots.hpp"
#include "singularity_solver.hpp"
#include "dispersion.hpp"
#include "singular_fields.hpp"
#include "units.hpp"

namespace spectral_slab {
inline constexpr const char* kVersion = "0.1.0";
}
