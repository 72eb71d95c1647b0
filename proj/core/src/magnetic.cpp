#include "magsurf/magnetic.hpp"

// FieldStrength and MagneticSystem are header-only; this translation unit
// exists to anchor the module in the build.

namespace magsurf {}
