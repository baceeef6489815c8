#include "kerr/geometry.hpp"

// Header-only in practice; this TU anchors the target and keeps a home
// for future non-inline geometry code.

namespace kerr {} // namespace kerr
