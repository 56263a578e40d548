/*
 * version.hpp — tool version string recorded in run manifests.
 */
#pragma once

namespace qwb {

inline constexpr const char *version = "0.1.0";

} // namespace qwb
