#pragma once

#include <string>

#include "segman/scene.hpp"

namespace segman {

// Deterministic SVG of the scene plus trajectory overlays: goal-object
// movements in green, obstacle relocations in turquoise, arrowheads along
// the polylines.
std::string render_svg(const Scene& scene, const Plan& plan);

}  // namespace segman
