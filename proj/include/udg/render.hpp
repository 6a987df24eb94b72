#pragma once

#include <span>
#include <string>

#include "udg/lattice.hpp"

namespace udg {

struct RenderSpec {
    double scale = 100.0;  // pixels per unit distance
    double vertex_radius = 4.0;
    double stroke_width = 1.5;
    double margin = 20.0;

    void validate() const;
};

/// SVG drawing of the embedding: one <circle> per vertex and one <line> per
/// unit-distance pair. The y axis points up.
std::string render_svg(std::span<const LatticePoint> g, const RenderSpec& spec = {});

}  // namespace udg
