#include "udg/render.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

#include "udg/genealogy.hpp"

namespace udg {

void RenderSpec::validate() const {
    if (!(scale > 0)) throw std::invalid_argument("scale must be positive");
    if (vertex_radius < 0 || stroke_width < 0 || margin < 0)
        throw std::invalid_argument("radius, stroke and margin must be non-negative");
}

std::string render_svg(std::span<const LatticePoint> g, const RenderSpec& spec) {
    spec.validate();
    std::vector<std::complex<double>> pos;
    pos.reserve(g.size());
    double min_x = std::numeric_limits<double>::max(), max_x = std::numeric_limits<double>::lowest();
    double min_y = min_x, max_y = max_x;
    for (const auto& p : g) {
        const auto z = embed(p) * spec.scale;
        pos.push_back(z);
        min_x = std::min(min_x, z.real());
        max_x = std::max(max_x, z.real());
        min_y = std::min(min_y, z.imag());
        max_y = std::max(max_y, z.imag());
    }
    if (pos.empty()) min_x = max_x = min_y = max_y = 0;

    const double pad = spec.margin + spec.vertex_radius;
    const double width = max_x - min_x + 2 * pad, height = max_y - min_y + 2 * pad;
    auto px = [&](std::complex<double> z) { return z.real() - min_x + pad; };
    auto py = [&](std::complex<double> z) { return max_y - z.imag() + pad; };

    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.3f\" height=\"%.3f\" viewBox=\"0 0 %.3f %.3f\">\n",
                  width, height, width, height);
    out += buf;
    std::snprintf(buf, sizeof buf, "<g stroke=\"black\" stroke-width=\"%.3f\">\n", spec.stroke_width);
    out += buf;
    for (const auto& [i, j] : edge_set(g)) {
        std::snprintf(buf, sizeof buf, "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\"/>\n", px(pos[i]),
                      py(pos[i]), px(pos[j]), py(pos[j]));
        out += buf;
    }
    out += "</g>\n<g fill=\"black\">\n";
    for (const auto& z : pos) {
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\"/>\n", px(z), py(z),
                      spec.vertex_radius);
        out += buf;
    }
    out += "</g>\n</svg>\n";
    return out;
}

}  // namespace udg
