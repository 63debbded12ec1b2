#include "contrex/raster.hpp"

#include <algorithm>

namespace contrex {

Mask dilate(const Mask& mask, double radius) {
    Mask out(mask.shape());
    const auto h = static_cast<long>(mask.height());
    const auto w = static_cast<long>(mask.width());
    const long reach = static_cast<long>(std::floor(radius));
    const double r2 = radius * radius;
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            if (mask.at(r, c) == 0.0) continue;
            for (long dr = -reach; dr <= reach; ++dr) {
                for (long dc = -reach; dc <= reach; ++dc) {
                    if (static_cast<double>(dr * dr + dc * dc) > r2) continue;
                    const long rr = r + dr;
                    const long cc = c + dc;
                    if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                    out.at(rr, cc) = 1.0;
                }
            }
        }
    }
    return out;
}

double mass_fraction_inside(const SaliencyMap& map, const Mask& mask) {
    require_same_shape(map, mask, "mass_fraction_inside");
    double total = 0.0;
    double inside = 0.0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        total += map[i];
        if (mask[i] != 0.0) inside += map[i];
    }
    return total > 0.0 ? inside / total : 0.0;
}

}  // namespace contrex
