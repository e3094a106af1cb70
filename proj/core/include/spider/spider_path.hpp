#pragma once

#include <cstdint>
#include <vector>

namespace spider {

// Radial trajectory with its origin local time, sampled on a (not necessarily
// uniform) strictly increasing time grid. touched[i] records whether the
// bridge over (t[i-1], t[i]] visited zero; touched[0] means the start sits at
// the origin.
struct RadialPath {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> local_time;
    std::vector<std::uint8_t> touched;

    std::size_t size() const { return t.size(); }
};

// Full labeled trajectory on the glued half-lines.
struct SpiderPath {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<int> ray;
    std::vector<double> local_time;
    std::vector<std::uint8_t> touched;

    std::size_t size() const { return t.size(); }

    // Copy of the path restricted to grid indices [0, last_index].
    SpiderPath truncated(std::size_t last_index) const {
        SpiderPath out;
        const std::size_t n = last_index + 1;
        out.t.assign(t.begin(), t.begin() + n);
        out.x.assign(x.begin(), x.begin() + n);
        out.ray.assign(ray.begin(), ray.begin() + n);
        out.local_time.assign(local_time.begin(), local_time.begin() + n);
        out.touched.assign(touched.begin(), touched.begin() + n);
        return out;
    }
};

}  // namespace spider
