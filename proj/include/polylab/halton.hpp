#pragma once

#include <array>
#include <vector>

namespace polylab {

// Deterministic low-discrepancy points, used for multistart seeding.
inline double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    int i = index;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

// Points in the cube [-1,1]^dim, scaled by `radius`.
inline std::vector<std::vector<double>> halton_cube(int count, int dim,
                                                    double radius) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    std::vector<std::vector<double>> pts;
    pts.reserve(count);
    for (int k = 1; k <= count; ++k) {
        std::vector<double> p(dim);
        for (int j = 0; j < dim; ++j)
            p[j] = radius * (2.0 * halton(k, primes[j % 8]) - 1.0);
        pts.push_back(std::move(p));
    }
    return pts;
}

} // namespace polylab
