#include "ersatz/stencil.hpp"

#include <cmath>

#include "ersatz/error.hpp"

namespace ersatz {

StencilSet build_standard_stencil(int d) {
    if (d <= 0)
        throw Error(errc::invalid_dimension, "stencil dimension must be >= 1");

    StencilSet s;
    s.dim = d;
    for (int i = 0; i < d; ++i) {
        std::vector<int> v(d, 0);
        v[i] = 1;
        s.vectors.push_back(std::move(v));
    }
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            std::vector<int> v(d, 0);
            v[i] = 1;
            v[j] = 1;
            s.vectors.push_back(std::move(v));
        }
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            std::vector<int> v(d, 0);
            v[i] = 1;
            v[j] = -1;
            s.vectors.push_back(std::move(v));
        }

    double r2 = 0.0;
    for (const auto& v : s.vectors) {
        double n2 = 0.0;
        for (int c : v) n2 += double(c) * c;
        r2 = std::max(r2, n2);
    }
    s.radius = std::sqrt(r2);
    return s;
}

}  // namespace ersatz
