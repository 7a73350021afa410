#pragma once

#include <variant>

#include "lqot/discrete.hpp"
#include "lqot/gaussian.hpp"

namespace lqot {

using Measure = std::variant<DiscreteMeasure, GaussianMeasure>;

inline bool is_discrete(const Measure& m) {
    return std::holds_alternative<DiscreteMeasure>(m);
}
inline bool is_gaussian(const Measure& m) {
    return std::holds_alternative<GaussianMeasure>(m);
}

std::size_t measure_dim(const Measure& m);

}  // namespace lqot
