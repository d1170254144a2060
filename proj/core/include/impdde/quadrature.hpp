#pragma once

#include <cstddef>
#include <functional>

namespace impdde::quad {

// Composite Simpson on [a, b] with `panels` equal panels (each panel uses its
// midpoint, so 2*panels+1 evaluations).
double composite_simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels);

// Number of equal panels needed so that no panel is wider than max_width.
std::size_t panels_for(double a, double b, double max_width);

// Adaptive Simpson with Richardson correction; stops when the local error
// estimate is below rel_tol * |running integral| (or an absolute floor).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                        int max_depth = 50);

}  // namespace impdde::quad
