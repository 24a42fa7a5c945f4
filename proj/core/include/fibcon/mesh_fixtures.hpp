#pragma once

#include "fibcon/surface_morse.hpp"

#include <array>
#include <cstdint>
#include <functional>

namespace fibcon::morse::fixtures {

using PointField = std::function<double(const std::array<double, 3>&)>;
using TorusField = std::function<double(double x, double y)>;

/// Unit octahedron with value = z.
ScalarMesh octahedron();

/// n x n vertices on the flat torus [0,1)^2, each grid square split along
/// its (i,j)-(i+1,j+1) diagonal.  Positions are the standard embedding in R^3.
/// Values are rounded to multiples of 1e-12 so that analytically equal values
/// tie exactly and are ordered by index.
ScalarMesh torus_grid(std::size_t n, const TorusField& f);

/// cos(2 pi x) + cos(2 pi y).
ScalarMesh cos_cos_torus(std::size_t n);
/// Height of a torus standing on its rim: (R + r cos v) cos u, R = 2, r = 0.7.
ScalarMesh standing_torus(std::size_t n);
/// cos(2 pi x) + cos(4 pi y): two minima, two maxima, four saddles at value 0.
ScalarMesh four_saddle_torus(std::size_t n);

/// Subdivided icosahedron projected to the unit sphere with the given field.
ScalarMesh icosphere(int subdivisions, const PointField& f);

/// exp(4 p.a) + exp(4 p.b) for unit vectors a, b at +-60 degrees from the
/// north pole in the xz-plane: one minimum, two maxima, one saddle.
ScalarMesh double_bump_sphere(int subdivisions = 3);

/// Open n x n grid patch (has boundary).
ScalarMesh grid_patch(std::size_t n);

} // namespace fibcon::morse::fixtures
