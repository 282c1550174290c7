#pragma once

#include <functional>

#include "pblab/sphere.hpp"
#include "pblab/types.hpp"

namespace pblab {

using VectorMap = std::function<Vec(const Vec&)>;

// Brouwer degree of `map` on int S with respect to 0.  The map must be
// continuous and nonvanishing on the boundary.
//
// N=1: endpoint sign change.  N=2: winding number of the boundary image,
// with bounded adaptive refinement of large turns.  N=3: sum of signed solid
// angles over a triangulated boundary image.  N>=4: signed Jacobian counting
// at the preimages of a small random regular value.
// Every branch recomputes at doubled resolution and throws
// UnreliableResultError if the two answers disagree.
int brouwer_degree(const VectorMap& map, const EmbeddedSphere& S, int resolution = 256,
                   std::uint64_t seed = 777);

}  // namespace pblab
