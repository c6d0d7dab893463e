#pragma once

#include <vector>

#include "stentsim/volume.hpp"

namespace stentsim {

/// Exact Euclidean distance (mm) from each voxel centre to the nearest voxel
/// centre whose intensity is below `threshold`. Everything outside the grid
/// counts as background, so the result is finite for every voxel.
///
/// Separable lower-envelope algorithm (Felzenszwalb & Huttenlocher), one pass
/// per axis with that axis' spacing.
std::vector<double> distance_to_background(const VoxelVolume& v, double threshold);

}  // namespace stentsim
