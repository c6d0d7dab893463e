#include "stentsim/distance_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stentsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Squared distance transform of one line of samples spaced `s` apart.
void edt_line(const std::vector<double>& f, double s, std::vector<double>& out,
              std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  const double s2 = s * s;
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    const double fq = f[q] + s2 * q * q;
    double boundary = -kInf;
    while (k >= 0) {
      const int p = v[k];
      boundary = (fq - (f[p] + s2 * p * p)) / (2.0 * s2 * (q - p));
      if (boundary > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -kInf : boundary;
  }
  if (k < 0) {
    std::fill(out.begin(), out.end(), kInf);
    return;
  }
  z[k + 1] = kInf;
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double d = s * (q - v[j]);
    out[q] = d * d + f[v[j]];
  }
}

}  // namespace

std::vector<double> distance_to_background(const VoxelVolume& vol, double threshold) {
  const int nx = vol.dims()[0] + 2;
  const int ny = vol.dims()[1] + 2;
  const int nz = vol.dims()[2] + 2;
  const double spacing[3] = {vol.spacing().x, vol.spacing().y, vol.spacing().z};
  auto at = [&](int x, int y, int z) {
    return (static_cast<std::size_t>(z) * ny + y) * nx + x;
  };

  // Padded grid: one ring of background voxels around the volume.
  std::vector<double> grid(static_cast<std::size_t>(nx) * ny * nz, 0.0);
  for (int z = 1; z < nz - 1; ++z) {
    for (int y = 1; y < ny - 1; ++y) {
      for (int x = 1; x < nx - 1; ++x) {
        grid[at(x, y, z)] = vol.at(x - 1, y - 1, z - 1) >= threshold ? kInf : 0.0;
      }
    }
  }

  const int extent[3] = {nx, ny, nz};
  for (int axis = 0; axis < 3; ++axis) {
    const int n = extent[axis];
    std::vector<double> f(n), out(n), z(n + 1);
    std::vector<int> v(n);
    const int a1 = (axis + 1) % 3;
    const int a2 = (axis + 2) % 3;
    int pos[3];
    for (pos[a2] = 0; pos[a2] < extent[a2]; ++pos[a2]) {
      for (pos[a1] = 0; pos[a1] < extent[a1]; ++pos[a1]) {
        for (pos[axis] = 0; pos[axis] < n; ++pos[axis]) {
          f[pos[axis]] = grid[at(pos[0], pos[1], pos[2])];
        }
        edt_line(f, spacing[axis], out, v, z);
        for (pos[axis] = 0; pos[axis] < n; ++pos[axis]) {
          grid[at(pos[0], pos[1], pos[2])] = out[pos[axis]];
        }
      }
    }
  }

  std::vector<double> result(vol.size());
  for (int z = 0; z < vol.dims()[2]; ++z) {
    for (int y = 0; y < vol.dims()[1]; ++y) {
      for (int x = 0; x < vol.dims()[0]; ++x) {
        result[vol.index(x, y, z)] = std::sqrt(grid[at(x + 1, y + 1, z + 1)]);
      }
    }
  }
  return result;
}

}  // namespace stentsim
