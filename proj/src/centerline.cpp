#include "stentsim/centerline.hpp"

#include <algorithm>
#include <cmath>

#include "stentsim/error.hpp"

namespace stentsim {

std::vector<Vec3> smooth_polyline(std::span<const Vec3> points, int half_window) {
  const int n = static_cast<int>(points.size());
  std::vector<Vec3> out(points.size());
  for (int i = 0; i < n; ++i) {
    const int h = std::min({half_window, i, n - 1 - i});
    Vec3 acc;
    for (int k = i - h; k <= i + h; ++k) acc += points[k];
    out[i] = acc / static_cast<double>(2 * h + 1);
  }
  return out;
}

Vec3 initial_normal(const Vec3& tangent) {
  Vec3 ref{1.0, 0.0, 0.0};
  if (std::abs(dot(tangent, ref)) > 0.9) ref = {0.0, 1.0, 0.0};
  return normalized(ref - tangent * dot(ref, tangent));
}

Centerline resample_and_frame(std::span<const Vec3> points, double step_mm) {
  if (!(step_mm > 0.0)) throw Error(ErrorCode::kInvalidArgument, "step_mm must be positive");
  if (points.size() < 2) throw Error(ErrorCode::kDegeneratePath, "path needs at least 2 nodes");

  const std::vector<Vec3> smooth = smooth_polyline(points);
  std::vector<double> cum(smooth.size(), 0.0);
  for (std::size_t i = 1; i < smooth.size(); ++i) {
    cum[i] = cum[i - 1] + distance(smooth[i - 1], smooth[i]);
  }
  const double total = cum.back();
  if (!(total > 1e-9)) throw Error(ErrorCode::kDegeneratePath, "path has zero length");

  std::vector<double> stations;
  const auto whole = static_cast<std::size_t>(std::floor(total / step_mm + 1e-9));
  for (std::size_t k = 0; k <= whole; ++k) stations.push_back(std::min(k * step_mm, total));
  if (total - stations.back() > 1e-6) stations.push_back(total);

  Centerline c;
  c.step_mm = step_mm;
  c.samples.resize(stations.size());
  std::size_t seg = 0;
  for (std::size_t k = 0; k < stations.size(); ++k) {
    const double s = stations[k];
    while (seg + 2 < smooth.size() && cum[seg + 1] < s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
    c.samples[k].position = smooth[seg] + (smooth[seg + 1] - smooth[seg]) * t;
    c.samples[k].arclen = s;
  }

  const std::size_t n = c.samples.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3& prev = c.samples[k == 0 ? 0 : k - 1].position;
    const Vec3& next = c.samples[k + 1 == n ? n - 1 : k + 1].position;
    c.samples[k].tangent = normalized(next - prev);
  }

  // Double reflection (Wang, Juettler, Zheng, Liu 2008).
  c.samples[0].normal = initial_normal(c.samples[0].tangent);
  c.samples[0].binormal = cross(c.samples[0].tangent, c.samples[0].normal);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const auto& cur = c.samples[k];
    auto& nxt = c.samples[k + 1];
    Vec3 r = cur.normal;
    const Vec3 v1 = nxt.position - cur.position;
    const double c1 = dot(v1, v1);
    Vec3 t_l = cur.tangent;
    if (c1 > 0.0) {
      r -= v1 * (2.0 / c1 * dot(v1, r));
      t_l -= v1 * (2.0 / c1 * dot(v1, t_l));
    }
    const Vec3 v2 = nxt.tangent - t_l;
    const double c2 = dot(v2, v2);
    if (c2 > 0.0) r -= v2 * (2.0 / c2 * dot(v2, r));
    nxt.normal = normalized(r - nxt.tangent * dot(r, nxt.tangent));
    nxt.binormal = cross(nxt.tangent, nxt.normal);
  }
  return c;
}

Centerline resample_and_frame(const VoxelGraph& g, const VoxelPath& path, double step_mm) {
  std::vector<Vec3> points;
  points.reserve(path.nodes.size());
  for (std::size_t n : path.nodes) points.push_back(g.position(n));
  return resample_and_frame(points, step_mm);
}

}  // namespace stentsim
