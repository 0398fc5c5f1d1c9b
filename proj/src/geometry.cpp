#include "coplan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace coplan {

namespace {
constexpr double kFitTol = 1e-12;
}

bool ball_in_region(const Eigen::Vector3d& c, double r, const Region& region, double slack) {
  return (c - region.center).norm() + r <= region.radius - slack;
}

bool spheres_collide(const Eigen::Vector3d& c1, double r1, const Eigen::Vector3d& c2, double r2) {
  return (c1 - c2).norm() < r1 + r2;
}

PackingResult pack_spheres(const Region& region, const std::vector<double>& radii, double heading) {
  if (radii.empty()) throw std::invalid_argument("pack_spheres: no radii");
  for (double r : radii)
    if (!(r > 0)) throw std::invalid_argument("pack_spheres: radius must be positive");

  PackingResult out;
  double length = 2.0 * std::accumulate(radii.begin(), radii.end(), 0.0);
  if (length > 2.0 * region.radius + kFitTol) return out;

  std::vector<std::size_t> order(radii.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return radii[a] > radii[b]; });
  // alternate between the two ends of the chain, working inward
  std::vector<std::size_t> left, right;
  for (std::size_t k = 0; k < order.size(); ++k) (k % 2 == 0 ? left : right).push_back(order[k]);
  std::vector<std::size_t> chain = left;
  chain.insert(chain.end(), right.rbegin(), right.rend());

  double gap = std::max(0.0, 2.0 * region.radius - length) / static_cast<double>(chain.size() + 1);
  Eigen::Vector3d axis(std::cos(heading), std::sin(heading), 0.0);
  out.placements.assign(radii.size(), region.center);
  double s = -region.radius;
  for (std::size_t idx : chain) {
    s += gap + radii[idx];
    out.placements[idx] = region.center + s * axis;
    s += radii[idx];
  }
  out.fits = true;
  return out;
}

double min_pairwise_clearance(const std::vector<BoundingSphere>& spheres) {
  if (spheres.size() < 2) throw std::invalid_argument("min_pairwise_clearance: need two spheres");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < spheres.size(); ++a)
    for (std::size_t b = a + 1; b < spheres.size(); ++b)
      best = std::min(best, (spheres[a].center - spheres[b].center).norm() - spheres[a].radius -
                                spheres[b].radius);
  return best;
}

void validate_world(const Workspace& w, const std::vector<Region>& regions) {
  if (!(w.r0 > 0)) throw std::invalid_argument("workspace radius must be positive");
  for (std::size_t a = 0; a < regions.size(); ++a) {
    const auto& ra = regions[a];
    if (!(ra.radius > 0)) throw std::invalid_argument("region radius must be positive");
    if (!(ra.center.norm() + ra.radius < w.r0)) throw std::invalid_argument("region leaves the workspace");
    for (std::size_t b = a + 1; b < regions.size(); ++b)
      if (!((ra.center - regions[b].center).norm() > ra.radius + regions[b].radius))
        throw std::invalid_argument("regions overlap");
  }
}

}  // namespace coplan
