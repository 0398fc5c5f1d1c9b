#pragma once
// Sphere-world geometry: regions, containment, collision and the packing test.

#include <Eigen/Dense>
#include <vector>

namespace coplan {

struct Workspace {
  double r0 = 30.0;
};

struct Region {
  int id = 0;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 1.0;
};

struct BoundingSphere {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 1.0;
};

struct PackingResult {
  bool fits = false;
  std::vector<Eigen::Vector3d> placements;  // same order as the input radii
};

/// ||c - p|| + r <= r_pi - slack
bool ball_in_region(const Eigen::Vector3d& c, double r, const Region& region, double slack = 0.0);

/// Strict overlap; tangent spheres do not collide.
bool spheres_collide(const Eigen::Vector3d& c1, double r1, const Eigen::Vector3d& c2, double r2);

/// Lays the spheres along one diameter of the region, largest ones at the two
/// ends, with the leftover length split evenly between all gaps. The diameter
/// is the x axis rotated by `heading` about z.
PackingResult pack_spheres(const Region& region, const std::vector<double>& radii, double heading = 0.0);

double min_pairwise_clearance(const std::vector<BoundingSphere>& spheres);

/// Throws std::invalid_argument unless every region is strictly inside the
/// workspace and the regions are pairwise disjoint.
void validate_world(const Workspace& w, const std::vector<Region>& regions);

}  // namespace coplan
