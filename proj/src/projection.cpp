#include "sra/projection.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

namespace sra {

namespace {

constexpr double kSingularEps = 1e-12;

Eigen::Matrix3d to_eigen(const Homography& h) {
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = h.m[r][c];
  return m;
}

Homography from_eigen(const Eigen::Matrix3d& m) {
  Homography h;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) h.m[r][c] = m(r, c);
  h.normalize_scale();
  return h;
}

// Hartley conditioning: centroid at origin, mean distance sqrt(2).
Eigen::Matrix3d normalizing_transform(const std::vector<Vec2>& pts) {
  Vec2 c;
  for (const Vec2& p : pts) c = c + p;
  c = c / static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const Vec2& p : pts) mean_dist += (p - c).norm();
  mean_dist /= static_cast<double>(pts.size());
  double s = mean_dist > kSingularEps ? std::sqrt(2.0) / mean_dist : 1.0;
  Eigen::Matrix3d t;
  t << s, 0, -s * c.x, 0, s, -s * c.y, 0, 0, 1;
  return t;
}

}  // namespace

Homography Homography::translation(double tx, double ty) {
  Homography h;
  h.m[0][2] = tx;
  h.m[1][2] = ty;
  return h;
}

double Homography::det() const {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

void Homography::normalize_scale() {
  double w = m[2][2];
  if (std::abs(w) > kSingularEps) {
    for (auto& row : m)
      for (double& v : row) v /= w;
  }
}

Vec2 apply(const Homography& h, const Vec2& p) {
  if (!p.finite()) throw Error(ErrorKind::Parameter, "apply: non-finite point");
  double w = h.m[2][0] * p.x + h.m[2][1] * p.y + h.m[2][2];
  if (std::abs(w) < kSingularEps)
    throw Error(ErrorKind::Geometry, "apply: point maps to infinity");
  return {(h.m[0][0] * p.x + h.m[0][1] * p.y + h.m[0][2]) / w,
          (h.m[1][0] * p.x + h.m[1][1] * p.y + h.m[1][2]) / w};
}

EstimateResult estimate(const std::vector<PointPair>& pairs) {
  if (pairs.size() < 4)
    throw Error(ErrorKind::Parameter,
                "estimate: need at least 4 point pairs, got " +
                    std::to_string(pairs.size()));

  std::vector<Vec2> src, dst;
  src.reserve(pairs.size());
  dst.reserve(pairs.size());
  for (const PointPair& pp : pairs) {
    src.push_back(pp.src);
    dst.push_back(pp.dst);
  }
  Eigen::Matrix3d ts = normalizing_transform(src);
  Eigen::Matrix3d td = normalizing_transform(dst);

  const auto n = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd a(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec2& s = src[static_cast<std::size_t>(i)];
    const Vec2& d = dst[static_cast<std::size_t>(i)];
    double sx = ts(0, 0) * s.x + ts(0, 2);
    double sy = ts(1, 1) * s.y + ts(1, 2);
    double dx = td(0, 0) * d.x + td(0, 2);
    double dy = td(1, 1) * d.y + td(1, 2);
    a.row(2 * i) << -sx, -sy, -1, 0, 0, 0, dx * sx, dx * sy, dx;
    a.row(2 * i + 1) << 0, 0, 0, -sx, -sy, -1, dy * sx, dy * sy, dy;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // nullspace of dimension > 1 means the solution is not unique
  if (sv(0) < kSingularEps || sv(7) < 1e-9 * sv(0))
    throw Error(ErrorKind::Geometry, "estimate: degenerate configuration");

  Eigen::VectorXd hvec = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << hvec(0), hvec(1), hvec(2), hvec(3), hvec(4), hvec(5), hvec(6), hvec(7),
      hvec(8);
  Eigen::Matrix3d hm = td.inverse() * hn * ts;
  if (std::abs(hm.determinant()) < kSingularEps)
    throw Error(ErrorKind::Geometry, "estimate: singular homography");

  EstimateResult res;
  res.h = from_eigen(hm);
  double se = 0.0;
  for (const PointPair& pp : pairs) {
    Vec2 proj = apply(res.h, pp.src);
    Vec2 diff = proj - pp.dst;
    se += diff.dot(diff);
  }
  res.reprojection_rms = std::sqrt(se / static_cast<double>(pairs.size()));
  return res;
}

Homography invert(const Homography& h) {
  Eigen::Matrix3d m = to_eigen(h);
  if (std::abs(m.determinant()) < kSingularEps)
    throw Error(ErrorKind::Geometry, "invert: singular matrix");
  return from_eigen(Eigen::Matrix3d(m.inverse()));
}

}  // namespace sra
