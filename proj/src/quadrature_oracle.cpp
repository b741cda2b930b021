#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "bemspectra/reference_assembly.hpp"

namespace bemspectra {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxDepth = 4;
constexpr double kTargetAccuracy = 1e-3;

struct Rect {
  double t0, t1;  // theta
  double p0, p1;  // phi
};

struct Point3 {
  double x, y, z;
};

Point3 on_sphere(double theta, double phi) {
  const double s = std::sin(theta);
  return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

double distance(const Point3& a, const Point3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

class SingleLayerQuadrature {
 public:
  SingleLayerQuadrature(double ka)
      : k_(ka), outer_(gauss_legendre(8)), duffy_(gauss_legendre(14)), smooth_(gauss_legendre(10)) {}

  // integral over the target rect of the inner integral, depth-limited.
  std::complex<double> element(const Rect& target, const Rect& source, int max_depth) const {
    return outer(target, source, 0, max_depth);
  }

 private:
  std::complex<double> outer(const Rect& r, const Rect& source, int depth, int max_depth) const {
    if (depth < max_depth && near(r, source)) {
      const double tm = 0.5 * (r.t0 + r.t1);
      const double pm = 0.5 * (r.p0 + r.p1);
      return outer({r.t0, tm, r.p0, pm}, source, depth + 1, max_depth) +
             outer({r.t0, tm, pm, r.p1}, source, depth + 1, max_depth) +
             outer({tm, r.t1, r.p0, pm}, source, depth + 1, max_depth) +
             outer({tm, r.t1, pm, r.p1}, source, depth + 1, max_depth);
    }
    std::complex<double> acc = 0.0;
    const double ht = 0.5 * (r.t1 - r.t0);
    const double hp = 0.5 * (r.p1 - r.p0);
    const auto n = outer_.nodes.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double theta = 0.5 * (r.t0 + r.t1) + ht * outer_.nodes[i];
      for (std::size_t j = 0; j < n; ++j) {
        const double phi = 0.5 * (r.p0 + r.p1) + hp * outer_.nodes[j];
        const double w = ht * hp * outer_.weights[i] * outer_.weights[j] * std::sin(theta);
        acc += w * inner(theta, phi, source);
      }
    }
    return acc;
  }

  // Sample-based proximity: distance between the rects below the target's diameter.
  static bool near(const Rect& a, const Rect& b) {
    constexpr int s = 5;
    std::array<Point3, s * s> pa, pb;
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        const double u = static_cast<double>(i) / (s - 1);
        const double v = static_cast<double>(j) / (s - 1);
        pa[i * s + j] = on_sphere(a.t0 + u * (a.t1 - a.t0), a.p0 + v * (a.p1 - a.p0));
        pb[i * s + j] = on_sphere(b.t0 + u * (b.t1 - b.t0), b.p0 + v * (b.p1 - b.p0));
      }
    }
    double diam = 0.0;
    double gap = 1e300;
    for (const auto& x : pa) {
      for (const auto& y : pa) diam = std::max(diam, distance(x, y));
      for (const auto& y : pb) gap = std::min(gap, distance(x, y));
    }
    return gap < diam;
  }

  std::complex<double> inner(double theta, double phi, const Rect& source) const {
    const Point3 x = on_sphere(theta, phi);
    // Unwrap phi to the copy nearest the source centre.
    const double centre = 0.5 * (source.p0 + source.p1);
    phi -= 2.0 * kPi * std::round((phi - centre) / (2.0 * kPi));
    const double ct = std::clamp(theta, source.t0, source.t1);
    const double cp = std::clamp(phi, source.p0, source.p1);

    // 1/(4 pi R): Duffy split of the rect into four triangles at (ct, cp).
    const std::array<std::array<double, 2>, 4> corners = {
        {{source.t0, source.p0}, {source.t1, source.p0}, {source.t1, source.p1}, {source.t0, source.p1}}};
    double singular = 0.0;
    for (int c = 0; c < 4; ++c) {
      const auto& a = corners[c];
      const auto& b = corners[(c + 1) % 4];
      const double e1t = a[0] - ct, e1p = a[1] - cp;
      const double e2t = b[0] - a[0], e2p = b[1] - a[1];
      const double jac = std::abs(e1t * e2p - e1p * e2t);
      if (jac < 1e-300) continue;
      for (std::size_t i = 0; i < duffy_.nodes.size(); ++i) {
        const double u = 0.5 * (1.0 + duffy_.nodes[i]);
        for (std::size_t j = 0; j < duffy_.nodes.size(); ++j) {
          const double v = 0.5 * (1.0 + duffy_.nodes[j]);
          const double t = ct + u * (e1t + v * e2t);
          const double p = cp + u * (e1p + v * e2p);
          const double R = distance(x, on_sphere(t, p));
          if (R == 0.0) continue;
          const double w = 0.25 * duffy_.weights[i] * duffy_.weights[j] * u * jac * std::sin(t);
          singular += w / (4.0 * kPi * R);
        }
      }
    }

    // (e^{-ikR} - 1)/(4 pi R): bounded, plain tensor Gauss.
    std::complex<double> regular = 0.0;
    const double ht = 0.5 * (source.t1 - source.t0);
    const double hp = 0.5 * (source.p1 - source.p0);
    for (std::size_t i = 0; i < smooth_.nodes.size(); ++i) {
      const double t = 0.5 * (source.t0 + source.t1) + ht * smooth_.nodes[i];
      for (std::size_t j = 0; j < smooth_.nodes.size(); ++j) {
        const double p = 0.5 * (source.p0 + source.p1) + hp * smooth_.nodes[j];
        const double R = distance(x, on_sphere(t, p));
        const double w = ht * hp * smooth_.weights[i] * smooth_.weights[j] * std::sin(t);
        const std::complex<double> g =
            R < 1e-8 ? std::complex<double>(-0.5 * k_ * k_ * R, -k_) / (4.0 * kPi)
                     : (std::polar(1.0, -k_ * R) - 1.0) / (4.0 * kPi * R);
        regular += w * g;
      }
    }
    return singular + regular;
  }

  double k_;
  GaussRule outer_;
  GaussRule duffy_;
  GaussRule smooth_;
};

}  // namespace

QuadratureReport assemble_quadrature_single_layer(double ka, const BasisFamily& test, const BasisFamily& source) {
  if (!(test.grid == source.grid)) throw std::invalid_argument("test and source families must share the grid");
  if (test.kind != BasisKind::Patch || source.kind != BasisKind::Patch) {
    throw std::invalid_argument("quadrature oracle supports the patch basis only");
  }
  const int V = test.grid.V();
  if (V > 5) throw std::invalid_argument("quadrature oracle is limited to V <= 5");
  if (!(ka > 0.0) || ka > 3.0) throw std::invalid_argument("quadrature oracle needs 0 < ka <= 3");

  const int M = test.grid.M();
  const int N = test.grid.N();
  const double h = test.grid.h_phi();
  std::vector<Rect> cells;
  for (int n = 0; n < N; ++n) {
    for (int m = 0; m < M; ++m) {
      const double c = test.grid.phi_node(m);
      cells.push_back({std::acos(test.grid.z_node(n)), std::acos(test.grid.z_node(n + 1)), c - 0.5 * h, c + 0.5 * h});
    }
  }

  const SingleLayerQuadrature quad(ka);
  const double scale = ka / test.grid.cell_area();
  const int size = M * N;
  QuadratureReport report;
  report.full.kind = OperatorKind::SingleLayer;
  report.full.ka = ka;
  report.full.V = V;
  report.full.matrix.resize(size, size);
  std::vector<double> change(static_cast<std::size_t>(size) * size, 0.0);

#pragma omp parallel for schedule(dynamic, 1)
  for (int idx = 0; idx < size * size; ++idx) {
    const int u = idx / size;
    const int v = idx % size;
    const std::complex<double> fine = quad.element(cells[u], cells[v], kMaxDepth);
    const std::complex<double> coarse = quad.element(cells[u], cells[v], kMaxDepth - 1);
    report.full.matrix(u, v) = scale * fine;
    change[idx] = std::abs(fine - coarse) / std::abs(fine);
  }
  report.max_refinement_change = *std::max_element(change.begin(), change.end());
  report.accuracy_flag = report.max_refinement_change > kTargetAccuracy;
  return report;
}

}  // namespace bemspectra
