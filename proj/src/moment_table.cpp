#include "bemspectra/moment_table.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bemspectra/specfun.hpp"

namespace bemspectra {

LegendreMomentTable::LegendreMomentTable(const BasisFamily& family, int m, int l_max) : m_(m), l_max_(l_max) {
  if (m < 0 || l_max < m) throw std::domain_error("moment table needs 0 <= m <= l_max");
  const int N = family.grid.N();
  const int count = l_max - m + 1;
  const LegendreRecurrence recurrence(m, l_max);

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(count, N);
  Eigen::VectorXd column(count);
  const std::vector<double> bp = family.z_breakpoints();
  std::vector<int> active;

  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double theta_a = std::acos(std::clamp(bp[k], -1.0, 1.0));
    const double theta_b = std::acos(std::clamp(bp[k + 1], -1.0, 1.0));
    const double half = 0.5 * (theta_b - theta_a);
    const double mid = 0.5 * (theta_b + theta_a);

    active.clear();
    const double z_mid = std::cos(mid);
    for (int n = 0; n < N; ++n) {
      if (family.z_factor(n, z_mid) != 0.0) active.push_back(n);
    }
    if (active.empty()) continue;

    const int nodes = std::max(8, static_cast<int>(std::ceil(0.5 * l_max * (theta_b - theta_a))) + 12);
    const GaussRule rule = gauss_legendre(nodes);
    for (int q = 0; q < nodes; ++q) {
      const double theta = mid + half * rule.nodes[q];
      const double z = std::cos(theta);
      const double w = half * rule.weights[q] * std::sin(theta);
      recurrence.column(z, {column.data(), static_cast<std::size_t>(count)});
      for (const int n : active) acc.col(n) += (w * family.z_factor(n, z)) * column;
    }
  }
  data_ = family.normalization_constant * acc.transpose();
}

MomentCache::MomentCache(const BasisFamily& family, int l_max, const std::vector<int>& orders, Execution execution)
    : l_max_(l_max) {
  std::vector<int> wanted;
  for (const int m : orders) {
    if (m < 0) throw std::domain_error("moment order must be >= 0");
    if (m <= l_max) wanted.push_back(m);
  }
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  tables_.resize(wanted.empty() ? 0 : static_cast<std::size_t>(wanted.back()) + 1);

  const auto count = static_cast<long>(wanted.size());
  if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) {
      const int m = wanted[i];
      tables_[m] = std::make_unique<LegendreMomentTable>(family, m, l_max);
    }
  } else {
    for (long i = 0; i < count; ++i) {
      const int m = wanted[i];
      tables_[m] = std::make_unique<LegendreMomentTable>(family, m, l_max);
    }
  }
}

const LegendreMomentTable* MomentCache::find(int m) const {
  if (m < 0 || static_cast<std::size_t>(m) >= tables_.size()) return nullptr;
  return tables_[m].get();
}

}  // namespace bemspectra
