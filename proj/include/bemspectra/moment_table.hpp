#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "bemspectra/sphere_grid.hpp"

namespace bemspectra {

/// z-moments of one family against Pbar_l^m for every l in [m, l_max].
///
/// Integrals are evaluated panel by panel between the family's z breakpoints,
/// in the variable theta = acos z (dz = sin theta dtheta), where Pbar_l^m is a
/// trigonometric polynomial of degree l and the integrand is smooth even for
/// odd m near the poles. Panel node count is max(8, ceil(l_max dtheta / 2) + 12),
/// about twice what a band-limited integrand of that width needs.
class LegendreMomentTable {
 public:
  LegendreMomentTable(const BasisFamily& family, int m, int l_max);

  int m() const { return m_; }
  int l_max() const { return l_max_; }
  /// Moment of z-factor n against Pbar_l^m (normalization included).
  double operator()(int l, int n) const { return data_(n, l - m_); }
  /// Contiguous length-N vector for spectral index l.
  Eigen::Map<const Eigen::VectorXd> vector(int l) const {
    return {data_.data() + static_cast<Eigen::Index>(l - m_) * data_.rows(), data_.rows()};
  }

 private:
  int m_;
  int l_max_;
  Eigen::MatrixXd data_;  // N x (l_max - m + 1), column l - m
};

enum class Execution { Serial, Parallel };

/// Tables for a set of orders m sharing one l_max. Built once, then read-only.
class MomentCache {
 public:
  MomentCache(const BasisFamily& family, int l_max, const std::vector<int>& orders,
              Execution execution = Execution::Parallel);

  int l_max() const { return l_max_; }
  /// nullptr when m was not requested or exceeds l_max.
  const LegendreMomentTable* find(int m) const;

 private:
  int l_max_;
  std::vector<std::unique_ptr<LegendreMomentTable>> tables_;  // indexed by m
};

}  // namespace bemspectra
