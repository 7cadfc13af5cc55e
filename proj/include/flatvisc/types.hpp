#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace flatvisc {

inline constexpr int kMaxDim = 3;

// Small vectors/matrices sized at runtime (n = 1, 2, 3) without heap traffic.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                          kMaxDim, kMaxDim>;

/// Raised when an improper integral (integrability of the Laplacian envelope,
/// Osgood condition) fails to converge under dyadic refinement.
class IntegrabilityError : public std::domain_error {
 public:
  explicit IntegrabilityError(const std::string& what) : std::domain_error(what) {}
};

inline Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace flatvisc
