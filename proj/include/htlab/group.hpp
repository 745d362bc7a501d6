#pragma once

#include <Eigen/Dense>
#include "json.hpp"
#include <cstdint>
#include <string>
#include <vector>

namespace htlab {

/// Element (x, u) of g1 x g2.
struct Point {
  Eigen::VectorXd x;
  Eigen::VectorXd u;
};

/// Outcome of validate_htype. On failure, (i, j) are 1-based indices of the
/// first offending pair (i == j for a skew-symmetry or J_i^2 failure).
struct ValidationReport {
  bool pass = false;
  int i = 0;
  int j = 0;
  double residual = 0.0;
  std::string message;
};

/// Checks skew-symmetry and J_i J_j + J_j J_i = -2 delta_ij I within 1e-12 per
/// entry, plus d2 < d1. Throws StructuralError on shape problems.
ValidationReport validate_htype(const std::vector<Eigen::MatrixXd>& J, double tol = 1e-12);

/// A Heisenberg-type group g1 + g2 with bracket [x,y]_k = x^T J_k y.
class HTypeGroup {
 public:
  /// Validates J and throws StructuralError on failure.
  HTypeGroup(std::vector<Eigen::MatrixXd> J, std::string name = {});

  static HTypeGroup heisenberg(int n);
  static HTypeGroup quaternionic();
  /// {"n": int, "d2": int, "J": [[row-major d1*d1 reals], ...], "name"?}
  static HTypeGroup from_json(const nlohmann::json& j);
  /// Builtin name ("heisenberg-<n>", "quaternionic") or path to a JSON file.
  static HTypeGroup load(const std::string& name_or_path);

  int n() const { return n_; }
  int d1() const { return 2 * n_; }
  int d2() const { return static_cast<int>(J_.size()); }
  int d() const { return d1() + d2(); }
  int Q() const { return d1() + 2 * d2(); }
  const std::vector<Eigen::MatrixXd>& J() const { return J_; }
  const Eigen::MatrixXd& J(int k) const { return J_[k]; }
  const std::string& name() const { return name_; }
  nlohmann::json to_json() const;

 private:
  int n_;
  std::vector<Eigen::MatrixXd> J_;
  std::string name_;
};

/// (x + y, u + v + (x^T J_k y / 2)_k).
Point multiply(const Point& g, const Point& h, const HTypeGroup& G);
Point inverse(const Point& g);
Point identity(const HTypeGroup& G);
/// (|x|^4 + |u|^2)^{1/4}.
double homogeneous_norm(const Point& g);
/// (R x, R^2 u); R >= 0.
Point dilate(double R, const Point& g);

/// J_mu = sum_i mu_i J_i; throws DomainError for mu = 0.
Eigen::MatrixXd j_map(const HTypeGroup& G, const Eigen::VectorXd& mu);
/// omega_mu(x, y) = x^T J_mu y.
double omega_mu(const HTypeGroup& G, const Eigen::VectorXd& mu, const Eigen::VectorXd& x,
                const Eigen::VectorXd& y);
/// [[0, I_n], [-I_n, 0]].
Eigen::MatrixXd standard_symplectic(int n);
/// Deterministic orthogonal T with T^T J_{mu/|mu|} T = J_std (symplectic
/// Gram-Schmidt over the standard basis).
Eigen::MatrixXd rotation(const HTypeGroup& G, const Eigen::VectorXd& mu);

/// Residual max|T^T T - I| and max|T^T J_mubar T - J_std|.
struct RotationCheck {
  double orthogonality = 0.0;
  double symplectic = 0.0;
};
RotationCheck check_rotation(const HTypeGroup& G, const Eigen::VectorXd& mu,
                             const Eigen::MatrixXd& T);

/// Randomized group-law checks. Errors are maxima over the cases: absolute for
/// associativity, inverses and the automorphism property of dilations, relative
/// for homogeneity and left invariance of the quasi-distance.
struct GroupPropertyReport {
  int cases = 0;
  double associativity = 0.0;
  double inverse = 0.0;
  double homogeneity = 0.0;
  double automorphism = 0.0;
  double left_invariance = 0.0;
  /// max ||gh|| / (||g|| + ||h||) over the cases.
  double quasi_triangle = 0.0;
  /// Monte Carlo |B(2)| / (2^Q |B(1)|), ideally 1.
  double volume_ratio = 0.0;
  bool pass = false;
};

/// Entries of the random elements are uniform in [-2, 2] from raw mt19937_64 bits.
/// Passes when the first five errors are below `tol` and the volume ratio is within 2% of 1.
GroupPropertyReport group_property_suite(const HTypeGroup& G, int cases, std::uint64_t seed, double tol = 1e-10);

}  // namespace htlab
