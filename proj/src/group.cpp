#include "htlab/group.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "htlab/errors.hpp"

namespace htlab {

ValidationReport validate_htype(const std::vector<Eigen::MatrixXd>& J, double tol) {
  if (J.empty()) throw StructuralError("validate_htype: at least one matrix required");
  const Eigen::Index d1 = J[0].rows();
  for (const auto& M : J) {
    if (M.rows() != M.cols() || M.rows() != d1)
      throw StructuralError("validate_htype: matrices must be square of equal size");
  }
  if (d1 == 0 || d1 % 2 != 0) throw StructuralError("validate_htype: dimension must be even");

  ValidationReport rep;
  const auto d2 = static_cast<Eigen::Index>(J.size());
  if (d2 >= d1) {
    rep.message = "center dimension must be smaller than first-layer dimension";
    return rep;
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d1, d1);
  for (Eigen::Index i = 0; i < d2; ++i) {
    const double skew = (J[i] + J[i].transpose()).cwiseAbs().maxCoeff();
    if (skew > tol) {
      rep.i = rep.j = static_cast<int>(i + 1);
      rep.residual = skew;
      rep.message = "J_" + std::to_string(i + 1) + " is not skew-symmetric";
      return rep;
    }
  }
  for (Eigen::Index i = 0; i < d2; ++i) {
    for (Eigen::Index j = i; j < d2; ++j) {
      Eigen::MatrixXd A = J[i] * J[j] + J[j] * J[i];
      if (i == j) A += 2.0 * I;
      const double r = A.cwiseAbs().maxCoeff();
      if (r > tol) {
        rep.i = static_cast<int>(i + 1);
        rep.j = static_cast<int>(j + 1);
        rep.residual = r;
        std::ostringstream os;
        os << "anticommutation fails at (" << rep.i << "," << rep.j << "), residual " << r;
        rep.message = os.str();
        return rep;
      }
    }
  }
  rep.pass = true;
  rep.message = "ok";
  return rep;
}

HTypeGroup::HTypeGroup(std::vector<Eigen::MatrixXd> J, std::string name)
    : n_(0), J_(std::move(J)), name_(std::move(name)) {
  const ValidationReport rep = validate_htype(J_);
  if (!rep.pass) throw StructuralError("invalid H-type data: " + rep.message);
  n_ = static_cast<int>(J_[0].rows() / 2);
}

HTypeGroup HTypeGroup::heisenberg(int n) {
  if (n < 1) throw DomainError("heisenberg: n must be positive");
  return HTypeGroup({standard_symplectic(n)}, "heisenberg-" + std::to_string(n));
}

HTypeGroup HTypeGroup::quaternionic() {
  // Left multiplication by i, j, k on H = R^4 with basis (1, i, j, k); column c is the image of e_c.
  Eigen::MatrixXd Li(4, 4), Lj(4, 4), Lk(4, 4);
  Li << 0, -1, 0, 0,
        1, 0, 0, 0,
        0, 0, 0, -1,
        0, 0, 1, 0;
  Lj << 0, 0, -1, 0,
        0, 0, 0, 1,
        1, 0, 0, 0,
        0, -1, 0, 0;
  Lk << 0, 0, 0, -1,
        0, 0, -1, 0,
        0, 1, 0, 0,
        1, 0, 0, 0;
  return HTypeGroup({Li, Lj, Lk}, "quaternionic");
}

HTypeGroup HTypeGroup::from_json(const nlohmann::json& j) {
  if (!j.contains("n") || !j.contains("d2") || !j.contains("J"))
    throw StructuralError("group JSON requires n, d2 and J");
  const int n = j.at("n").get<int>();
  const int d2 = j.at("d2").get<int>();
  const auto& arr = j.at("J");
  if (n < 1 || d2 < 1 || !arr.is_array() || static_cast<int>(arr.size()) != d2)
    throw StructuralError("group JSON: J must list d2 matrices");
  const int d1 = 2 * n;
  std::vector<Eigen::MatrixXd> J;
  for (const auto& m : arr) {
    std::vector<double> flat;
    if (m.is_array() && !m.empty() && m[0].is_array()) {
      for (const auto& row : m)
        for (const auto& v : row) flat.push_back(v.get<double>());
    } else {
      flat = m.get<std::vector<double>>();
    }
    if (static_cast<int>(flat.size()) != d1 * d1)
      throw StructuralError("group JSON: each J must have d1*d1 entries");
    Eigen::MatrixXd M(d1, d1);
    for (int r = 0; r < d1; ++r)
      for (int c = 0; c < d1; ++c) M(r, c) = flat[r * d1 + c];
    J.push_back(M);
  }
  return HTypeGroup(std::move(J), j.value("name", std::string("custom")));
}

HTypeGroup HTypeGroup::load(const std::string& s) {
  if (s == "quaternionic") return quaternionic();
  const std::string prefix = "heisenberg-";
  if (s.rfind(prefix, 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(s.substr(prefix.size()));
    } catch (const std::exception&) {
      throw DomainError("unknown group name: " + s);
    }
    return heisenberg(n);
  }
  std::ifstream in(s);
  if (!in) throw DomainError("unknown group name or unreadable file: " + s);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("group JSON parse error: ") + e.what());
  }
  return from_json(j);
}

nlohmann::json HTypeGroup::to_json() const {
  nlohmann::json j;
  j["name"] = name_;
  j["n"] = n_;
  j["d2"] = d2();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& M : J_) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
      std::vector<double> row(M.cols());
      for (Eigen::Index c = 0; c < M.cols(); ++c) row[c] = M(r, c);
      rows.push_back(row);
    }
    arr.push_back(rows);
  }
  j["J"] = arr;
  return j;
}

namespace {
void check_point(const Point& g, const HTypeGroup& G) {
  if (g.x.size() != G.d1() || g.u.size() != G.d2())
    throw StructuralError("point dimensions do not match the group");
}
}  // namespace

Point multiply(const Point& g, const Point& h, const HTypeGroup& G) {
  check_point(g, G);
  check_point(h, G);
  Point r{g.x + h.x, g.u + h.u};
  for (int k = 0; k < G.d2(); ++k) r.u[k] += 0.5 * g.x.dot(G.J(k) * h.x);
  return r;
}

Point inverse(const Point& g) { return Point{-g.x, -g.u}; }

Point identity(const HTypeGroup& G) {
  return Point{Eigen::VectorXd::Zero(G.d1()), Eigen::VectorXd::Zero(G.d2())};
}

double homogeneous_norm(const Point& g) {
  const double x2 = g.x.squaredNorm();
  return std::pow(x2 * x2 + g.u.squaredNorm(), 0.25);
}

Point dilate(double R, const Point& g) {
  if (R < 0) throw DomainError("dilate: R must be nonnegative");
  return Point{R * g.x, R * R * g.u};
}

Eigen::MatrixXd j_map(const HTypeGroup& G, const Eigen::VectorXd& mu) {
  if (mu.size() != G.d2()) throw StructuralError("j_map: mu has wrong dimension");
  if (mu.norm() == 0.0) throw DomainError("j_map: mu must be nonzero");
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(G.d1(), G.d1());
  for (int k = 0; k < G.d2(); ++k) M += mu[k] * G.J(k);
  return M;
}

double omega_mu(const HTypeGroup& G, const Eigen::VectorXd& mu, const Eigen::VectorXd& x,
                const Eigen::VectorXd& y) {
  return x.dot(j_map(G, mu) * y);
}

Eigen::MatrixXd standard_symplectic(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return J;
}

Eigen::MatrixXd rotation(const HTypeGroup& G, const Eigen::VectorXd& mu) {
  const Eigen::MatrixXd J = j_map(G, mu / mu.norm());
  const int n = G.n(), d1 = G.d1();
  std::vector<Eigen::VectorXd> a, b;
  for (int c = 0; c < d1 && static_cast<int>(a.size()) < n; ++c) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(d1, c);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        v -= a[i].dot(v) * a[i];
        v -= b[i].dot(v) * b[i];
      }
    }
    const double r = v.norm();
    if (r < 1e-8) continue;
    v /= r;
    a.push_back(v);
    b.push_back(J.transpose() * v);
  }
  if (static_cast<int>(a.size()) != n)
    throw StructuralError("rotation: candidate vectors exhausted");
  Eigen::MatrixXd T(d1, d1);
  for (int i = 0; i < n; ++i) {
    T.col(i) = a[i];
    T.col(n + i) = b[i];
  }
  return T;
}

RotationCheck check_rotation(const HTypeGroup& G, const Eigen::VectorXd& mu,
                             const Eigen::MatrixXd& T) {
  const Eigen::MatrixXd J = j_map(G, mu / mu.norm());
  const Eigen::Index d1 = T.rows();
  RotationCheck c;
  c.orthogonality = (T.transpose() * T - Eigen::MatrixXd::Identity(d1, d1)).cwiseAbs().maxCoeff();
  c.symplectic = (T.transpose() * J * T - standard_symplectic(G.n())).cwiseAbs().maxCoeff();
  return c;
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Point random_point(const HTypeGroup& G, std::mt19937_64& rng, double ax, double au) {
  Point p{Eigen::VectorXd(G.d1()), Eigen::VectorXd(G.d2())};
  for (int i = 0; i < G.d1(); ++i) p.x[i] = uniform(rng, -ax, ax);
  for (int i = 0; i < G.d2(); ++i) p.u[i] = uniform(rng, -au, au);
  return p;
}

double gap(const Point& a, const Point& b) {
  return std::max((a.x - b.x).cwiseAbs().maxCoeff(), (a.u - b.u).cwiseAbs().maxCoeff());
}

}  // namespace

GroupPropertyReport group_property_suite(const HTypeGroup& G, int cases, std::uint64_t seed, double tol) {
  if (cases < 1) throw DomainError("group_property_suite: cases must be positive");
  std::mt19937_64 rng(seed);
  GroupPropertyReport r;
  r.cases = cases;
  for (int t = 0; t < cases; ++t) {
    const Point a = random_point(G, rng, 2, 2), b = random_point(G, rng, 2, 2), c = random_point(G, rng, 2, 2);
    const double R = uniform(rng, 0.1, 4.0);
    r.associativity = std::max(r.associativity, gap(multiply(multiply(a, b, G), c, G), multiply(a, multiply(b, c, G), G)));
    r.inverse = std::max({r.inverse, gap(multiply(a, inverse(a), G), identity(G)), gap(multiply(inverse(a), a, G), identity(G))});
    const double na = homogeneous_norm(a);
    r.homogeneity = std::max(r.homogeneity, std::abs(homogeneous_norm(dilate(R, a)) - R * na) / (R * na));
    r.automorphism = std::max(r.automorphism, gap(dilate(R, multiply(a, b, G)), multiply(dilate(R, a), dilate(R, b), G)) / (R * R));
    const double lhs = homogeneous_norm(multiply(inverse(multiply(c, a, G)), multiply(c, b, G), G));
    const double rhs = homogeneous_norm(multiply(inverse(a), b, G));
    r.left_invariance = std::max(r.left_invariance, std::abs(lhs - rhs) / rhs);
    r.quasi_triangle = std::max(r.quasi_triangle, homogeneous_norm(multiply(a, b, G)) / (na + homogeneous_norm(b)));
  }
  // |B(R)| from hits in the box [-R, R]^{d1} x [-R^2, R^2]^{d2}; the box volume scales by 2^Q as well
  const int samples = 200000;
  int hit1 = 0, hit2 = 0;
  for (int s = 0; s < samples; ++s) {
    if (homogeneous_norm(random_point(G, rng, 1, 1)) <= 1) ++hit1;
    if (homogeneous_norm(random_point(G, rng, 2, 4)) <= 2) ++hit2;
  }
  r.volume_ratio = hit1 > 0 ? static_cast<double>(hit2) / hit1 : 0.0;
  r.pass = r.associativity < tol && r.inverse < tol && r.homogeneity < tol && r.automorphism < tol &&
           r.left_invariance < tol && std::abs(r.volume_ratio - 1) < 0.02;
  return r;
}

}  // namespace htlab
