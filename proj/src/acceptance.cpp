#include "htlab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "htlab/counterexample.hpp"
#include "htlab/errors.hpp"
#include "htlab/estimates.hpp"
#include "htlab/io.hpp"
#include "htlab/kernel.hpp"
#include "htlab/parallel.hpp"
#include "htlab/quadrature.hpp"
#include "htlab/twisted.hpp"

namespace htlab {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string sci(double v) { return fmt("%.2e", v); }

struct Verdict {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

Grid central_grid(int N, double T, int Nu, double P) {
  return Grid({Axis{-T, T, static_cast<std::size_t>(N), false}, Axis{-T, T, static_cast<std::size_t>(N), false},
               Axis{-P / 2, P / 2, static_cast<std::size_t>(Nu), true}},
              2);
}

GridFunction gaussian_pair(const Grid& g) {
  return GridFunction::sample(g, [](const double* z) {
    const double r1 = (z[0] - 0.6) * (z[0] - 0.6) + (z[1] + 0.2) * (z[1] + 0.2);
    const double r2 = (z[0] + 0.9) * (z[0] + 0.9) + (z[1] - 0.7) * (z[1] - 0.7);
    return cplx(1.0, 0.4) * std::exp(-r1 / 1.2) + cplx(-0.3, 0.8) * std::exp(-r2 / 0.8);
  });
}

// ---------------------------------------------------------------- criteria

Verdict special_functions() {
  Verdict v;
  double norm_err = 0.0;
  for (int n : {1, 2})
    for (double lam : {0.5, 1.0, 2.0})
      for (int k = 0; k <= 10; ++k) {
        const double R = 2.0 * std::sqrt((4.0 * k + 2.0 * n + 60.0) / lam);
        const Rule r = composite_legendre(0.0, R, 200);
        double s = 0.0;
        for (std::size_t q = 0; q < r.size(); ++q) {
          const double f = laguerre_fn_radial(k, lam, n, r.x[q]);
          s += r.w[q] * f * f * std::pow(r.x[q], 2 * n - 1);
        }
        s *= sphere_area(2 * n);
        const double exact = std::pow(2 * kPi * lam, n) * multiplicity(k, n);
        norm_err = std::max(norm_err, std::abs(s - exact) / exact);
      }
  v.check(norm_err < 1e-8, "phi_k norms " + sci(norm_err));

  // Gram matrix of Phi_{nu,nu'}^1, nu, nu' <= 3 (n = 1), trapezoidal on [-16, 16]^2
  const int N = 241;
  const double T = 16.0, h = 2 * T / (N - 1);
  std::vector<double> axis(N);
  for (int i = 0; i < N; ++i) axis[i] = -T + i * h;
  std::vector<Eigen::MatrixXcd> tabs;
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b) tabs.push_back(pair_coefficient_table(a, b, 1.0, axis, axis));
  double gram_err = 0.0;
  for (std::size_t i = 0; i < tabs.size(); ++i)
    for (std::size_t j = 0; j < tabs.size(); ++j) {
      const cplx g = (tabs[i].conjugate().cwiseProduct(tabs[j])).sum() * h * h;
      gram_err = std::max(gram_err, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  v.check(gram_err < 1e-8, "matrix-coefficient Gram " + sci(gram_err));

  std::mt19937_64 rng(5);
  double link_err = 0.0;
  for (int n : {1, 2})
    for (int k = 0; k <= 6; ++k)
      for (double lam : {0.5, 1.0, 2.0})
        for (int t = 0; t < 3; ++t) {
          std::vector<double> z(2 * n);
          for (double& x : z) x = -2.5 + 5.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
          cplx s = 0.0;
          if (n == 1) {
            s = matrix_coefficient({k}, {k}, lam, z);
          } else {
            for (int a = 0; a <= k; ++a) s += matrix_coefficient({a, k - a}, {a, k - a}, lam, z);
          }
          s *= std::pow(2 * kPi * lam, 0.5 * n);
          link_err = std::max(link_err, std::abs(s - laguerre_fn(k, lam, z)));
        }
  v.check(link_err < 1e-8, "Laguerre link " + sci(link_err));
  return v;
}

Verdict eigenvalue_relations() {
  Verdict v;
  const Grid g = desk_grid(1);
  double ea = 0.0, eh = 0.0;
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; a + b <= 8; ++b) {
      const GridFunction f = sample_matrix_coefficient({a}, {b}, 1.0, g);
      const double nf = norm(f);
      const double la = 2 * a + 1, lh = a + b + 1;
      ea = std::max(ea, distance(apply_L0(1.0, f), scaled(la, f)) / (la * nf));
      eh = std::max(eh, distance(apply_H(1.0, f), scaled(lh, f)) / (lh * nf));
    }
  v.check(ea < 1e-3, "L0 residual " + sci(ea));
  v.check(eh < 1e-3, "H residual " + sci(eh));
  return v;
}

Verdict projector_algebra() {
  Verdict v;
  const Grid g = Grid::symmetric(2, 12.0, 81);
  const GridFunction f = gaussian_pair(g);
  const double nf = norm(f);
  std::vector<GridFunction> P;
  for (int j = 0; j <= 8; ++j) P.push_back(project_lambda(j, 1.0, f));
  double err = 0.0;
  for (int k = 0; k <= 8; ++k)
    for (int j = 0; j <= 8; ++j) {
      const GridFunction kj = project_lambda(k, 1.0, P[j]);
      err = std::max(err, (k == j ? distance(kj, P[k]) : norm(kj)) / nf);
    }
  v.check(err < 1e-4, "Lambda_k Lambda_j " + sci(err));

  const HTypeGroup H = HTypeGroup::heisenberg(1);
  const Grid out = Grid::symmetric(2, 16.0, 129), quad = Grid::symmetric(2, 18.0, 145), sub = Grid::symmetric(2, 16.0, 17);
  auto gf = [](const double* z) {
    const double r2 = (z[0] - 0.4) * (z[0] - 0.4) + (z[1] + 0.3) * (z[1] + 0.3);
    return cplx(1.0, 0.3) * std::exp(-r2 / (2 * 0.81));
  };
  const GridFunction gs = GridFunction::sample(out, gf);
  double route = 0.0, tdep = 0.0;
  for (double m : {0.5, -2.0}) {
    const Eigen::VectorXd mu = Eigen::VectorXd::Constant(1, m);
    Eigen::Matrix2d R;
    R << std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7);
    const Eigen::MatrixXd T2 = rotation(H, mu) * R;
    const GridFunction full = project_pi(3, mu, gs, H);
    GridFunction A(sub);
    for (std::size_t i = 0; i < 17; ++i)
      for (std::size_t j = 0; j < 17; ++j) A.v[i * 17 + j] = full.v[i * 8 * 129 + j * 8];
    const GridFunction B = project_pi_rotated(3, mu, gf, H, sub, quad);
    const GridFunction C = project_pi_rotated(3, mu, gf, H, sub, quad, &T2);
    route = std::max(route, distance(A, B) / norm(A));
    tdep = std::max(tdep, distance(B, C) / norm(A));
  }
  v.check(route < 1e-8, "kernel vs rotation " + sci(route));
  v.check(tdep < 1e-8, "T-independence " + sci(tdep));
  return v;
}

Verdict kernel_consistency() {
  Verdict v;
  const auto G = HTypeGroup::heisenberg(1);
  {
    const int N = 81, Nu = 128;
    const Grid g = central_grid(N, 12.0, Nu, 128.0);
    const GridFunction f = GridFunction::sample(g, [](const double* z) {
      const double e = std::exp(-(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]) / 2) * (1 + 0.3 * z[0]);
      return cplx(e < 1e-17 ? 0.0 : e, 0.0);
    });
    const auto M = JointMultiplier::truncated(MultiplierSpec::bump(1.0, 0.5), 0);
    const GridFunction out = apply_multiplier(M, f, G);
    KernelOptions ko;
    ko.u_max = 60.0;
    ko.x_max = 9.0;
    const KernelTable K = synthesize_kernel(M, G, nullptr, ko);
    std::mt19937_64 rng(11);
    std::vector<Point> targets;
    std::vector<cplx> ref;
    for (int i = 0; i < 40; ++i) {
      const std::size_t ix = N / 2 + rng() % 25 - 12, iy = N / 2 + rng() % 25 - 12, iu = Nu / 2 + rng() % 64 - 32;
      const std::size_t flat = (ix * N + iy) * Nu + iu;
      double z[3];
      g.coords(flat, z);
      targets.push_back({Eigen::Vector2d(z[0], z[1]), Eigen::VectorXd::Constant(1, z[2])});
      ref.push_back(out.v[flat]);
    }
    const auto gc = group_convolve(f, K, G, targets);
    double e = 0.0, nr = 0.0;
    for (std::size_t i = 0; i < gc.size(); ++i) {
      e += std::norm(gc[i] - ref[i]);
      nr += std::norm(ref[i]);
    }
    const double rel = std::sqrt(e / nr);
    v.check(rel < 1e-3, "apply vs convolution " + sci(rel));
  }
  {
    const auto F = MultiplierSpec::bump(1.0, 0.5);
    KernelOptions ko;
    ko.mu_min = 1.0 / 64;
    ko.u_max = 4.0;
    ko.x_max = 3.0;
    const KernelTable K = synthesize_kernel(JointMultiplier::of_sqrtL(F), G, nullptr, ko);
    int kmax = 0;
    for (const auto& t : K.record) kmax = std::max(kmax, t.k);
    int L = 0;
    while ((1 << L) < 2 * kmax + 1) ++L;
    std::vector<KernelTable> parts;
    for (int ell = -1; ell <= L; ++ell) parts.push_back(synthesize_kernel(JointMultiplier::truncated(F, ell), G, nullptr, ko));
    double err = 0.0, ref = 0.0;
    for (double r : {0.0, 0.5, 1.2, 2.5})
      for (double s : {0.0, 0.8, 2.0, 4.0}) {
        cplx sum = 0.0;
        for (const auto& P : parts) sum += P.evaluate_radial(r, s);
        const cplx full = K.evaluate_radial(r, s);
        err += std::norm(sum - full);
        ref += std::norm(full);
      }
    const double rel = std::sqrt(err / ref);
    v.check(rel < 1e-4, "telescoping " + sci(rel));
  }
  return v;
}

Verdict weighted_plancherel() {
  Verdict v;
  const auto F = MultiplierSpec::wave_packet(1.0, 0.5, 1024.0);
  for (const auto& G : {HTypeGroup::heisenberg(1), HTypeGroup::quaternionic()})
    for (double alpha : {0.0, 1.0, 2.0}) {
      const ScanReport r = weighted_plancherel_scan(F, G, alpha, 2, 7);
      const double want = alpha - 0.5 * G.d2();
      v.check(r.fitted && std::abs(r.slope - want) < 0.3,
              "d2=" + std::to_string(G.d2()) + " alpha=" + fmt("%g", alpha) + " slope " + fmt("%.3f", r.slope));
    }
  return v;
}

Verdict restriction_decay() {
  Verdict v;
  const auto F = MultiplierSpec::bump(1.0, 0.5);
  for (const auto& G : {HTypeGroup::heisenberg(1), HTypeGroup::quaternionic()}) {
    const ScanReport r = restriction_scan(F, G, 2, 7);
    v.check(r.fitted && std::abs(r.slope + 0.5 * G.d2()) < 0.3,
            "d2=" + std::to_string(G.d2()) + " slope " + fmt("%.3f", r.slope));
  }
  const auto H = HTypeGroup::heisenberg(1);
  const double a = restriction_norm_spatial(F, H, 2), b = restriction_norm_p1(F, H, 2);
  const double rel = std::abs(a - b) / b;
  v.check(rel < 1e-3, "two-path " + sci(rel));
  return v;
}

Verdict discrete_restriction() {
  Verdict v;
  double closed = 0.0, spread = 1.0;
  for (int n : {1, 2}) {
    const double r0 = discrete_restriction_p1(n, 0, 1.0).ratio;
    for (int k = 0; k <= 50; ++k)
      for (double rho : {0.5, 1.0, 3.0}) {
        const auto d = discrete_restriction_p1(n, k, rho);
        closed = std::max(closed, std::abs(d.quadrature - d.value) / d.value);
        const double q = discrete_restriction_p1(n, k, 1.0).ratio / r0;
        spread = std::max({spread, q, 1.0 / q});
      }
  }
  v.check(closed < 1e-8, "closed form " + sci(closed));
  v.check(spread < 4.0, "ratio spread " + fmt("%.3f", spread));
  return v;
}

Verdict counterexample() {
  Verdict v;
  const Grid g = desk_grid(1);
  bool exact = counterexample_row({0}, {9}, Grid::symmetric(2, 12.0, 65)).ratio == Rational(10);
  for (int m = 0; m <= 12; ++m)
    exact = exact && counterexample_row({0}, {m}, Grid::symmetric(2, 12.0, 65)).ratio == Rational(m + 1);
  v.check(exact, "ratio table exact");
  double eig = 0.0, ident = 0.0;
  bool summands = true;
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; a + b <= 8; ++b) {
      const auto r = counterexample_row({a}, {b}, g);
      eig = std::max(eig, r.eig_error);
      ident = std::max(ident, r.identity_error);
      summands = summands && r.summands_ok;
    }
  v.check(eig < 1e-3, "forms vs eigenvalues " + sci(eig));
  v.check(ident < 1e-3, "quadratic-form identity " + sci(ident));
  v.check(summands, "summand inequalities");
  std::vector<int> ladder;
  for (int m = 0; m <= 20000; ++m) ladder.push_back(m);
  bool certified = true;
  for (int C : {1, 2, 3, 10, 100}) {
    const auto rep = refutation_scan(1, {0}, ladder, Rational(C));
    certified = certified && !rep.inconclusive && rep.increasing;
  }
  v.check(certified, "refutation certified for C in {1,2,3,10,100}");
  return v;
}

Verdict property_suites() {
  Verdict v;
  bool groups = true;
  for (const auto& G : {HTypeGroup::heisenberg(1), HTypeGroup::heisenberg(2), HTypeGroup::quaternionic()})
    groups = groups && group_property_suite(G, 1000, 2024).pass;
  v.check(groups, "group axioms (1000 cases per group)");

  double pu = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double lam = std::pow(10.0, -6.0 + 12.0 * i / 4000.0);
    double s = 0.0;
    for (int j = -30; j <= 30; ++j) s += dyadic_bump(j, lam);
    pu = std::max(pu, std::abs(s - 1.0));
  }
  v.check(pu < 1e-12, "partition of unity " + sci(pu));

  auto run = [] {
    const auto F = MultiplierSpec::bump(1.0, 0.5);
    std::string s = dump_json(weighted_plancherel_scan(F, HTypeGroup::quaternionic(), 1.0, 2, 5).to_json());
    s += dump_json(restriction_scan(F, HTypeGroup::heisenberg(1), 2, 5).to_json());
    const LowerBound lb = restriction_lower_bound(F, HTypeGroup::heisenberg(1), 3, 1.0, 8, 99);
    s += format_double(lb.value) + format_double(lb.sigma) + format_double(lb.tau);
    s += essential_support_scan(F, HTypeGroup::heisenberg(1), 4, 2, {0.5, 1, 2}).to_csv();
    return s;
  };
  const std::string a = run(), b = run();
  const int cap = thread_cap();
  set_thread_cap(1);
  const std::string c = run();
  set_thread_cap(cap);
  v.check(a == b && a == c, "seeded runs byte-identical");
  return v;
}

Verdict soft_checks() {
  Verdict v;
  const auto H = HTypeGroup::heisenberg(1);
  const ScanReport es = essential_support_scan(MultiplierSpec::bump(1.0, 0.5), H, 5, 3, {0.25, 0.5, 1, 2, 3, 4, 6, 8});
  bool mono = true;
  for (std::size_t i = 1; i < es.values.size(); ++i) mono = mono && es.values[i] <= es.values[i - 1];
  v.check(mono, "support fractions nonincreasing");
  v.check(es.values[5] < kSupportTheta, "support fraction at c=4 " + sci(es.values[5]));

  const Grid g = central_grid(65, 8.0, 256, 32.0);
  const PropagationReport pr = propagation_check(H, quasi_ball_bump(g, H, 1.0), 1.0);
  bool pmono = true;
  for (std::size_t i = 1; i < pr.outside.size(); ++i) pmono = pmono && pr.outside[i] <= pr.outside[i - 1];
  v.check(pmono, "propagation fractions nonincreasing");
  v.check(pr.outside[2] < kPropagationTheta, "outside at kappa=3 " + sci(pr.outside[2]));
  v.check(pr.outside[2] < pr.leakage, "below cutoff leakage " + sci(pr.leakage));
  return v;
}

}  // namespace

std::string criterion_title(int id) {
  static const char* titles[kCriterionCount] = {"special-function identities",
                                                "eigenvalue relations",
                                                "projector algebra",
                                                "kernel consistency",
                                                "weighted Plancherel scaling",
                                                "restriction decay at p=1",
                                                "discrete restriction at p=1",
                                                "counterexample",
                                                "property suites",
                                                "essential support and propagation"};
  if (id < 1 || id > kCriterionCount) throw DomainError("criterion id must lie in 1.." + std::to_string(kCriterionCount));
  return titles[id - 1];
}

CriterionResult run_criterion(int id) {
  CriterionResult r;
  r.id = id;
  r.title = criterion_title(id);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Verdict v;
    switch (id) {
      case 1: v = special_functions(); break;
      case 2: v = eigenvalue_relations(); break;
      case 3: v = projector_algebra(); break;
      case 4: v = kernel_consistency(); break;
      case 5: v = weighted_plancherel(); break;
      case 6: v = restriction_decay(); break;
      case 7: v = discrete_restriction(); break;
      case 8: v = counterexample(); break;
      case 9: v = property_suites(); break;
      default: v = soft_checks(); break;
    }
    r.pass = v.pass;
    r.detail = v.detail;
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<int> todo = ids;
  if (todo.empty())
    for (int i = 1; i <= kCriterionCount; ++i) todo.push_back(i);
  for (int id : todo) criterion_title(id);  // validate before running anything
  std::vector<CriterionResult> out;
  for (int id : todo) {
    out.push_back(run_criterion(id));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  return "criterion " + std::to_string(r.id) + " " + r.title + ": " + (r.pass ? "PASS" : "FAIL") + " (" + r.detail +
         ") [" + fmt("%.1f", r.seconds) + " s]";
}

}  // namespace htlab
