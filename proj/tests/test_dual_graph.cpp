#include <cmath>
#include <complex>

#include "dffg/dual_graph.hpp"
#include "dffg/log_math.hpp"
#include "dffg/oracle.hpp"
#include "doctest.h"

using namespace dffg;

namespace {

std::shared_ptr<const LatticeTopology> lattice(std::vector<std::size_t> d, std::vector<bool> p) {
  return std::make_shared<const LatticeTopology>(build_lattice(std::move(d), std::move(p)));
}

using cplx = std::complex<double>;

cplx omega(int q, long e) { return std::polar(1.0, -2.0 * M_PI * static_cast<double>(e) / q); }

// Primal factors straight from the Hamiltonians.
double kappa(Family f, double j, int a, int b) {
  if (f == Family::kIsing) return std::exp(j * (a == b ? 1.0 : -1.0));
  return std::exp(a == b ? j : 0.0);
}
double tau(Family f, double h, int x) {
  if (f == Family::kIsing) return std::exp(h * (x == 1 ? 1.0 : -1.0));
  return std::exp(x == 0 ? h : 0.0);
}

}  // namespace

TEST_CASE("Ising factor tables") {
  auto pair = lattice({1, 2}, {false, false});
  ModelSpec m(pair, Family::kIsing, 2, {0.5}, {-1.0, -1.0});
  DualFactors f(m);
  CHECK(std::exp(f.log_gamma(0, 0)) == doctest::Approx(4.510503860825523).epsilon(1e-13));
  CHECK(std::exp(f.log_gamma(0, 1)) == doctest::Approx(2.0843812219749895).epsilon(1e-13));
  CHECK(std::exp(f.log_lambda(0, 0)) == doctest::Approx(3.0861612696304874).epsilon(1e-13));
  CHECK(std::exp(f.log_lambda(0, 1)) == doctest::Approx(2.3504023872876028).epsilon(1e-13));
  CHECK(std::exp(f.log_gamma_scaled(0, 1)) == doctest::Approx(std::tanh(0.5)).epsilon(1e-14));
  CHECK(std::exp(f.log_lambda_scaled(0, 1)) == doctest::Approx(std::tanh(1.0)).epsilon(1e-14));

  ModelSpec tiny(pair, Family::kIsing, 2, {1e-12}, {-1.0, -1.0});
  CHECK(std::exp(DualFactors(tiny).log_gamma(0, 1)) < 1e-11);
}

TEST_CASE("Potts factor tables") {
  auto pair = lattice({1, 2}, {false, false});
  ModelSpec m(pair, Family::kPotts, 3, {1.0}, {2.25, 2.25});
  DualFactors f(m);
  CHECK(std::exp(f.log_gamma(0, 0)) == doctest::Approx(14.154845485377134).epsilon(1e-13));
  CHECK(std::exp(f.log_gamma(0, 1)) == doctest::Approx(5.154845485377136).epsilon(1e-13));
  CHECK(std::exp(f.log_gamma(0, 2)) == doctest::Approx(5.154845485377136).epsilon(1e-13));
  CHECK(std::exp(f.log_lambda(0, 0)) == doctest::Approx(11.487735836358526).epsilon(1e-13));
  CHECK(std::exp(f.log_lambda(1, 2)) == doctest::Approx(8.487735836358526).epsilon(1e-13));
}

TEST_CASE("tables match direct DFTs of the primal factors") {
  Rng rng(3);
  for (int q : {2, 3, 4, 5}) {
    const Family fam = q == 2 ? Family::kIsing : Family::kPotts;
    for (int trial = 0; trial < 5; ++trial) {
      const double j = 0.1 + 2.5 * uniform01(rng);
      const double h = (fam == Family::kIsing ? -1.0 : 1.0) * (0.05 + 2.5 * uniform01(rng));
      auto pair = lattice({1, 2}, {false, false});
      DualFactors f(ModelSpec(pair, fam, q, {j}, {h, h}));
      for (int t = 0; t < q; ++t) {
        cplx lam = 0.0;
        for (int x = 0; x < q; ++x) lam += tau(fam, h, x) * omega(q, static_cast<long>(x) * t);
        CHECK(lam.real() == doctest::Approx(std::exp(f.log_lambda(0, t))).epsilon(1e-12));
        CHECK(std::abs(lam.imag()) < 1e-10);
      }
      // Inverse transform with 1/q normalization recovers tau.
      for (int x = 0; x < q; ++x) {
        cplx back = 0.0;
        for (int t = 0; t < q; ++t) back += std::exp(f.log_lambda(0, t)) * std::conj(omega(q, static_cast<long>(x) * t));
        CHECK((back / static_cast<double>(q)).real() == doctest::Approx(tau(fam, h, x)).epsilon(1e-12));
      }
      // The 2D transform of kappa lives on t1 + t2 = 0 and equals gamma(t1) there.
      for (int t1 = 0; t1 < q; ++t1)
        for (int t2 = 0; t2 < q; ++t2) {
          cplx g = 0.0;
          for (int a = 0; a < q; ++a)
            for (int b = 0; b < q; ++b) g += kappa(fam, j, a, b) * omega(q, static_cast<long>(a) * t1 + b * t2);
          if ((t1 + t2) % q == 0)
            CHECK(g.real() == doctest::Approx(std::exp(f.log_gamma(0, t1))).epsilon(1e-12));
          else
            CHECK(std::abs(g) < 1e-9);
        }
    }
  }
}

TEST_CASE("auxiliary zero probability matches the threshold forms") {
  Rng rng(4);
  auto t = lattice({3, 3}, {true, true});
  auto ising = sample_params(t, Family::kIsing, 2, UniformParam{0.01, 5.0}, ConstantParam{-1.0}, rng);
  DualFactors fi(ising);
  for (std::size_t k = 0; k < t->num_bonds(); ++k) {
    const double j = ising.coupling(k);
    CHECK(fi.zero_probability(k) == doctest::Approx(0.5 * (1.0 + std::exp(-2.0 * j))).epsilon(1e-12));
    const double g0 = std::exp(fi.log_gamma(k, 0)), g1 = std::exp(fi.log_gamma(k, 1));
    CHECK(g0 / (g0 + g1) == doctest::Approx(fi.zero_probability(k)).epsilon(1e-12));
    CHECK(g0 > g1);
  }
  for (int q : {3, 4, 7}) {
    auto potts = sample_params(t, Family::kPotts, q, UniformParam{0.01, 5.0}, ConstantParam{1.0}, rng);
    DualFactors fp(potts);
    for (std::size_t k = 0; k < t->num_bonds(); ++k) {
      const double j = potts.coupling(k);
      CHECK(fp.zero_probability(k) == doctest::Approx((1.0 + (q - 1) * std::exp(-j)) / q).epsilon(1e-12));
      double sum = 0.0;
      for (int v = 0; v < q; ++v) sum += std::exp(fp.log_gamma(k, v));
      CHECK(std::exp(fp.log_gamma(k, 0)) / sum == doctest::Approx(fp.zero_probability(k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("dual site values") {
  auto t = lattice({3, 3}, {true, true});
  std::vector<Symbol> zeros(t->num_bonds(), 0);
  for (std::size_t s = 0; s < 9; ++s) CHECK(dual_site_value(*t, 2, zeros, s) == 0);

  for (std::size_t k = 0; k < t->num_bonds(); ++k) {
    std::vector<Symbol> one(t->num_bonds(), 0);
    one[k] = 1;
    const Bond b = t->bond_endpoints(k);
    for (std::size_t s = 0; s < 9; ++s)
      CHECK(dual_site_value(*t, 2, one, s) == ((s == b.tail || s == b.head) ? 1 : 0));
  }

  // Site 1 of a 3-site chain: head of bond 0, tail of bond 1.
  auto chain = lattice({3}, {false});
  std::vector<Symbol> x{2, 1};
  CHECK(dual_site_value(*chain, 3, x, 1) == 1);

  Rng rng(6);
  for (int q : {2, 3, 4, 5}) {
    std::vector<Symbol> xa(t->num_bonds());
    for (auto& v : xa) v = static_cast<Symbol>(rng() % q);
    std::vector<Symbol> xb(t->num_sites());
    dual_site_values(*t, q, xa, xb);
    long total = 0;
    for (std::size_t s = 0; s < t->num_sites(); ++s) {
      CHECK(xb[s] == dual_site_value(*t, q, xa, s));
      total += xb[s];
    }
    // Every bond enters once with + and once with -, so site values sum to 0 mod q.
    CHECK(total % q == 0);
  }
  CHECK_THROWS_AS(dual_site_value(*t, 2, std::vector<Symbol>(3), 0), std::invalid_argument);
}

TEST_CASE("log Z_q and duality constant") {
  auto pair2 = lattice({1, 3}, {false, false});
  ModelSpec m(pair2, Family::kIsing, 2, {0.5, 1.0}, {-1.0, -1.0, -1.0});
  CHECK(log_Zq(m) == doctest::Approx(4.272588722239782).epsilon(1e-14));
  ModelSpec p(pair2, Family::kPotts, 3, {1.0, 1.0}, {1.0, 1.0, 1.0});
  CHECK(log_Zq(p) == doctest::Approx(6.394449154672439).epsilon(1e-14));

  auto t8 = lattice({2, 2}, {true, true});
  ModelSpec small(t8, Family::kIsing, 2, std::vector<double>(8, 1e-12), std::vector<double>(4, -1.0));
  CHECK(log_Zq(small) == doctest::Approx(8.0 * std::log(4.0)));
  CHECK(log_duality_constant(small) == doctest::Approx(16.0 * std::log(2.0)));
  ModelSpec potts8(t8, Family::kPotts, 3, std::vector<double>(8, 1.0), std::vector<double>(4, 1.0));
  CHECK(log_duality_constant(potts8) == doctest::Approx(16.0 * std::log(3.0)));

  auto pair = lattice({1, 2}, {false, false});
  ModelSpec one(pair, Family::kIsing, 2, {0.5}, {-1.0, -1.0});
  CHECK(exact_log_Zd(one) - exact_log_Z(one) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(exact_log_Zd(potts8) - exact_log_Z(potts8) == doctest::Approx(16.0 * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("log Gamma and log Lambda") {
  auto t = lattice({1, 3}, {false, false});
  ModelSpec m(t, Family::kIsing, 2, {0.5, 0.5}, {-1.0, -1.0, -1.0});
  DualFactors f(m);
  CHECK(log_Gamma(f, std::vector<Symbol>{0, 0}) == doctest::Approx(3.012817736156336).epsilon(1e-14));

  ModelSpec p(t, Family::kPotts, 3, {1.0, 1.0}, {0.0, 0.0, 0.0});
  DualFactors fp(p);
  CHECK(log_Lambda(fp, std::vector<Symbol>{0, 0, 0}) == doctest::Approx(3.0 * std::log(3.0)));
  CHECK(is_log_zero(log_Lambda(fp, std::vector<Symbol>{0, 2, 0})));
  CHECK(is_log_zero(log_Lambda_scaled(fp, std::vector<Symbol>{1, 0, 0})));
}

TEST_CASE("scaled and raw weights differ by the global scale") {
  Rng rng(8);
  auto t = lattice({4, 5}, {true, false});
  for (int q : {2, 3}) {
    const Family fam = q == 2 ? Family::kIsing : Family::kPotts;
    auto m = sample_params(t, fam, q, UniformParam{0.2, 2.0},
                           fam == Family::kIsing ? ParamSpec{UniformParam{-2.0, -0.1}} : ParamSpec{UniformParam{0.1, 2.0}},
                           rng);
    DualFactors f(m);
    double s = 0.0;
    for (std::size_t k = 0; k < t->num_bonds(); ++k) s += f.log_gamma_scale(k);
    for (std::size_t i = 0; i < t->num_sites(); ++i) s += f.log_lambda_scale(i);
    CHECK(f.log_scale_S() == doctest::Approx(s).epsilon(1e-14));
    if (q == 2) {
      double direct = 0.0;
      for (std::size_t k = 0; k < t->num_bonds(); ++k) direct += std::log(4.0 * std::cosh(m.coupling(k)));
      for (std::size_t i = 0; i < t->num_sites(); ++i) direct += std::log(2.0 * std::cosh(m.field(i)));
      CHECK(f.log_scale_S() == doctest::Approx(direct).epsilon(1e-13));
    }
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Symbol> xa(t->num_bonds());
      for (auto& v : xa) v = static_cast<Symbol>(rng() % q);
      auto c = make_dual_config(*t, q, xa);
      const double raw = log_Gamma(f, c.x_A) + log_Lambda(f, c.x_B);
      const double scaled = f.log_scale_S() + log_Gamma_scaled(f, c.x_A) + log_Lambda_scaled(f, c.x_B);
      CHECK(raw == doctest::Approx(scaled).epsilon(1e-12));
    }
  }
}
