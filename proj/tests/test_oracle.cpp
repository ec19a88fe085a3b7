#include <algorithm>
#include <cmath>
#include <sstream>

#include "dffg/dual_graph.hpp"
#include "dffg/log_math.hpp"
#include "dffg/oracle.hpp"
#include "doctest.h"

using namespace dffg;

namespace {

std::shared_ptr<const LatticeTopology> lattice(std::vector<std::size_t> d, std::vector<bool> p) {
  return std::make_shared<const LatticeTopology>(build_lattice(std::move(d), std::move(p)));
}

ModelSpec pair_model() {
  return ModelSpec(lattice({1, 2}, {false, false}), Family::kIsing, 2, {0.5}, {-1.0, -1.0});
}

ModelSpec random_model(const std::shared_ptr<const LatticeTopology>& t, int q, Rng& rng) {
  const Family fam = q == 2 ? Family::kIsing : Family::kPotts;
  const ParamSpec h = fam == Family::kIsing ? ParamSpec{UniformParam{-2.0, -0.05}} : ParamSpec{UniformParam{0.05, 2.5}};
  return sample_params(t, fam, q, UniformParam{0.05, 2.0}, h, rng);
}

}  // namespace

TEST_CASE("single-bond Ising reference values") {
  const auto m = pair_model();
  CHECK(exact_log_Z(m) == doctest::Approx(2.611442779196733).epsilon(1e-13));
  CHECK(exact_log_Zd(m) == doctest::Approx(3.9977371403166235).epsilon(1e-13));
  CHECK(std::exp(exact_log_Zd(m)) == doctest::Approx(54.474741761108675).epsilon(1e-13));
  const auto pd = exact_dual_distribution(m);
  REQUIRE(pd.size() == 2);
  CHECK(pd[0] == doctest::Approx(0.78861877).epsilon(1e-7));
  CHECK(pd[1] == doctest::Approx(0.21138123).epsilon(1e-7));
  const auto qa = auxiliary_distribution(m);
  CHECK(qa[0] == doctest::Approx(0.68393972).epsilon(1e-7));
  CHECK(chi_squared(m) == doctest::Approx(0.05069111374024282).epsilon(1e-12));

  ModelSpec free_field(lattice({1, 2}, {false, false}), Family::kIsing, 2, {0.5}, {0.0, 0.0});
  CHECK(exact_log_Z(free_field) == doctest::Approx(1.506408868078168).epsilon(1e-13));
}

TEST_CASE("weak coupling factorizes") {
  auto t = lattice({2, 3}, {false, true});
  Rng rng(11);
  auto m = sample_params(t, Family::kIsing, 2, ConstantParam{1e-13}, UniformParam{-1.5, -0.2}, rng);
  double expect = 0.0;
  for (double h : m.fields()) expect += std::log(std::exp(-h) + std::exp(h));
  CHECK(exact_log_Z(m) == doctest::Approx(expect).epsilon(1e-10));
  const auto pd = exact_dual_distribution(m);
  CHECK(pd[0] > 1.0 - 1e-9);
}

TEST_CASE("duality constant across random small models") {
  struct Shape {
    std::vector<std::size_t> dims;
    std::vector<bool> periodic;
  };
  const std::vector<Shape> shapes = {{{2, 2}, {true, true}}, {{2, 3}, {false, false}}, {{5}, {true}},
                                     {{1, 4}, {false, false}}, {{2, 2}, {false, true}}, {{3, 3}, {false, false}},
                                     {{2, 3}, {true, false}}, {{3}, {true}}, {{2, 2, 2}, {false, false, false}}};
  Rng rng(12);
  int checked = 0;
  for (int q : {2, 3, 4}) {
    for (const auto& s : shapes) {
      auto t = lattice(s.dims, s.periodic);
      const auto n = state_count(q, t->num_bonds());
      if (!n || *n > (1u << 20)) continue;
      for (int rep = 0; rep < 3; ++rep) {
        auto m = random_model(t, q, rng);
        const double diff = exact_log_Zd(m) - exact_log_Z(m);
        const double want = 2.0 * t->num_bonds() * std::log(static_cast<double>(q));
        CAPTURE(q);
        CAPTURE(s.dims);
        CHECK(std::fabs(diff - want) <= 1e-9 * want);
        ++checked;
      }
    }
  }
  CHECK(checked >= 50);
}

TEST_CASE("parallel enumeration matches the serial reference") {
  Rng rng(13);
  auto t = lattice({3, 3}, {true, true});
  auto m = random_model(t, 2, rng);
  CHECK(exact_log_Z(m) == doctest::Approx(exact_log_Z_serial(m)).epsilon(1e-12));
  CHECK(exact_log_Zd(m) == doctest::Approx(exact_log_Zd_serial(m)).epsilon(1e-12));
}

TEST_CASE("3x3 Potts Z is independent of enumeration order") {
  Rng rng(14);
  auto t = lattice({3, 3}, {true, true});
  auto m = random_model(t, 3, rng);
  const double a = exact_log_Z(m);
  CHECK(std::isfinite(a));
  // Enumerate again with site digits reversed.
  std::vector<double> terms;
  SpinConfig x(9), y(9);
  for (std::uint64_t i = 0; i < 19683; ++i) {
    decode_config(i, 3, x);
    std::reverse_copy(x.begin(), x.end(), y.begin());
    terms.push_back(boltzmann_log_weight(m, y));
  }
  CHECK(log_sum_exp(terms) == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("dual distribution is normalized and chi-squared is nonnegative") {
  Rng rng(15);
  for (int q : {2, 3}) {
    auto t = lattice({2, 2}, {true, q == 2});
    auto m = random_model(t, q, rng);
    const auto pd = exact_dual_distribution(m);
    double s = 0.0;
    for (double p : pd) s += p;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    const auto qa = auxiliary_distribution(m);
    double sq = 0.0;
    for (double p : qa) sq += p;
    CHECK(sq == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(chi_squared(m) >= 0.0);
    CHECK(chi_squared_divergence(qa, qa) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("chi-squared shrinks as the field strengthens") {
  auto t = lattice({2, 2}, {true, true});
  double prev = std::numeric_limits<double>::infinity();
  for (double h : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    ModelSpec m(t, Family::kIsing, 2, std::vector<double>(8, 0.5), std::vector<double>(4, -h));
    const double c = chi_squared(m);
    CHECK(c < prev);
    prev = c;
  }
  ModelSpec strong(t, Family::kIsing, 2, std::vector<double>(8, 0.5), std::vector<double>(4, -8.0));
  CHECK(chi_squared(strong) < 1e-4);
}

TEST_CASE("size guards") {
  Rng rng(16);
  auto big = lattice({5, 5}, {true, true});
  auto m = random_model(big, 2, rng);
  CHECK_THROWS_AS(exact_log_Z(m), SizeGuardError);
  CHECK_THROWS_AS(exact_log_Zd(m), SizeGuardError);
  auto mid = lattice({3, 3}, {true, true});
  CHECK_THROWS_AS(exact_dual_distribution(random_model(mid, 2, rng)), SizeGuardError);
  auto cube = lattice({10, 10, 10}, {true, true, true});
  CHECK_THROWS_AS(exact_log_Z(random_model(cube, 2, rng)), SizeGuardError);
}

TEST_CASE("exact result bundle and distribution dump") {
  const auto m = pair_model();
  const auto r = exact(m, true);
  CHECK(r.ln_Z_d - r.ln_Z == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  REQUIRE(r.p_d.has_value());
  REQUIRE(r.chi_squared.has_value());
  std::ostringstream os;
  write_distribution_csv(os, m, *r.p_d);
  CHECK(os.str().rfind("config_index,x_A,probability\n0,0,0.78861877", 0) == 0);
}

TEST_CASE("Pearson goodness of fit") {
  std::vector<double> p{0.5, 0.25, 0.25};
  std::vector<std::uint64_t> exact_counts{500, 250, 250};
  auto g = pearson_gof(exact_counts, p);
  CHECK(g.statistic == doctest::Approx(0.0));
  CHECK(g.dof == 2);
  std::vector<std::uint64_t> off{600, 200, 200};
  CHECK(pearson_gof(off, p).statistic == doctest::Approx(20.0 + 10.0 + 10.0));
  CHECK(chi_square_quantile(1, 0.95) == doctest::Approx(3.841458820694124).epsilon(1e-10));
}
