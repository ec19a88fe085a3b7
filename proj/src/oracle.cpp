#include "dffg/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "dffg/dual_graph.hpp"
#include "dffg/log_math.hpp"

namespace dffg {

namespace {

constexpr std::uint64_t kBlocks = 256;

std::uint64_t guarded_count(int q, std::size_t n, std::uint64_t limit, const char* what) {
  const auto c = state_count(q, n);
  if (!c || *c > limit)
    throw SizeGuardError(std::string(what) + ": " + std::to_string(q) + "^" + std::to_string(n) +
                         " configurations exceed the limit of " + std::to_string(limit));
  return *c;
}

void increment(std::span<Symbol> digits, int q) {
  for (Symbol& d : digits) {
    if (++d < q) return;
    d = 0;
  }
}

/// Shifted sum of exp(log_term(config)) over configurations [begin, end).
template <class Term>
std::pair<double, double> block_sum(std::uint64_t begin, std::uint64_t end, int q, std::size_t n, Term&& term) {
  std::vector<Symbol> x(n);
  decode_config(begin, q, x);
  double shift = kLogZero, sum = 0.0;
  for (std::uint64_t i = begin; i < end; ++i) {
    const double t = term(std::span<const Symbol>(x));
    if (!is_log_zero(t)) {
      if (t > shift) {
        sum = sum * std::exp(shift - t) + 1.0;
        shift = t;
      } else {
        sum += std::exp(t - shift);
      }
    }
    increment(x, q);
  }
  return {shift, sum};
}

template <class Term>
double enumerate_log_sum(std::uint64_t total, int q, std::size_t n, bool parallel, Term term) {
  // Same block partition either way so that only the scheduling differs.
  const std::uint64_t blocks = std::min<std::uint64_t>(kBlocks, total);
  std::vector<double> logs(blocks);
  auto body = [&](std::int64_t b) {
    const std::uint64_t lo = total * b / blocks, hi = total * (b + 1) / blocks;
    auto [shift, sum] = block_sum(lo, hi, q, n, term);
    logs[b] = sum > 0.0 ? shift + std::log(sum) : kLogZero;
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) body(b);
  } else {
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) body(b);
  }
  return log_sum_exp(logs);
}

double log_Z_impl(const ModelSpec& model, bool parallel) {
  const std::size_t n = model.topology().num_sites();
  const std::uint64_t total = guarded_count(model.q(), n, kMaxPrimalStates, "exact_log_Z");
  return enumerate_log_sum(total, model.q(), n, parallel,
                           [&](std::span<const Symbol> x) { return boltzmann_log_weight(model, x); });
}

double log_Zd_impl(const ModelSpec& model, bool parallel) {
  const auto& topo = model.topology();
  const std::uint64_t total = guarded_count(model.q(), topo.num_bonds(), kMaxDualStates, "exact_log_Zd");
  const DualFactors f(model);
  return enumerate_log_sum(total, model.q(), topo.num_bonds(), parallel, [&](std::span<const Symbol> x_A) {
    thread_local std::vector<Symbol> x_B;
    x_B.resize(topo.num_sites());
    dual_site_values(topo, model.q(), x_A, x_B);
    return log_Gamma(f, x_A) + log_Lambda(f, x_B);
  });
}

}  // namespace

std::optional<std::uint64_t> state_count(int q, std::size_t n) {
  std::uint64_t c = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (c > (1ULL << 62) / static_cast<std::uint64_t>(q)) return std::nullopt;
    c *= static_cast<std::uint64_t>(q);
  }
  return c;
}

void decode_config(std::uint64_t index, int q, std::span<Symbol> out) {
  for (Symbol& d : out) {
    d = static_cast<Symbol>(index % q);
    index /= q;
  }
}

double exact_log_Z(const ModelSpec& model) { return log_Z_impl(model, true); }
double exact_log_Z_serial(const ModelSpec& model) { return log_Z_impl(model, false); }
double exact_log_Zd(const ModelSpec& model) { return log_Zd_impl(model, true); }
double exact_log_Zd_serial(const ModelSpec& model) { return log_Zd_impl(model, false); }

std::vector<double> exact_dual_distribution(const ModelSpec& model) {
  const auto& topo = model.topology();
  const std::uint64_t total = guarded_count(model.q(), topo.num_bonds(), kMaxTableStates, "exact_dual_distribution");
  const DualFactors f(model);
  std::vector<double> logp(total);
  std::vector<Symbol> x_A(topo.num_bonds()), x_B(topo.num_sites());
  for (std::uint64_t i = 0; i < total; ++i) {
    dual_site_values(topo, model.q(), x_A, x_B);
    logp[i] = log_Gamma(f, x_A) + log_Lambda(f, x_B);
    increment(x_A, model.q());
  }
  const double log_zd = log_sum_exp(logp);
  for (double& v : logp) v = is_log_zero(v) ? 0.0 : std::exp(v - log_zd);
  return logp;
}

std::vector<double> auxiliary_distribution(const ModelSpec& model) {
  const auto& topo = model.topology();
  const std::uint64_t total = guarded_count(model.q(), topo.num_bonds(), kMaxTableStates, "auxiliary_distribution");
  const DualFactors f(model);
  std::vector<double> out(total);
  std::vector<Symbol> x_A(topo.num_bonds());
  for (std::uint64_t i = 0; i < total; ++i) {
    double lp = 0.0;
    for (std::size_t k = 0; k < x_A.size(); ++k) {
      const double p0 = f.zero_probability(k);
      lp += x_A[k] == 0 ? std::log(p0) : std::log1p(-p0) - std::log(model.q() - 1.0);
    }
    out[i] = std::exp(lp);
    increment(x_A, model.q());
  }
  return out;
}

double chi_squared_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("chi_squared: table size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) throw std::domain_error("chi_squared: q vanishes where p is positive");
    s += p[i] * p[i] / q[i];
  }
  return s - 1.0;
}

double chi_squared(const ModelSpec& model) {
  return chi_squared_divergence(exact_dual_distribution(model), auxiliary_distribution(model));
}

ExactResult exact(const ModelSpec& model, bool with_table) {
  ExactResult r;
  r.ln_Z = exact_log_Z(model);
  r.ln_Z_d = exact_log_Zd(model);
  const auto n = state_count(model.q(), model.topology().num_bonds());
  if (with_table && n && *n <= kMaxTableStates) {
    r.p_d = exact_dual_distribution(model);
    r.chi_squared = chi_squared_divergence(*r.p_d, auxiliary_distribution(model));
  }
  return r;
}

void write_distribution_csv(std::ostream& os, const ModelSpec& model, std::span<const double> p_d) {
  os << "config_index,x_A,probability\n";
  std::vector<Symbol> x(model.topology().num_bonds());
  char buf[64];
  for (std::uint64_t i = 0; i < p_d.size(); ++i) {
    decode_config(i, model.q(), x);
    os << i << ',';
    for (Symbol d : x) os << static_cast<int>(d);
    std::snprintf(buf, sizeof buf, ",%.17g\n", p_d[i]);
    os << buf;
  }
}

}  // namespace dffg

#include <boost/math/distributions/chi_squared.hpp>

namespace dffg {

GoodnessOfFit pearson_gof(std::span<const std::uint64_t> counts, std::span<const double> probs,
                          double min_expected) {
  if (counts.size() != probs.size()) throw std::invalid_argument("pearson_gof: size mismatch");
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  GoodnessOfFit g;
  double pooled_obs = 0.0, pooled_exp = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = n * probs[i];
    const double o = static_cast<double>(counts[i]);
    if (e < min_expected) {
      pooled_obs += o;
      pooled_exp += e;
      continue;
    }
    g.statistic += (o - e) * (o - e) / e;
    ++g.cells;
  }
  if (pooled_exp > 0.0) {
    g.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++g.cells;
  }
  g.dof = g.cells > 0 ? g.cells - 1 : 0;
  return g;
}

double chi_square_quantile(std::size_t dof, double quantile) {
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::quantile(dist, quantile);
}

}  // namespace dffg
