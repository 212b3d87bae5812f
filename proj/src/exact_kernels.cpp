#include "tzlab/exact_kernels.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "tzlab/errors.hpp"
#include "tzlab/parallel.hpp"

namespace tzlab {

LogReal monomial_norm_c(const IntVec& alpha, int d) {
  std::int64_t n = 0;
  long double l = 0.0L;
  for (auto x : alpha) {
    if (x < 0) throw InputError("multi-index has a negative entry");
    n += x;
    l -= log_factorial(x);
  }
  l += log_factorial(n + d) - d * kLogPi;
  return LogReal::from_log(l);
}

namespace {

struct CacheKey {
  int g, d;
  std::vector<std::int64_t> w;
  IntVec varpi;
  auto operator<=>(const CacheKey&) const = default;
};

std::shared_mutex g_cache_mu;
std::map<CacheKey, std::shared_ptr<const KernelBasis>> g_cache;

std::shared_ptr<const KernelBasis> build_basis(const WeightedAction& a, const IntVec& varpi) {
  auto kb = std::make_shared<KernelBasis>();
  kb->source = isotype_basis(a, varpi);
  kb->d = a.d;
  kb->n = kb->source.entries.size();
  kb->exps.reserve(kb->n * (a.d + 1));
  for (const auto& m : kb->source.entries) {
    for (auto x : m.alpha) {
      if (x > INT32_MAX) throw PreconditionError("exponent too large");
      kb->exps.push_back(static_cast<std::int32_t>(x));
    }
    kb->log_c.push_back(monomial_norm_c(m.alpha, a.d).log_abs());
    kb->degrees.push_back(m.degree);
  }
  return kb;
}

}  // namespace

std::shared_ptr<const KernelBasis> kernel_basis(const WeightedAction& a, const IntVec& varpi) {
  CacheKey key{a.g, a.d, {}, varpi};
  for (int j = 0; j < a.g; ++j)
    for (int i = 0; i <= a.d; ++i) key.w.push_back(a.W(j, i));
  {
    std::shared_lock lk(g_cache_mu);
    auto it = g_cache.find(key);
    if (it != g_cache.end()) return it->second;
  }
  auto kb = build_basis(a, varpi);
  std::unique_lock lk(g_cache_mu);
  auto [it, inserted] = g_cache.emplace(std::move(key), kb);
  return it->second;
}

void clear_kernel_basis_cache() {
  std::unique_lock lk(g_cache_mu);
  g_cache.clear();
}

std::size_t kernel_basis_cache_size() {
  std::shared_lock lk(g_cache_mu);
  return g_cache.size();
}

namespace {

constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();

// log p_i in extended precision, normalized so that sum p_i = 1.
std::vector<long double> log_probabilities(const ProjectivePoint& x) {
  long double s = 0.0L;
  for (const auto& c : x.z) s += static_cast<long double>(c.real()) * c.real() + static_cast<long double>(c.imag()) * c.imag();
  const long double ls = std::log(s);
  std::vector<long double> out;
  for (const auto& c : x.z) {
    const long double q = static_cast<long double>(c.real()) * c.real() + static_cast<long double>(c.imag()) * c.imag();
    out.push_back(q == 0.0L ? kNegInf : std::log(q) - ls);
  }
  return out;
}

long double term_log(const KernelBasis& kb, std::size_t j, const std::vector<long double>& lp) {
  const std::int32_t* al = kb.alpha(j);
  long double l = kb.log_c[j];
  for (int i = 0; i <= kb.d; ++i) {
    if (al[i] == 0) continue;
    if (lp[i] == kNegInf) return kNegInf;
    l += al[i] * lp[i];
  }
  return l;
}

}  // namespace

LogReal isotype_kernel_diag(const WeightedAction& a, const IntVec& varpi, const ProjectivePoint& x) {
  if (x.dim() != a.d) throw InputError("point dimension does not match the action");
  const auto kb = kernel_basis(a, varpi);
  const auto lp = log_probabilities(x);
  LogSumExp acc;
  for (std::size_t j = 0; j < kb->n; ++j) acc.add_log(term_log(*kb, j, lp));
  return acc.result();
}

std::vector<std::pair<std::int64_t, LogReal>> isotype_kernel_diag_by_degree(const WeightedAction& a,
                                                                              const IntVec& varpi,
                                                                              const ProjectivePoint& x) {
  if (x.dim() != a.d) throw InputError("point dimension does not match the action");
  const auto kb = kernel_basis(a, varpi);
  const auto lp = log_probabilities(x);
  std::vector<std::pair<std::int64_t, LogReal>> out;
  LogSumExp acc;
  for (std::size_t j = 0; j < kb->n; ++j) {
    if (j > 0 && kb->degrees[j] != kb->degrees[j - 1]) {
      out.emplace_back(kb->degrees[j - 1], acc.result());
      acc = LogSumExp{};
    }
    acc.add_log(term_log(*kb, j, lp));
  }
  if (kb->n > 0) out.emplace_back(kb->degrees.back(), acc.result());
  return out;
}

namespace {

// Sum of complex terms given as (log modulus, phase angle).
LogComplex sum_polar(const std::vector<std::pair<long double, long double>>& terms) {
  long double mx = kNegInf;
  for (const auto& t : terms) mx = std::max(mx, t.first);
  if (mx == kNegInf) return LogComplex::zero();
  long double re = 0.0L, im = 0.0L;
  for (const auto& t : terms) {
    if (t.first == kNegInf) continue;
    const long double s = std::exp(t.first - mx);
    re += s * std::cos(t.second);
    im += s * std::sin(t.second);
  }
  const long double mod = std::hypot(re, im);
  if (mod == 0.0L) return LogComplex::zero();
  return LogComplex::from_log_polar(mx + std::log(mod),
                                    std::complex<double>(static_cast<double>(re / mod), static_cast<double>(im / mod)));
}

}  // namespace

KernelValue isotype_kernel(const WeightedAction& a, const IntVec& varpi, const ProjectivePoint& x,
                           const ProjectivePoint& y) {
  if (x.dim() != a.d || y.dim() != a.d) throw InputError("point dimension does not match the action");
  const auto kb = kernel_basis(a, varpi);
  const auto lpx = log_probabilities(x);
  const auto lpy = log_probabilities(y);
  std::vector<long double> lq(a.d + 1), ph(a.d + 1);
  for (int i = 0; i <= a.d; ++i) {
    lq[i] = 0.5L * (lpx[i] + lpy[i]);
    ph[i] = static_cast<long double>(std::arg(x.z[i])) - static_cast<long double>(std::arg(y.z[i]));
  }
  std::vector<std::pair<long double, long double>> terms;
  terms.reserve(kb->n);
  for (std::size_t j = 0; j < kb->n; ++j) {
    const std::int32_t* al = kb->alpha(j);
    long double angle = 0.0L;
    for (int i = 0; i <= a.d; ++i) angle += al[i] * ph[i];
    terms.emplace_back(term_log(*kb, j, lq), std::remainder(angle, 2.0L * kPi));
  }
  return {sum_polar(terms), varpi};
}

double level_kernel_residual(int d, int n, const ProjectivePoint& x, const ProjectivePoint& y) {
  if (x.dim() != d || y.dim() != d) throw InputError("point dimension does not match d");
  std::complex<long double> lhs{0.0L, 0.0L};
  long double abs_sum = 0.0L;
  const long double lead = log_factorial(n + d) - d * kLogPi;
  for_each_composition(d, n, [&](const IntVec& alpha) {
    std::complex<long double> t{1.0L, 0.0L};
    long double l = lead;
    for (int i = 0; i <= d; ++i) {
      l -= log_factorial(alpha[i]);
      const std::complex<long double> u(x.z[i].real(), x.z[i].imag());
      const std::complex<long double> v(y.z[i].real(), -y.z[i].imag());
      for (std::int64_t e = 0; e < alpha[i]; ++e) t *= u * v;
    }
    t *= std::exp(l);
    lhs += t;
    abs_sum += std::abs(t);
  });
  std::complex<long double> inner{0.0L, 0.0L};
  for (int i = 0; i <= d; ++i)
    inner += std::complex<long double>(x.z[i].real(), x.z[i].imag()) *
             std::complex<long double>(y.z[i].real(), -y.z[i].imag());
  std::complex<long double> rhs = std::exp(lead - log_factorial(n));
  for (int e = 0; e < n; ++e) rhs *= inner;
  const long double scale = std::max({abs_sum, std::abs(lhs), std::abs(rhs)});
  if (scale == 0.0L) return 0.0;
  return static_cast<double>(std::abs(lhs - rhs) / scale);
}

CVec sample_sphere(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CVec z(d + 1);
  double s = 0.0;
  do {
    s = 0.0;
    for (auto& c : z) {
      c = cplx(nd(rng), nd(rng));
      s += std::norm(c);
    }
  } while (s == 0.0);
  const double inv = 1.0 / std::sqrt(s);
  for (auto& c : z) c *= inv;
  return z;
}

namespace {

long double closed_form_norm(int d, const IntVec& alpha) {
  std::int64_t n = 0;
  long double l = log_factorial(d);
  for (auto x : alpha) {
    n += x;
    l += log_factorial(x);
  }
  return std::exp(l - log_factorial(n + d));
}

struct Moments {
  long double sre = 0, sre2 = 0, sim = 0, sim2 = 0;
};

}  // namespace

OrthonormalityEstimate mc_orthonormality_oracle(int d, const IntVec& alpha, const IntVec& beta, std::size_t samples,
                                                std::uint64_t seed) {
  if (samples < 1000) throw InputError("mc_orthonormality_oracle: need at least 1000 samples");
  if (static_cast<int>(alpha.size()) != d + 1 || static_cast<int>(beta.size()) != d + 1)
    throw InputError("multi-index length does not match d");
  const std::size_t chunks = (samples + kMcChunk - 1) / kMcChunk;
  std::vector<Moments> part(chunks);
  parallel_for(chunks, 0, [&](std::size_t c) {
    auto rng = chunk_rng(seed, c);
    const std::size_t lo = c * kMcChunk, hi = std::min(samples, lo + kMcChunk);
    Moments m;
    for (std::size_t s = lo; s < hi; ++s) {
      const CVec z = sample_sphere(d, rng);
      cplx t{1.0, 0.0};
      for (int i = 0; i <= d; ++i) {
        for (std::int64_t e = 0; e < alpha[i]; ++e) t *= z[i];
        for (std::int64_t e = 0; e < beta[i]; ++e) t *= std::conj(z[i]);
      }
      m.sre += t.real();
      m.sre2 += static_cast<long double>(t.real()) * t.real();
      m.sim += t.imag();
      m.sim2 += static_cast<long double>(t.imag()) * t.imag();
    }
    part[c] = m;
  });
  Moments tot;
  for (const auto& m : part) {
    tot.sre += m.sre;
    tot.sre2 += m.sre2;
    tot.sim += m.sim;
    tot.sim2 += m.sim2;
  }
  const long double n = static_cast<long double>(samples);
  OrthonormalityEstimate out;
  out.samples = samples;
  const long double mre = tot.sre / n, mim = tot.sim / n;
  out.estimate = cplx(static_cast<double>(mre), static_cast<double>(mim));
  out.stderr_re = static_cast<double>(std::sqrt(std::max(0.0L, tot.sre2 / n - mre * mre) / (n - 1)));
  out.stderr_im = static_cast<double>(std::sqrt(std::max(0.0L, tot.sim2 / n - mim * mim) / (n - 1)));
  out.expected = alpha == beta ? static_cast<double>(closed_form_norm(d, alpha)) : 0.0;
  return out;
}

std::vector<OrthonormalityEstimate> mc_norm_batch(int d, const std::vector<IntVec>& alphas, std::size_t samples,
                                                  std::uint64_t seed, int jobs) {
  if (samples < 1000) throw InputError("mc_norm_batch: need at least 1000 samples");
  const std::size_t chunks = (samples + kMcChunk - 1) / kMcChunk;
  const std::size_t na = alphas.size();
  std::int64_t maxe = 0;
  for (const auto& a : alphas) {
    if (static_cast<int>(a.size()) != d + 1) throw InputError("multi-index length does not match d");
    for (auto x : a) maxe = std::max(maxe, x);
  }
  // Per chunk: sum and sum of squares of p^alpha for every alpha.
  std::vector<std::vector<long double>> s1(chunks, std::vector<long double>(na)), s2 = s1;
  parallel_for(chunks, jobs, [&](std::size_t c) {
    auto rng = chunk_rng(seed, c);
    const std::size_t lo = c * kMcChunk, hi = std::min(samples, lo + kMcChunk);
    std::vector<double> pw((d + 1) * (maxe + 1));
    for (std::size_t s = lo; s < hi; ++s) {
      const CVec z = sample_sphere(d, rng);
      for (int i = 0; i <= d; ++i) {
        const double p = std::norm(z[i]);
        pw[i * (maxe + 1)] = 1.0;
        for (std::int64_t e = 1; e <= maxe; ++e) pw[i * (maxe + 1) + e] = pw[i * (maxe + 1) + e - 1] * p;
      }
      for (std::size_t j = 0; j < na; ++j) {
        double t = 1.0;
        for (int i = 0; i <= d; ++i) t *= pw[i * (maxe + 1) + alphas[j][i]];
        s1[c][j] += t;
        s2[c][j] += static_cast<long double>(t) * t;
      }
    }
  });
  std::vector<OrthonormalityEstimate> out(na);
  const long double n = static_cast<long double>(samples);
  for (std::size_t j = 0; j < na; ++j) {
    long double a = 0, b = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
      a += s1[c][j];
      b += s2[c][j];
    }
    const long double m = a / n;
    out[j].estimate = cplx(static_cast<double>(m), 0.0);
    out[j].stderr_re = static_cast<double>(std::sqrt(std::max(0.0L, b / n - m * m) / (n - 1)));
    out[j].expected = static_cast<double>(closed_form_norm(d, alphas[j]));
    out[j].samples = samples;
  }
  return out;
}

}  // namespace tzlab
