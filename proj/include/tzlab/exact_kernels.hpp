#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "tzlab/fubini_geometry.hpp"
#include "tzlab/log_real.hpp"
#include "tzlab/torus_weights.hpp"

namespace tzlab {

/// c_alpha = (|alpha| + d)! / (pi^d alpha!), the squared-norm reciprocal of
/// z^alpha when S^{2d+1} carries dsigma / (2 pi), i.e. total volume pi^d / d!
/// after pushing down to P^d. Against the normalized measure the squared norm
/// is d! alpha! / (|alpha| + d)!, so the two differ by the constant pi^d / d!.
LogReal monomial_norm_c(const IntVec& alpha, int d);

/// Isotype basis with precomputed log c_alpha, stored flat for the kernel loops.
struct KernelBasis {
  int d = 0;
  std::size_t n = 0;
  std::vector<std::int32_t> exps;     // n x (d+1), row major
  std::vector<long double> log_c;     // n
  std::vector<std::int64_t> degrees;  // n
  IsotypeBasis source;

  const std::int32_t* alpha(std::size_t j) const { return exps.data() + j * static_cast<std::size_t>(d + 1); }
};

/// Thread-safe memo of kernel bases keyed by (W, varpi).
std::shared_ptr<const KernelBasis> kernel_basis(const WeightedAction& a, const IntVec& varpi);
void clear_kernel_basis_cache();
std::size_t kernel_basis_cache_size();

struct KernelValue {
  LogComplex value;
  IntVec varpi;
};

/// sum_alpha c_alpha p^alpha over the isotype basis.
LogReal isotype_kernel_diag(const WeightedAction& a, const IntVec& varpi, const ProjectivePoint& x);
/// Same sum split by degree |alpha| (degree -> value).
std::vector<std::pair<std::int64_t, LogReal>> isotype_kernel_diag_by_degree(const WeightedAction& a,
                                                                              const IntVec& varpi,
                                                                              const ProjectivePoint& x);
/// sum_alpha c_alpha x^alpha conj(y)^alpha. The phase is gauge dependent.
KernelValue isotype_kernel(const WeightedAction& a, const IntVec& varpi, const ProjectivePoint& x,
                           const ProjectivePoint& y);

/// Relative residual of sum_{|alpha|=n} c_alpha x^alpha conj(y)^alpha =
/// ((n+d)!/(pi^d n!)) <y, x>^n, measured against sum_alpha |term_alpha|.
double level_kernel_residual(int d, int n, const ProjectivePoint& x, const ProjectivePoint& y);

/// Calls f(alpha) for every alpha >= 0 in N^{d+1} with |alpha| = n.
template <class F>
void for_each_composition(int d, std::int64_t n, F&& f) {
  IntVec alpha(d + 1, 0);
  auto rec = [&](auto&& self, int i, std::int64_t rem) -> void {
    if (i == d) {
      alpha[i] = rem;
      f(static_cast<const IntVec&>(alpha));
      return;
    }
    for (std::int64_t t = rem; t >= 0; --t) {
      alpha[i] = t;
      self(self, i + 1, rem - t);
    }
  };
  rec(rec, 0, n);
}

/// Uniform point on S^{2d+1} (normalized complex Gaussian).
CVec sample_sphere(int d, std::mt19937_64& rng);

struct OrthonormalityEstimate {
  cplx estimate;       // mean of z^alpha conj(z)^beta under the normalized measure
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  double expected = 0.0;  // delta_{alpha beta} d! alpha! / (|alpha| + d)!
  std::size_t samples = 0;
};

OrthonormalityEstimate mc_orthonormality_oracle(int d, const IntVec& alpha, const IntVec& beta,
                                                std::size_t samples, std::uint64_t seed);

/// Batch variant: one sample set shared by all pairs (alpha_j, alpha_j).
std::vector<OrthonormalityEstimate> mc_norm_batch(int d, const std::vector<IntVec>& alphas, std::size_t samples,
                                                  std::uint64_t seed, int jobs = 0);

}  // namespace tzlab
