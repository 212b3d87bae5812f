#include "tzlab/torus_weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tzlab/errors.hpp"

namespace tzlab {

namespace {

using boost::multiprecision::cpp_int;

std::int64_t dot(const IntVec& a, const IntVec& b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

std::int64_t mod_pos(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

IntVec WeightedAction::integer_cert() const {
  if (!cert) throw UnboundedIsotypeError();
  cpp_int l = 1;
  for (const auto& q : *cert) l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(q));
  IntVec out;
  for (const auto& q : *cert) {
    cpp_int v = boost::multiprecision::numerator(q) * (l / boost::multiprecision::denominator(q));
    out.push_back(v.convert_to<std::int64_t>());
  }
  return out;
}

IntVec WeightedAction::apply(const IntVec& alpha) const {
  IntVec out(g, 0);
  for (int j = 0; j < g; ++j)
    for (int i = 0; i <= d; ++i) out[j] += W(j, i) * alpha[i];
  return out;
}

WeightedAction validate_action(const IntMatrix& W) {
  if (W.empty()) throw InputError("weight matrix is empty");
  WeightedAction a;
  a.g = W.rows();
  a.d = W.cols() - 1;
  a.W = W;
  std::vector<LinearInequality> sys;
  for (int i = 0; i < W.cols(); ++i) {
    LinearInequality ineq;
    for (int j = 0; j < a.g; ++j) ineq.a.emplace_back(W(j, i));
    ineq.b = 1;
    sys.push_back(std::move(ineq));
  }
  a.cert = solve_inequalities(sys, a.g);
  return a;
}

WeightedAction validate_action(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw InputError("weight matrix is empty");
  std::vector<std::vector<std::int64_t>> ints;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) throw InputError("weight matrix rows have different lengths");
    std::vector<std::int64_t> row;
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const double v = rows[r][c];
      if (!std::isfinite(v) || v != std::nearbyint(v) || std::fabs(v) > 1e9)
        throw InputError("weight matrix entry (" + std::to_string(r) + "," + std::to_string(c) + ") is not an integer");
      row.push_back(static_cast<std::int64_t>(v));
    }
    ints.push_back(std::move(row));
  }
  return validate_action(IntMatrix::from_rows(ints));
}

std::pair<std::int64_t, std::int64_t> degree_window(const WeightedAction& a, const IntVec& varpi) {
  const IntVec lam = a.integer_cert();
  if (static_cast<int>(varpi.size()) != a.g) throw InputError("varpi has wrong length");
  std::int64_t lo = 0, hi = 0;
  for (int i = 0; i <= a.d; ++i) {
    const std::int64_t s = dot(lam, a.weight(i));
    if (i == 0 || s < lo) lo = s;
    if (i == 0 || s > hi) hi = s;
  }
  const std::int64_t budget = dot(lam, varpi);
  if (budget < 0) return {1, 0};
  return {ceil_div(budget, hi), floor_div(budget, lo)};
}

namespace {

struct Enumerator {
  const WeightedAction& a;
  IntVec lam;
  std::vector<std::int64_t> lam_w;
  std::vector<IntVec> cols;
  std::vector<MultiIndex>& out;
  IntVec alpha;

  void run(int i, IntVec& rem, std::int64_t budget) {
    if (i == a.d) {
      // Last coordinate is forced.
      const IntVec& w = cols[i];
      std::int64_t t = -1;
      for (int j = 0; j < a.g; ++j) {
        if (w[j] != 0) {
          if (rem[j] % w[j] != 0) return;
          t = rem[j] / w[j];
          break;
        }
      }
      if (t < 0) return;
      for (int j = 0; j < a.g; ++j)
        if (w[j] * t != rem[j]) return;
      alpha[i] = t;
      MultiIndex m{alpha, 0};
      for (auto x : alpha) m.degree += x;
      out.push_back(std::move(m));
      return;
    }
    if (budget == 0) {
      for (auto r : rem)
        if (r != 0) return;
      std::fill(alpha.begin() + i, alpha.end(), 0);
      MultiIndex m{alpha, 0};
      for (auto x : alpha) m.degree += x;
      out.push_back(std::move(m));
      return;
    }
    const std::int64_t top = budget / lam_w[i];
    for (std::int64_t t = top; t >= 0; --t) {
      alpha[i] = t;
      for (int j = 0; j < a.g; ++j) rem[j] -= t * cols[i][j];
      run(i + 1, rem, budget - t * lam_w[i]);
      for (int j = 0; j < a.g; ++j) rem[j] += t * cols[i][j];
    }
  }
};

}  // namespace

IsotypeBasis isotype_basis(const WeightedAction& a, const IntVec& varpi) {
  if (!a.cert) throw UnboundedIsotypeError();
  if (static_cast<int>(varpi.size()) != a.g)
    throw InputError("varpi has length " + std::to_string(varpi.size()) + ", expected " + std::to_string(a.g));
  IsotypeBasis b;
  b.action = a;
  b.varpi = varpi;
  if (std::all_of(varpi.begin(), varpi.end(), [](auto v) { return v == 0; })) {
    b.zero_varpi = true;
    return b;
  }
  auto [lo, hi] = degree_window(a, varpi);
  b.n_min = lo;
  b.n_max = hi;
  if (lo > hi) return b;
  Enumerator e{a, a.integer_cert(), {}, {}, b.entries, IntVec(a.d + 1, 0)};
  for (int i = 0; i <= a.d; ++i) {
    e.cols.push_back(a.weight(i));
    e.lam_w.push_back(dot(e.lam, e.cols.back()));
  }
  IntVec rem = varpi;
  e.run(0, rem, dot(e.lam, varpi));
  std::stable_sort(b.entries.begin(), b.entries.end(),
                   [](const MultiIndex& x, const MultiIndex& y) { return x.degree < y.degree; });
  return b;
}

std::size_t isotype_dimension(const WeightedAction& a, const IntVec& varpi) { return isotype_basis(a, varpi).size(); }

std::vector<std::int64_t> degree_spectrum(const WeightedAction& a, const IntVec& varpi) {
  std::vector<std::int64_t> out;
  for (const auto& m : isotype_basis(a, varpi).entries)
    if (out.empty() || out.back() != m.degree) out.push_back(m.degree);
  return out;
}

std::vector<double> StabilizerGroup::angle(std::size_t element) const {
  std::vector<double> out;
  for (auto n : elements.at(element)) out.push_back(static_cast<double>(n) / static_cast<double>(denominator));
  return out;
}

StabilizerGroup stabilizer(const WeightedAction& a, const std::vector<int>& support, std::int64_t cap) {
  if (support.empty()) throw InputError("stabilizer: empty support");
  StabilizerGroup G;
  G.support = support;
  std::sort(G.support.begin(), G.support.end());
  G.support.erase(std::unique(G.support.begin(), G.support.end()), G.support.end());
  IntMatrix M(static_cast<int>(G.support.size()), a.g);
  for (std::size_t r = 0; r < G.support.size(); ++r) {
    const int i = G.support[r];
    if (i < 0 || i > a.d) throw InputError("stabilizer: support index out of range");
    for (int j = 0; j < a.g; ++j) M(static_cast<int>(r), j) = a.W(j, i);
  }
  const SmithForm snf = smith_normal_form(M);
  if (snf.rank < a.g) {
    G.positive_dimensional = true;
    return G;
  }
  // theta = V phi with phi_j in (1/d_j) Z.
  G.order = 1;
  for (int j = 0; j < a.g; ++j) {
    const std::int64_t dj = snf.diagonal[j];
    if (dj > 1) {
      G.denominator = lcm_i64(G.denominator, dj);
      G.order *= dj;
      if (G.order > (std::int64_t{1} << 40)) throw PreconditionError("stabilizer: order overflow");
    }
  }
  for (int j = 0; j < a.g; ++j) {
    const std::int64_t dj = snf.diagonal[j];
    if (dj <= 1) continue;
    IntVec gen(a.g);
    for (int r = 0; r < a.g; ++r) gen[r] = mod_pos(snf.V(r, j) * (G.denominator / dj), G.denominator);
    G.generators.push_back(std::move(gen));
    G.generator_orders.push_back(dj);
  }
  if (G.order > cap) return G;
  G.elements.push_back(IntVec(a.g, 0));
  for (std::size_t j = 0; j < G.generators.size(); ++j) {
    std::vector<IntVec> next;
    next.reserve(G.elements.size() * G.generator_orders[j]);
    for (const auto& e : G.elements) {
      IntVec cur = e;
      for (std::int64_t c = 0; c < G.generator_orders[j]; ++c) {
        next.push_back(cur);
        for (int r = 0; r < a.g; ++r) cur[r] = mod_pos(cur[r] + G.generators[j][r], G.denominator);
      }
    }
    G.elements = std::move(next);
  }
  std::sort(G.elements.begin(), G.elements.end());
  G.enumerated = true;
  return G;
}

CharacterSum character_sum(const StabilizerGroup& G, const IntVec& varpi, std::int64_t k) {
  if (G.positive_dimensional) throw PreconditionError("character_sum: positive-dimensional stabilizer");
  if (!G.enumerated) throw PreconditionError("character_sum: stabilizer not enumerated (order above cap)");
  CharacterSum out;
  const __int128 N = G.denominator;
  const __int128 kk = static_cast<__int128>(k) % N;
  std::complex<double> sum{0.0, 0.0};
  bool trivial = true;
  for (std::size_t e = 0; e < G.elements.size(); ++e) {
    __int128 r = 0;
    for (std::size_t j = 0; j < varpi.size(); ++j) r = (r + static_cast<__int128>(varpi[j] % G.denominator) * G.elements[e][j]) % N;
    r = (r * kk) % N;
    if (r < 0) r += N;
    if (r != 0) trivial = false;
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(N);
    sum += std::polar(1.0, ang);
  }
  out.value = sum;
  out.exact = trivial ? G.order : 0;
  return out;
}

std::int64_t generic_stabilizer_order(const WeightedAction& a) {
  std::vector<int> all(a.d + 1);
  for (int i = 0; i <= a.d; ++i) all[i] = i;
  StabilizerGroup G = stabilizer(a, all);
  if (G.positive_dimensional) throw PreconditionError("generic stabilizer is positive dimensional");
  return G.order;
}

}  // namespace tzlab
