#include "ymflow/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace ymflow {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Rational slope(const BundleType& b) {
  if (b.rank < 1) throw std::invalid_argument("slope: rank must be positive");
  return Rational(b.degree, b.rank);
}

long long FiltrationSpec::rank() const {
  long long r = 0;
  for (auto& [n, k] : blocks) r += n;
  return r;
}

long long FiltrationSpec::degree() const {
  long long d = 0;
  for (auto& [n, k] : blocks) d += k;
  return d;
}

Rational FiltrationSpec::block_slope(size_t j) const {
  return Rational(blocks[j].second, blocks[j].first);
}

std::vector<Rational> char_vector(const FiltrationSpec& f) {
  std::vector<Rational> v;
  for (auto& [n, k] : f.blocks) {
    if (n < 1) throw std::invalid_argument("char_vector: block rank must be positive");
    for (long long i = 0; i < n; ++i) v.emplace_back(k, n);
  }
  return v;
}

HNPolygon polygon(const FiltrationSpec& f) {
  HNPolygon p;
  long long x = 0, y = 0;
  p.vertices.emplace_back(0, 0);
  for (auto& [n, k] : f.blocks) {
    x += n;
    y += k;
    p.vertices.emplace_back(x, y);
  }
  return p;
}

bool is_concave(const FiltrationSpec& f) {
  for (size_t j = 0; j + 1 < f.blocks.size(); ++j)
    if (f.block_slope(j) < f.block_slope(j + 1)) return false;
  return true;
}

namespace {

std::vector<Rational> ell_values(const FiltrationSpec& f) {
  const auto mu = char_vector(f);
  std::vector<Rational> ell(mu.size() + 1, Rational(0));
  for (size_t i = 0; i < mu.size(); ++i) ell[i + 1] = ell[i] + mu[i];
  return ell;
}

}  // namespace

Dominance dominates(const FiltrationSpec& f, const FiltrationSpec& g) {
  if (f.rank() != g.rank() || f.degree() != g.degree())
    throw std::invalid_argument("dominates: total rank/degree mismatch");
  const auto lf = ell_values(f), lg = ell_values(g);
  bool ge = true, le = true;
  for (size_t i = 0; i < lf.size(); ++i) {
    if (lf[i] < lg[i]) ge = false;
    if (lf[i] > lg[i]) le = false;
  }
  if (ge && le) return Dominance::Equal;
  if (ge) return Dominance::GreaterEqual;
  if (le) return Dominance::LessEqual;
  return Dominance::Incomparable;
}

Rational char_norm_sq(const FiltrationSpec& f) {
  Rational s = 0;
  for (auto& [n, k] : f.blocks) s += Rational(k, n) * Rational(k, n) * n;
  return s;
}

FiltrationSpec hn_split(const std::vector<long long>& degrees) {
  if (degrees.empty()) throw std::invalid_argument("hn_split: empty degree list");
  std::vector<long long> d = degrees;
  std::sort(d.begin(), d.end(), std::greater<>());
  FiltrationSpec f;
  size_t i = 0;
  while (i < d.size()) {
    size_t j = i;
    while (j < d.size() && d[j] == d[i]) ++j;
    f.blocks.emplace_back(static_cast<long long>(j - i),
                          static_cast<long long>(j - i) * d[i]);
    i = j;
  }
  return f;
}

namespace {

class SplitOracle final : public SubbundleOracle {
 public:
  explicit SplitOracle(std::vector<long long> degrees) : degrees_(std::move(degrees)) {
    std::sort(degrees_.begin(), degrees_.end(), std::greater<>());
  }

  std::optional<std::vector<BundleType>> admissible(BundleType current) const override {
    if (current.rank != static_cast<long long>(degrees_.size()) ||
        current.degree != sum())
      return std::nullopt;
    std::set<std::pair<long long, long long>> sigs;
    // subset sums by rank
    std::map<long long, std::set<long long>> by_rank;
    by_rank[0].insert(0);
    for (long long d : degrees_) {
      for (auto it = by_rank.rbegin(); it != by_rank.rend(); ++it) {
        for (long long s : it->second) by_rank[it->first + 1].insert(s + d);
      }
    }
    std::vector<BundleType> out;
    for (auto& [r, sums] : by_rank) {
      if (r == 0 || r == current.rank) continue;
      for (long long s : sums) out.push_back({r, s});
    }
    return out;
  }

  std::unique_ptr<SubbundleOracle> quotient_by(BundleType current,
                                               BundleType chosen) const override {
    // remove the lexicographically first subset of the stated signature
    std::vector<long long> rest;
    if (!remove_subset(chosen, rest))
      throw std::invalid_argument("split oracle: signature not realizable");
    return std::make_unique<SplitOracle>(std::move(rest));
  }

 private:
  long long sum() const {
    long long s = 0;
    for (long long d : degrees_) s += d;
    return s;
  }

  bool remove_subset(BundleType chosen, std::vector<long long>& rest) const {
    const size_t m = degrees_.size();
    std::vector<int> pick;
    std::function<bool(size_t, long long, long long)> rec = [&](size_t i, long long r,
                                                                long long s) -> bool {
      if (r == 0) return s == 0;
      if (i >= m || static_cast<long long>(m - i) < r) return false;
      pick.push_back(static_cast<int>(i));
      if (rec(i + 1, r - 1, s - degrees_[i])) return true;
      pick.pop_back();
      return rec(i + 1, r, s);
    };
    if (!rec(0, chosen.rank, chosen.degree)) return false;
    std::set<int> chosen_idx(pick.begin(), pick.end());
    for (size_t i = 0; i < m; ++i)
      if (!chosen_idx.count(static_cast<int>(i))) rest.push_back(degrees_[i]);
    return true;
  }

  std::vector<long long> degrees_;
};

class TableOracle final : public SubbundleOracle {
 public:
  explicit TableOracle(std::vector<std::pair<BundleType, std::vector<BundleType>>> table)
      : table_(std::move(table)) {}

  std::optional<std::vector<BundleType>> admissible(BundleType current) const override {
    for (auto& [b, sigs] : table_)
      if (b == current) return sigs;
    return std::nullopt;
  }

  std::unique_ptr<SubbundleOracle> quotient_by(BundleType, BundleType) const override {
    return std::make_unique<TableOracle>(table_);
  }

 private:
  std::vector<std::pair<BundleType, std::vector<BundleType>>> table_;
};

}  // namespace

std::unique_ptr<SubbundleOracle> split_oracle(std::vector<long long> degrees) {
  return std::make_unique<SplitOracle>(std::move(degrees));
}

std::unique_ptr<SubbundleOracle> table_oracle(
    std::vector<std::pair<BundleType, std::vector<BundleType>>> table) {
  return std::make_unique<TableOracle>(std::move(table));
}

FiltrationSpec hn_from_oracle(BundleType total, const SubbundleOracle& oracle) {
  FiltrationSpec f;
  BundleType cur = total;
  const SubbundleOracle* ora = &oracle;
  std::unique_ptr<SubbundleOracle> owned;
  while (true) {
    if (cur.rank < 1) throw std::invalid_argument("hn_from_oracle: invalid total");
    if (cur.rank == 1) {
      f.blocks.emplace_back(cur.rank, cur.degree);
      break;
    }
    auto sigs = ora->admissible(cur);
    if (!sigs)
      throw std::invalid_argument("hn_from_oracle: oracle has no admissible set for rank " +
                                  std::to_string(cur.rank) + ", degree " +
                                  std::to_string(cur.degree));
    BundleType best = cur;  // the bundle itself is always a semistable candidate
    for (const BundleType& s : *sigs) {
      if (s.rank < 1 || s.rank >= cur.rank)
        throw std::invalid_argument("hn_from_oracle: inadmissible signature");
      const Rational ss = slope(s), bs = slope(best);
      if (ss > bs || (ss == bs && s.rank > best.rank)) best = s;
    }
    if (best == cur || slope(best) <= slope(cur)) {
      f.blocks.emplace_back(cur.rank, cur.degree);
      break;
    }
    f.blocks.emplace_back(best.rank, best.degree);
    const BundleType quotient{cur.rank - best.rank, cur.degree - best.degree};
    owned = ora->quotient_by(cur, best);
    ora = owned.get();
    cur = quotient;
  }
  for (size_t j = 0; j + 1 < f.blocks.size(); ++j)
    if (f.block_slope(j) <= f.block_slope(j + 1))
      throw std::invalid_argument("hn_from_oracle: inconsistent oracle (slopes not strictly decreasing)");
  return f;
}

bool hn_norm_check(const FiltrationSpec& f, const FiltrationSpec& hn) {
  if (!is_concave(f)) throw std::invalid_argument("hn_norm_check: f is not concave");
  if (f.rank() != hn.rank() || f.degree() != hn.degree())
    throw std::invalid_argument("hn_norm_check: total mismatch");
  const Rational nf = char_norm_sq(f), nh = char_norm_sq(hn);
  if (nf < nh) return true;
  if (nf > nh) return false;
  return char_vector(f) == char_vector(hn);
}

double CentralType::imag_coefficient() const { return -2.0 * kPi * to_double(mu); }

double CentralType::norm_sq() const {
  const double c = 2.0 * kPi * to_double(mu);
  return static_cast<double>(n) * c * c;
}

CentralType central_type(const BundleType& b) {
  return CentralType{b.rank, slope(b)};
}

double weight_of_filtration(const FiltrationSpec& f, const std::vector<double>& lambdas,
                            const CentralType& tau) {
  if (lambdas.size() != f.blocks.size())
    throw std::invalid_argument("weight_of_filtration: one lambda per block required");
  for (size_t j = 0; j + 1 < lambdas.size(); ++j)
    if (lambdas[j + 1] <= lambdas[j])
      throw std::invalid_argument("weight_of_filtration: lambdas must be strictly increasing");
  const double mu = to_double(tau.mu);
  double w = 0.0;
  for (size_t j = 0; j < f.blocks.size(); ++j) {
    const auto& [n, k] = f.blocks[j];
    w += 2.0 * kPi * lambdas[j] * (static_cast<double>(k) - static_cast<double>(n) * mu);
  }
  return w;
}

DominantWeightResult dominant_weight(const FiltrationSpec& hn) {
  if (hn.blocks.size() < 2)
    throw std::invalid_argument("dominant_weight: semistable input has no dominant weight");
  for (size_t j = 0; j + 1 < hn.blocks.size(); ++j)
    if (hn.block_slope(j) <= hn.block_slope(j + 1))
      throw std::invalid_argument("dominant_weight: slopes must be strictly decreasing");

  const Rational mu = slope(hn.total());
  Rational d = char_norm_sq(hn) - mu * mu * hn.rank();
  DominantWeightResult out;
  out.norm_sq_exact = d;
  const double denom = std::sqrt(to_double(d));
  out.norm = 2.0 * kPi * denom;
  out.xi_norm = 1.0;
  for (size_t j = 0; j < hn.blocks.size(); ++j)
    out.lambdas.push_back(to_double(mu - hn.block_slope(j)) / denom);
  return out;
}

Rational c1_ad_parabolic(const BundleType& F, const BundleType& E) {
  if (F.rank < 1 || F.rank >= E.rank)
    throw std::invalid_argument("c1_ad_parabolic: need 1 <= rk(F) < rk(E)");
  const BundleType Q{E.rank - F.rank, E.degree - F.degree};
  return Rational(Q.rank) * Rational(F.rank) * (slope(F) - slope(Q));
}

AlgebraicClassification classify_algebraic(
    const BundleType& total, const std::vector<BundleType>& signatures,
    const std::optional<std::vector<BundleType>>& splitting_witness) {
  const Rational mu = slope(total);
  AlgebraicClassification out;
  bool strict = true, weak = true;
  for (const BundleType& s : signatures) {
    if (s.rank < 1 || s.rank >= total.rank)
      throw std::invalid_argument("classify_algebraic: inadmissible signature");
    const Rational sm = slope(s);
    if (sm >= mu) strict = false;
    if (sm > mu) weak = false;
  }
  if (strict)
    out.cls = StabilityClass::Stable;
  else if (weak)
    out.cls = StabilityClass::Semistable;
  else
    out.cls = StabilityClass::Unstable;

  if (out.cls != StabilityClass::Unstable && splitting_witness) {
    bool ok = !splitting_witness->empty();
    long long r = 0, k = 0;
    for (const BundleType& s : *splitting_witness) {
      if (slope(s) != mu) ok = false;
      r += s.rank;
      k += s.degree;
    }
    out.polystable_certified = ok && r == total.rank && k == total.degree;
  }
  if (out.cls == StabilityClass::Stable) out.polystable_certified = true;
  return out;
}

namespace {

void ordered_partitions_rec(std::vector<long long> remaining,
                            FiltrationSpec& acc,
                            std::set<std::vector<std::pair<long long, long long>>>& seen,
                            std::vector<FiltrationSpec>& out) {
  if (remaining.empty()) {
    if (seen.insert(acc.blocks).second) out.push_back(acc);
    return;
  }
  // enumerate nonempty sub-multisets of `remaining` as the next block
  std::vector<long long> distinct;
  std::vector<int> count;
  for (long long d : remaining) {
    if (!distinct.empty() && distinct.back() == d)
      ++count.back();
    else {
      distinct.push_back(d);
      count.push_back(1);
    }
  }
  const int m = static_cast<int>(distinct.size());
  std::vector<int> take(m, 0);
  std::function<void(int)> rec = [&](int i) {
    if (i == m) {
      long long n = 0, k = 0;
      for (int t = 0; t < m; ++t) {
        n += take[t];
        k += static_cast<long long>(take[t]) * distinct[t];
      }
      if (n == 0) return;
      std::vector<long long> rest;
      for (int t = 0; t < m; ++t)
        for (int c = take[t]; c < count[t]; ++c) rest.push_back(distinct[t]);
      acc.blocks.emplace_back(n, k);
      ordered_partitions_rec(std::move(rest), acc, seen, out);
      acc.blocks.pop_back();
      return;
    }
    for (int c = 0; c <= count[i]; ++c) {
      take[i] = c;
      rec(i + 1);
    }
    take[i] = 0;
  };
  rec(0);
}

}  // namespace

std::vector<FiltrationSpec> split_filtrations(const std::vector<long long>& degrees) {
  std::vector<long long> d = degrees;
  std::sort(d.begin(), d.end());
  std::vector<FiltrationSpec> out;
  std::set<std::vector<std::pair<long long, long long>>> seen;
  FiltrationSpec acc;
  ordered_partitions_rec(std::move(d), acc, seen, out);
  return out;
}

std::vector<FiltrationSpec> concave_split_filtrations(const std::vector<long long>& degrees) {
  std::vector<FiltrationSpec> out;
  for (auto& f : split_filtrations(degrees))
    if (is_concave(f)) out.push_back(f);
  return out;
}

std::vector<std::vector<long long>> degree_multisets(int size, long long lo, long long hi) {
  std::vector<std::vector<long long>> out;
  std::vector<long long> cur;
  std::function<void(long long)> rec = [&](long long minval) {
    if (static_cast<int>(cur.size()) == size) {
      out.push_back(cur);
      return;
    }
    for (long long d = minval; d <= hi; ++d) {
      cur.push_back(d);
      rec(d);
      cur.pop_back();
    }
  };
  rec(lo);
  return out;
}

std::vector<double> dominant_weight_grid_oracle(const FiltrationSpec& hn, int coarse,
                                                int rounds) {
  const size_t r = hn.blocks.size();
  if (r < 2 || r > 4)
    throw std::invalid_argument("dominant_weight_grid_oracle: 2 to 4 blocks supported");
  const double mu = to_double(slope(hn.total()));
  std::vector<double> n(r), c(r);
  for (size_t j = 0; j < r; ++j) {
    n[j] = static_cast<double>(hn.blocks[j].first);
    c[j] = static_cast<double>(hn.blocks[j].second) - n[j] * mu;
  }
  // x_j = y_j / sqrt(n_j) with y on the unit sphere; minimize sum x_j c_j.
  const size_t dim = r - 1;  // spherical angles
  auto eval = [&](const std::vector<double>& th, std::vector<double>& x) {
    std::vector<double> y(r);
    double s = 1.0;
    for (size_t j = 0; j < dim; ++j) {
      y[j] = s * std::cos(th[j]);
      s *= std::sin(th[j]);
    }
    y[r - 1] = s;
    double f = 0.0;
    for (size_t j = 0; j < r; ++j) {
      x[j] = y[j] / std::sqrt(n[j]);
      f += x[j] * c[j];
    }
    return f;
  };

  std::vector<double> best_th(dim, 0.0), th(dim), x(r), best_x(r);
  double best = 1e300;
  std::vector<int> idx(dim, 0);
  const double lo = 0.0, hi = 2.0 * kPi;
  std::function<void(size_t)> sweep = [&](size_t d) {
    if (d == dim) {
      const double f = eval(th, x);
      if (f < best) {
        best = f;
        best_th = th;
        best_x = x;
      }
      return;
    }
    for (int i = 0; i < coarse; ++i) {
      th[d] = lo + (hi - lo) * (i + 0.5) / coarse;
      sweep(d + 1);
    }
  };
  sweep(0);

  double step = (hi - lo) / coarse;
  for (int round = 0; round < rounds; ++round) {
    bool improved = false;
    for (size_t d = 0; d < dim; ++d) {
      for (int s = -2; s <= 2; ++s) {
        th = best_th;
        th[d] += s * step * 0.5;
        const double f = eval(th, x);
        if (f < best) {
          best = f;
          best_th = th;
          best_x = x;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
    if (step < 1e-15) break;
  }
  return best_x;
}

}  // namespace ymflow
