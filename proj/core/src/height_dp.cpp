#include "leaftree/height_dp.hpp"

#include "leaftree/numeric.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <bit>
#include <cfloat>
#include <map>
#include <string>

namespace leaftree {

namespace {

int ceil_log2(int m) { return m <= 1 ? 0 : std::bit_width(static_cast<unsigned>(m - 1)); }

// log of (beta - 1) * sum_{h < count} beta^h * tails[h].
double log_weighted_tail_sum(std::span<const double> tails, double beta) {
  const double log_beta = std::log(beta);
  LogSumExp acc;
  for (std::size_t h = 0; h < tails.size(); ++h) {
    if (tails[h] > 0.0) acc.add(static_cast<double>(h) * log_beta + std::log(tails[h]));
  }
  const double s = acc.value();
  return s == kNegInf ? kNegInf : s + std::log(beta - 1.0);
}

}  // namespace

bool Moment::overflows() const { return log_value > std::log(DBL_MAX); }

bool HeightTable::complete(int m) const {
  const auto& t = tails_.at(m);
  return static_cast<int>(t.size()) >= m - 1 || (!t.empty() && t.back() == 0.0);
}

double HeightTable::tail(int m, int h) const {
  if (h < 0) return 1.0;
  const auto& t = tails_.at(m);
  if (h < static_cast<int>(t.size())) return t[h];
  if (complete(m)) return 0.0;
  return t.back();
}

int HeightTable::cut(int m) const {
  if (static_cast<int>(tails_.at(m).size()) >= m - 1) return m - 1;
  return static_cast<int>(tails_[m].size()) - 1;
}

double HeightTable::expected_height(int m) const {
  CompensatedSum s;
  for (double g : tails_.at(m)) s += g;
  return s.value();
}

Moment HeightTable::exp_moment(int m, double beta) const {
  if (!(beta > 1.0)) throw std::invalid_argument("exp_moment requires beta > 1");
  return {log_add(0.0, log_weighted_tail_sum(tails_.at(m), beta))};
}

HeightTable build_height_table(const SplitKernel& kernel, int n_max, const DpOptions& options) {
  if (n_max < 1) throw std::invalid_argument("height DP requires n >= 1");
  if (options.tail_tol < 0.0) throw std::invalid_argument("tail_tol must be >= 0");

  HeightTable table;
  table.tails_.resize(static_cast<std::size_t>(n_max) + 1);
  if (n_max == 1) {
    table.layers_ = 1;
    return table;
  }

  std::vector<std::shared_ptr<const SplitRow>> rows(static_cast<std::size_t>(n_max) + 1);
  for (int m = 2; m <= n_max; ++m) rows[m] = kernel.row(m);

  const bool weighted = options.weight_base > 1.0;
  const double log_base = weighted ? std::log(options.weight_base) : 0.0;
  LogSumExp weighted_acc;  // log sum_h base^h G_n(h)

  // prev[m] = P(H_m > h - 1); P(H_m > -1) = 1.
  std::vector<double> prev(static_cast<std::size_t>(n_max) + 1, 1.0);
  std::vector<double> cur(prev.size(), 0.0);
  std::size_t cells = 0;

  for (int h = 0; h <= n_max - 2; ++h) {
    // Only sizes with m - 1 > h have a nonzero tail at h.
    cells += static_cast<std::size_t>(n_max - 1 - h);
    if (cells > options.max_cells) {
      throw BudgetExceeded("height DP for n = " + std::to_string(n_max) + " needs more than " +
                           std::to_string(options.max_cells) + " table cells");
    }
    bool any_positive = false;
    cur[1] = 0.0;
    for (int m = 2; m <= n_max; ++m) {
      double g;
      if (h >= m - 1) {
        g = 0.0;
      } else if (h < ceil_log2(m)) {
        g = 1.0;
      } else {
        const auto& pmf = rows[m]->pmf;
        CompensatedSum s;
        // Terms for k and m - k share a + b (1 - a), which is symmetric in a and b.
        for (int k = 1; 2 * k < m; ++k) {
          const double a = prev[k];
          const double b = prev[m - k];
          s += (pmf[k - 1] + pmf[m - k - 1]) * (a + b * (1.0 - a));
        }
        if (m % 2 == 0) {
          const double a = prev[m / 2];
          s += pmf[m / 2 - 1] * (a + a * (1.0 - a));
        }
        g = std::clamp(s.value(), 0.0, prev[m]);
      }
      cur[m] = g;
      if (g > 0.0) {
        table.tails_[m].push_back(g);
        any_positive = true;
      }
    }
    std::swap(prev, cur);
    table.layers_ = h + 1;

    if (!any_positive) break;
    if (options.tail_tol > 0.0) {
      const double g = prev[n_max];
      if (weighted) {
        if (g > 0.0) weighted_acc.add(h * log_base + std::log(g));
        const double log_moment =
            log_add(0.0, weighted_acc.value() + std::log(options.weight_base - 1.0));
        const double log_rest = g > 0.0 ? (n_max - 1) * log_base + std::log(g) : kNegInf;
        if (log_rest <= std::log(options.tail_tol) + log_moment) break;
      } else if (g <= options.tail_tol) {
        break;
      }
    }
  }
  // Zero tails were not stored; a trailing zero marks a size as complete.
  for (int m = 2; m <= n_max; ++m) {
    auto& t = table.tails_[m];
    if (static_cast<int>(t.size()) < m - 1 && static_cast<int>(t.size()) < table.layers_) {
      t.push_back(0.0);
    }
  }
  return table;
}

HeightCdf height_cdf(const SplitKernel& kernel, int n, double tail_tol, std::size_t max_cells) {
  const HeightTable table = build_height_table(kernel, n, {tail_tol, 1.0, max_cells});
  HeightCdf cdf;
  cdf.n = n;
  cdf.tail_tol = tail_tol;
  const int h_cut = table.cut(n);
  cdf.values.resize(static_cast<std::size_t>(h_cut) + 1);
  for (int h = 0; h <= h_cut; ++h) cdf.values[h] = 1.0 - table.tail(n, h);
  cdf.tail_mass = table.tail(n, h_cut);
  return cdf;
}

HeightEstimate expected_height(const SplitKernel& kernel, int n, double tail_tol,
                               std::size_t max_cells) {
  const HeightTable table = build_height_table(kernel, n, {tail_tol, 1.0, max_cells});
  HeightEstimate e;
  e.value = table.expected_height(n);
  e.h_cut = table.cut(n);
  e.tail_mass = table.tail(n, e.h_cut);
  e.error_bound = e.tail_mass * (n - 1 - e.h_cut);
  return e;
}

Moment exp_moment(const SplitKernel& kernel, int n, double beta, double tail_tol,
                  std::size_t max_cells) {
  if (!(beta > 1.0)) throw std::invalid_argument("exp_moment requires beta > 1");
  const HeightTable table = build_height_table(kernel, n, {tail_tol, beta, max_cells});
  return table.exp_moment(n, beta);
}

std::vector<Rational> brute_height_pmf(const SplitKernel& kernel, int n) {
  if (n < 1 || n > kMaxBruteSize) {
    throw std::out_of_range("brute-force oracle requires 1 <= n <= " +
                            std::to_string(kMaxBruteSize));
  }
  std::map<std::pair<int, int>, Rational> sigma_cache;
  auto sigma = [&](int i, int j) -> const Rational& {
    auto [it, inserted] = sigma_cache.try_emplace({i, j});
    if (inserted) it->second = exact_sigma(kernel, i, j);
    return it->second;
  };
  std::vector<Rational> pmf(static_cast<std::size_t>(n), Rational(0));
  for_each_tree(n, [&](const BinaryTree& t) {
    Rational p = 1;
    const auto sizes = t.sizes();
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if (sizes[i] == 1) continue;
      const int l = static_cast<int>(sizes[i + 1]);
      p *= sigma(l, static_cast<int>(sizes[i]) - l);
    }
    pmf[height(t)] += p;
  });
  return pmf;
}

Rational brute_expected_height(const SplitKernel& kernel, int n) {
  const auto pmf = brute_height_pmf(kernel, n);
  Rational e = 0;
  for (std::size_t h = 0; h < pmf.size(); ++h) e += pmf[h] * static_cast<int>(h);
  return e;
}

LemmaReport check_lemma_recursion(const SplitKernel& kernel, int n_max,
                                  std::span<const double> phi, std::size_t max_cells) {
  using Wide = boost::multiprecision::cpp_bin_float_100;
  if (n_max < 2) throw std::invalid_argument("lemma check requires n_max >= 2");
  if (phi.size() < static_cast<std::size_t>(n_max)) {
    throw std::invalid_argument("phi sequence must cover sizes 1..n_max");
  }
  for (int k = 0; k < n_max; ++k) {
    if (!(phi[k] > 1.0)) throw std::invalid_argument("phi entries must be > 1");
    if (k > 0 && phi[k] > phi[k - 1]) throw std::invalid_argument("phi must be nonincreasing");
  }
  const auto cells = static_cast<std::size_t>(n_max) * static_cast<std::size_t>(n_max + 1) / 2;
  if (cells > max_cells) {
    throw BudgetExceeded("lemma check needs " + std::to_string(cells) + " cells, budget is " +
                         std::to_string(max_cells));
  }

  // F[m][h] = P(H_m <= h) for 0 <= h <= m - 1.
  std::vector<std::vector<Wide>> F(static_cast<std::size_t>(n_max) + 1);
  F[1] = {Wide(1)};
  auto cdf = [&](int m, int h) -> const Wide& {
    return F[m][static_cast<std::size_t>(std::min(h, m - 1))];
  };
  std::vector<std::vector<Wide>> sigma(static_cast<std::size_t>(n_max) + 1);
  for (int m = 2; m <= n_max; ++m) {
    const auto row = kernel.row(m);
    Wide total = 0;
    for (double v : row->pmf) total += v;
    auto& s = sigma[m];
    s.reserve(row->pmf.size());
    for (double v : row->pmf) s.push_back(Wide(v) / total);

    F[m].assign(static_cast<std::size_t>(m), Wide(0));
    for (int h = std::max(1, ceil_log2(m)); h < m - 1; ++h) {
      Wide acc = 0;
      for (int k = 1; k < m; ++k) {
        if (s[k - 1] == 0) continue;
        const Wide& a = cdf(k, h - 1);
        const Wide& b = cdf(m - k, h - 1);
        if (a == 0 || b == 0) continue;
        acc += s[k - 1] * a * b;
      }
      F[m][h] = acc;
    }
    F[m][m - 1] = 1;
  }

  auto moment = [&](int m, double beta) {
    Wide e = 0, prev = 0, power = 1;
    for (int h = 0; h < m; ++h) {
      e += power * (F[m][h] - prev);
      prev = F[m][h];
      power *= beta;
    }
    return e;
  };
  std::vector<Wide> own(static_cast<std::size_t>(n_max) + 1);
  for (int k = 1; k <= n_max; ++k) own[k] = moment(k, phi[k - 1]);

  LemmaReport report;
  for (int n = 2; n <= n_max; ++n) {
    Wide rhs = 0;
    for (int k = 1; k < n; ++k) rhs += sigma[n][k - 1] * (own[k] + own[n - k]);
    rhs *= phi[n - 1];
    LemmaRow r;
    r.n = n;
    r.lhs_log = static_cast<double>(log(own[n]));
    r.rhs_log = static_cast<double>(log(rhs));
    r.slack = static_cast<double>(rhs - own[n]);
    r.ok = r.slack >= -1e-9;
    if (!r.ok) report.pass = false;
    report.rows.push_back(r);
  }
  return report;
}

}  // namespace leaftree
