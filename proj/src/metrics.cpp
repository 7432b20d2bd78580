#include "rflogit/metrics.hpp"

#include "rflogit/errors.hpp"
#include "rflogit/robust_scale.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace rflogit {

double imse(const std::function<double(double)>& beta, const BSplineBasis& basis, const Vector& coefs,
            Index grid_points) {
  if (grid_points < 101) throw InvalidArgument("IMSE grid needs at least 101 points");
  const Interval dom = basis.domain();
  const Vector t = Vector::LinSpaced(grid_points, dom.lo, dom.hi);
  const Vector fitted = eval_expansion(basis, coefs, t);
  const double h = dom.length() / static_cast<double>(grid_points - 1);
  double acc = 0.0;
  for (Index k = 0; k < grid_points; ++k) {
    const double r = beta(t(k)) - fitted(k);
    acc += (k == 0 || k == grid_points - 1 ? 0.5 : 1.0) * r * r;
  }
  return h * acc;
}

double auc(const Vector& probs, const Vector& y) {
  if (probs.size() != y.size()) throw DimensionError("auc: probabilities and labels differ in length");
  const Index n = probs.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return probs(a) < probs(b); });

  double pos = 0.0;
  double rank_sum = 0.0;
  for (Index k = 0; k < n;) {
    Index end = k;
    while (end + 1 < n && probs(order[end + 1]) == probs(order[k])) ++end;
    const double mid_rank = 0.5 * static_cast<double>(k + end) + 1.0;
    for (Index q = k; q <= end; ++q) {
      const double label = y(order[q]);
      if (label != 0.0 && label != 1.0) throw InvalidArgument("auc: labels must be 0/1");
      if (label == 1.0) {
        pos += 1.0;
        rank_sum += mid_rank;
      }
    }
    k = end + 1;
  }
  const double neg = static_cast<double>(n) - pos;
  if (pos == 0.0 || neg == 0.0) throw SingleClassError("auc needs both classes");
  const double u = rank_sum - pos * (pos + 1.0) / 2.0;
  return u / (pos * neg);
}

Summary aggregate(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("aggregate of an empty sample");
  const Eigen::Map<const Vector> v(values.data(), static_cast<Index>(values.size()));
  Summary s;
  s.median = median(v);
  s.mad = median((v.array() - s.median).abs().matrix());
  return s;
}

}  // namespace rflogit
