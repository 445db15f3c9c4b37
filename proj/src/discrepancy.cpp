#include "qrpinn/discrepancy.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qrpinn/errors.h"
#include "qrpinn/rng.h"

namespace qrpinn {

std::string to_string(DiscrepancyMethod method) {
  switch (method) {
    case DiscrepancyMethod::Exact1D:
      return "exact1d";
    case DiscrepancyMethod::ExactEnumND:
      return "exact_enum";
    case DiscrepancyMethod::LowerBoundMC:
      return "lower_bound_mc";
  }
  return "unknown";
}

DiscrepancyReport star_discrepancy_1d(std::span<const double> points) {
  if (points.empty()) throw InvalidArgument("star_discrepancy_1d: empty point set");
  std::vector<double> x(points.begin(), points.end());
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("star_discrepancy_1d: value outside [0,1]");
  }
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ideal = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * n);
    worst = std::max(worst, std::abs(x[i] - ideal));
  }
  return {x.size(), 1, 1.0 / (2.0 * n) + worst, DiscrepancyMethod::Exact1D};
}

namespace {

// Sorted distinct values of coordinate j, plus 1.
std::vector<double> corner_grid(const PointSet& ps, std::size_t j) {
  std::vector<double> g = ps.column(j);
  g.push_back(1.0);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

double exact_enumeration(const PointSet& ps) {
  const std::size_t n = ps.size();
  const std::size_t d = ps.dim();
  const double inv_n = 1.0 / static_cast<double>(n);
  const std::size_t last = d - 1;

  // Points ordered by their last coordinate so every filtered subset stays sorted.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ps(a, last) < ps(b, last); });

  std::vector<std::vector<double>> grids(d);
  for (std::size_t j = 0; j < d; ++j) grids[j] = corner_grid(ps, j);

  std::vector<std::size_t> cursor(last, 0);
  std::vector<double> open_tail, closed_tail;
  open_tail.reserve(n);
  closed_tail.reserve(n);
  double best = 0.0;
  for (;;) {
    double volume = 1.0;
    for (std::size_t j = 0; j < last; ++j) volume *= grids[j][cursor[j]];

    open_tail.clear();
    closed_tail.clear();
    for (std::size_t idx : order) {
      bool open_in = true, closed_in = true;
      for (std::size_t j = 0; j < last && closed_in; ++j) {
        const double u = grids[j][cursor[j]];
        const double x = ps(idx, j);
        if (!(x < u)) open_in = false;
        if (!(x <= u)) closed_in = false;
      }
      if (open_in) open_tail.push_back(ps(idx, last));
      if (closed_in) closed_tail.push_back(ps(idx, last));
    }

    std::size_t open_count = 0, closed_count = 0;
    for (double u : grids[last]) {
      while (open_count < open_tail.size() && open_tail[open_count] < u) ++open_count;
      while (closed_count < closed_tail.size() && closed_tail[closed_count] <= u) ++closed_count;
      const double vol = volume * u;
      best = std::max(best, vol - static_cast<double>(open_count) * inv_n);
      best = std::max(best, static_cast<double>(closed_count) * inv_n - vol);
    }

    std::size_t j = 0;
    while (j < last && ++cursor[j] == grids[j].size()) cursor[j++] = 0;
    if (j == last) break;
  }
  return best;
}

double corner_deviation(const PointSet& ps, std::span<const double> u) {
  std::size_t open_count = 0, closed_count = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    bool open_in = true, closed_in = true;
    for (std::size_t j = 0; j < ps.dim(); ++j) {
      const double x = ps(i, j);
      if (!(x < u[j])) open_in = false;
      if (!(x <= u[j])) closed_in = false;
    }
    open_count += open_in;
    closed_count += closed_in;
  }
  double volume = 1.0;
  for (double v : u) volume *= v;
  const double inv_n = 1.0 / static_cast<double>(ps.size());
  return std::max(volume - static_cast<double>(open_count) * inv_n, static_cast<double>(closed_count) * inv_n - volume);
}

double random_corner_search(const PointSet& ps, std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> u(ps.dim());
  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const bool snapped = (s % 2) == 1;
    for (std::size_t j = 0; j < ps.dim(); ++j) {
      if (snapped) {
        const std::uint64_t r = rng.below(ps.size() + 1);
        u[j] = r == ps.size() ? 1.0 : ps(r, j);
      } else {
        u[j] = rng.uniform();
      }
    }
    best = std::max(best, corner_deviation(ps, u));
  }
  return best;
}

}  // namespace

DiscrepancyReport star_discrepancy_nd(const PointSet& ps, DiscrepancyMethod method, std::size_t samples,
                                      std::uint64_t seed) {
  if (ps.empty()) throw InvalidArgument("star_discrepancy_nd: empty point set");
  for (double v : ps.coords()) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("star_discrepancy_nd: coordinate outside [0,1]");
  }
  DiscrepancyReport report{ps.size(), ps.dim(), 0.0, method};
  switch (method) {
    case DiscrepancyMethod::Exact1D:
      if (ps.dim() != 1) throw InvalidArgument("star_discrepancy_nd: Exact1D requires dim = 1");
      return star_discrepancy_1d(ps.coords());
    case DiscrepancyMethod::ExactEnumND:
      if (ps.size() > kExactMaxPoints || ps.dim() > kExactMaxDim) {
        throw CapacityExceeded("star_discrepancy_nd: exact enumeration limited to N <= " +
                               std::to_string(kExactMaxPoints) + " and d <= " + std::to_string(kExactMaxDim) +
                               "; use the Monte Carlo lower bound");
      }
      report.value = exact_enumeration(ps);
      return report;
    case DiscrepancyMethod::LowerBoundMC:
      if (samples == 0) throw InvalidArgument("star_discrepancy_nd: samples must be >= 1");
      report.value = random_corner_search(ps, samples, seed);
      return report;
  }
  throw InvalidArgument("star_discrepancy_nd: unknown method");
}

double local_discrepancy(std::span<const double> points, double y) {
  if (points.empty()) throw InvalidArgument("local_discrepancy: empty point set");
  const auto count = std::count_if(points.begin(), points.end(), [y](double x) { return x <= y; });
  return static_cast<double>(count) / static_cast<double>(points.size()) - y;
}

double koksma_bound(double variation, double dstar) {
  if (!(variation >= 0.0) || !(dstar >= 0.0)) throw InvalidArgument("koksma_bound: arguments must be >= 0");
  return variation * dstar;
}

void SubsampleBoundParams::validate() const {
  if (d == 0) throw InvalidArgument("subsample bound: d must be >= 1");
  if (!(k > 0.0 && k <= 1.0)) throw InvalidArgument("subsample bound: k must lie in (0, 1]");
  if (n_total == 0) throw InvalidArgument("subsample bound: n_total must be >= 1");
  if (!(c >= 0.0)) throw InvalidArgument("subsample bound: C must be >= 0");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("subsample bound: eps must lie in (0, 1)");
}

double subsample_discrepancy_bound(const SubsampleBoundParams& p) {
  p.validate();
  const double d = static_cast<double>(p.d);
  const double nt = static_cast<double>(p.n_total);
  return d / (2.0 * p.k * nt) + d * (1.0 - p.k) + p.c * std::pow(nt, -(1.0 - p.eps));
}

DiscrepancyRateFit fit_discrepancy_rate(std::span<const std::size_t> ns, std::span<const double> dstars) {
  if (ns.size() != dstars.size() || ns.size() < 2) {
    throw InvalidArgument("fit_discrepancy_rate: need at least two (N, D*) pairs");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(dstars[i] > 0.0)) throw InvalidArgument("fit_discrepancy_rate: D* must be positive");
    const double x = std::log(static_cast<double>(ns[i]));
    const double y = std::log(dstars[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw InvalidArgument("fit_discrepancy_rate: all N identical");
  DiscrepancyRateFit fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  fit.c = std::exp(fit.intercept);
  fit.eps = 1.0 + fit.slope;
  return fit;
}

}  // namespace qrpinn
