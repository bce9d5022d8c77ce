#include "nwraman/diameter_fit.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "nwraman/errors.hpp"
#include "nwraman/golden_section.hpp"
#include "nwraman/nnls.hpp"

namespace nwraman {

namespace {

std::uint64_t grid_fingerprint(std::span<const double> grid) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : grid) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h ^ grid.size();
}

struct LinearFit {
  double scale;
  double offset;
  double sse;
};

// Closed-form scale >= 0 and offset for y ~ scale * m + offset.
LinearFit solve_scale_offset(std::span<const double> y, std::span<const double> m) {
  const double n = static_cast<double>(y.size());
  double my = 0.0, mm = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    my += y[i];
    mm += m[i];
  }
  my /= n;
  mm /= n;
  double smm = 0.0, smy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    smm += (m[i] - mm) * (m[i] - mm);
    smy += (m[i] - mm) * (y[i] - my);
  }
  const double scale = smm > 0.0 ? std::max(0.0, smy / smm) : 0.0;
  const double offset = my - scale * mm;
  double sse = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - scale * m[i] - offset;
    sse += r * r;
  }
  return {scale, offset, sse};
}

double centered_energy(std::span<const double> y) {
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double e = 0.0;
  for (double v : y) e += (v - mean) * (v - mean);
  return e;
}

// Shared state of one fit: data, kernel, cache, and evaluation bookkeeping.
class Objective {
 public:
  Objective(const Spectrum& measured, const RcfParams& params, const FitOptions& options)
      : y_(measured.intensities()),
        grid_(measured.wavenumbers()),
        kernel_(params),
        cache_(options.cache ? options.cache : std::make_shared<ModelCache>()),
        flat_(1e-12 * std::max(centered_energy(y_), std::numeric_limits<double>::min())) {}

  std::vector<double> mixture(std::span<const WeightedDiameter> support) {
    if (support.size() == 1) return *cache_->profile(kernel_, grid_, support.front().diameter_nm);
    std::vector<double> mix(grid_.size(), 0.0);
    for (const auto& [d, w] : support) {
      const auto p = cache_->profile(kernel_, grid_, d);
      for (std::size_t i = 0; i < mix.size(); ++i) mix[i] += w * (*p)[i];
    }
    const double peak = *std::max_element(mix.begin(), mix.end());
    for (double& v : mix) v /= peak;
    return mix;
  }

  LinearFit evaluate(const DiameterDistribution& dist) {
    ++evals_;
    const auto support = dist.support();
    const auto m = mixture(support);
    return solve_scale_offset(y_, m);
  }

  /// SSE differences below this are treated as ties.
  double flat_tolerance() const noexcept { return flat_; }
  int evaluations() const noexcept { return evals_; }
  const RcfKernel& kernel() const noexcept { return kernel_; }
  std::span<const double> y() const noexcept { return y_; }
  std::span<const double> grid() const noexcept { return grid_; }
  ModelCache& cache() noexcept { return *cache_; }
  std::shared_ptr<ModelCache> shared_cache() const { return cache_; }

 private:
  std::span<const double> y_;
  std::span<const double> grid_;
  RcfKernel kernel_;
  std::shared_ptr<ModelCache> cache_;
  double flat_;
  int evals_ = 0;
};

// Smaller diameter wins when the SSE values are equal within `flat`.
bool better(double sse, double d, double best_sse, double best_d, double flat) {
  if (sse < best_sse - flat) return true;
  if (sse > best_sse + flat) return false;
  return d < best_d;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i + 1 == n ? hi : lo + (hi - lo) * i / (n - 1);
  return v;
}

void warn_if_pinned(FitReport& report, double d, DiameterRange range) {
  const double edge = 10.0 * ModelCache::kResolutionNm;
  char buf[160];
  if (d >= range.max_nm - edge) {
    std::snprintf(buf, sizeof buf,
                  "fit quality: optimum pinned at upper range bound %.4g nm; spectrum may be unconfined",
                  range.max_nm);
    report.warnings.emplace_back(buf);
  } else if (d <= range.min_nm + edge) {
    std::snprintf(buf, sizeof buf, "fit quality: optimum pinned at lower range bound %.4g nm",
                  range.min_nm);
    report.warnings.emplace_back(buf);
  }
}

FitReport empty_report(double placeholder_nm, const RcfParams& params) {
  FitReport r{DiameterDistribution::point(placeholder_nm), 0.0, 0.0, 0.0, 0, params.geometry, {}, {}, 0.0, {}};
  return r;
}

void require_peak_normalizable(const Spectrum& measured) {
  const auto y = measured.intensities();
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) {
    throw NoFitError("measured spectrum is constant; nothing to fit");
  }
}

}  // namespace

void DiameterRange::validate() const {
  if (!(min_nm > 0.0) || !(max_nm > min_nm) || !std::isfinite(max_nm)) {
    throw ValidationError("diameter range must satisfy 0 < d_min < d_max");
  }
}

double ModelCache::quantize(double diameter_nm) {
  return std::round(diameter_nm / kResolutionNm) * kResolutionNm;
}

std::shared_ptr<const std::vector<double>> ModelCache::profile(const RcfKernel& kernel,
                                                              std::span<const double> omega_grid,
                                                              double diameter_nm) {
  const double d = quantize(diameter_nm);
  const Key key{kernel.params().fingerprint(), grid_fingerprint(omega_grid),
                static_cast<std::int64_t>(std::llround(diameter_nm / kResolutionNm))};
  {
    std::lock_guard lock(mu_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  auto computed = std::make_shared<const std::vector<double>>(kernel.normalized_profile(omega_grid, d));
  std::lock_guard lock(mu_);
  auto [it, inserted] = entries_.emplace(key, std::move(computed));
  if (inserted) ++misses_;
  return it->second;
}

std::size_t ModelCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::size_t ModelCache::misses() const {
  std::lock_guard lock(mu_);
  return misses_;
}

FitReport fit_single_diameter(const Spectrum& measured, const RcfParams& params, DiameterRange range,
                              const FitOptions& options) {
  range.validate();
  require_peak_normalizable(measured);
  if (options.coarse_points < 3) throw ValidationError("coarse scan needs at least 3 points");
  Objective obj(measured, params, options);
  const double flat = obj.flat_tolerance();

  FitReport report = empty_report(range.min_nm, params);

  const auto coarse = linspace(range.min_nm, range.max_nm, options.coarse_points);
  double best_d = 0.0;
  LinearFit best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    const double d = ModelCache::quantize(coarse[k]);
    const auto fit = obj.evaluate(DiameterDistribution::point(d));
    report.coarse_scan.push_back({DiameterDistribution::point(d), fit.sse});
    if (k == 0 || better(fit.sse, d, best.sse, best_d, flat)) {
      best = fit;
      best_d = d;
      best_k = k;
    }
  }

  const double lo = coarse[best_k == 0 ? 0 : best_k - 1];
  const double hi = coarse[std::min(best_k + 1, coarse.size() - 1)];
  const auto sse_at = [&](double d) {
    const double q = std::clamp(ModelCache::quantize(d), ModelCache::quantize(range.min_nm),
                                ModelCache::quantize(range.max_nm));
    const auto fit = obj.evaluate(DiameterDistribution::point(q));
    if (better(fit.sse, q, best.sse, best_d, flat)) {
      best = fit;
      best_d = q;
    }
    return fit.sse;
  };
  golden_section_minimize(sse_at, lo, hi, ModelCache::kResolutionNm);
  // The endpoints of the bracket are not probed by golden section.
  sse_at(lo);
  sse_at(hi);

  report.distribution = DiameterDistribution::point(best_d);
  report.scale = best.scale;
  report.offset = best.offset;
  report.sse = best.sse;
  report.n_model_evals = obj.evaluations();
  warn_if_pinned(report, best_d, range);
  if (best.scale == 0.0) report.warnings.emplace_back("fit quality: model scale clamped to zero");
  return report;
}

namespace {

struct IntervalCandidate {
  double lo;
  double hi;
  LinearFit fit;
};

}  // namespace

FitReport fit_interval_distribution(const Spectrum& measured, const RcfParams& params,
                                    DiameterRange range, const FitOptions& options) {
  range.validate();
  require_peak_normalizable(measured);
  const int n_axis = options.interval_coarse_points;
  if (n_axis < 3) throw ValidationError("interval coarse scan needs at least 3 points per axis");
  Objective obj(measured, params, options);
  const double flat = obj.flat_tolerance();
  const double res = ModelCache::kResolutionNm;

  FitReport report = empty_report(range.min_nm, params);

  const auto lattice = linspace(range.min_nm, range.max_nm, n_axis);
  IntervalCandidate best{0.0, 0.0, {0.0, 0.0, std::numeric_limits<double>::infinity()}};
  bool have_best = false;
  const auto consider = [&](double lo, double hi, const LinearFit& fit) {
    const double mid = 0.5 * (lo + hi);
    if (!have_best || better(fit.sse, mid, best.fit.sse, 0.5 * (best.lo + best.hi), flat)) {
      best = {lo, hi, fit};
      have_best = true;
    }
  };

  for (int i = 0; i < n_axis; ++i) {
    for (int j = i + 1; j < n_axis; ++j) {
      const double lo = lattice[static_cast<std::size_t>(i)];
      const double hi = lattice[static_cast<std::size_t>(j)];
      const auto dist = DiameterDistribution::uniform_interval(lo, hi);
      const auto fit = obj.evaluate(dist);
      report.coarse_scan.push_back({dist, fit.sse});
      consider(lo, hi, fit);
    }
  }

  // Nelder–Mead over (center, width); width below the cache resolution is a point.
  const auto sse_at = [&](const std::array<double, 2>& cw) {
    const double w = std::max(0.0, cw[1]);
    const double lo = std::max(range.min_nm, cw[0] - 0.5 * w);
    const double hi = std::min(range.max_nm, cw[0] + 0.5 * w);
    if (hi - lo < res) {
      const double d = std::clamp(ModelCache::quantize(0.5 * (lo + hi)), range.min_nm, range.max_nm);
      const auto fit = obj.evaluate(DiameterDistribution::point(d));
      consider(d, d, fit);
      return fit.sse;
    }
    const auto fit = obj.evaluate(DiameterDistribution::uniform_interval(lo, hi));
    consider(lo, hi, fit);
    return fit.sse;
  };

  const double step = (range.max_nm - range.min_nm) / (n_axis - 1);
  std::array<std::array<double, 2>, 3> simplex{{{0.5 * (best.lo + best.hi), best.hi - best.lo}, {}, {}}};
  simplex[1] = {simplex[0][0] + 0.5 * step, simplex[0][1]};
  simplex[2] = {simplex[0][0], simplex[0][1] + 0.5 * step};
  std::array<double, 3> f{};
  for (int v = 0; v < 3; ++v) f[v] = sse_at(simplex[v]);

  for (int iter = 0; iter < 400; ++iter) {
    std::array<int, 3> ord{0, 1, 2};
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return f[a] < f[b]; });
    const auto& xb = simplex[ord[0]];
    double size = 0.0;
    for (int v : {ord[1], ord[2]}) {
      size = std::max({size, std::abs(simplex[v][0] - xb[0]), std::abs(simplex[v][1] - xb[1])});
    }
    if (size < res) break;

    const int worst = ord[2];
    const std::array<double, 2> centroid{0.5 * (simplex[ord[0]][0] + simplex[ord[1]][0]),
                                         0.5 * (simplex[ord[0]][1] + simplex[ord[1]][1])};
    const auto along = [&](double t) {
      return std::array<double, 2>{centroid[0] + t * (simplex[worst][0] - centroid[0]),
                                   centroid[1] + t * (simplex[worst][1] - centroid[1])};
    };
    const auto xr = along(-1.0);
    const double fr = sse_at(xr);
    if (fr < f[ord[0]]) {
      const auto xe = along(-2.0);
      const double fe = sse_at(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        f[worst] = fe;
      } else {
        simplex[worst] = xr;
        f[worst] = fr;
      }
    } else if (fr < f[ord[1]]) {
      simplex[worst] = xr;
      f[worst] = fr;
    } else {
      const auto xc = fr < f[worst] ? along(-0.5) : along(0.5);
      const double fc = sse_at(xc);
      if (fc < std::min(fr, f[worst])) {
        simplex[worst] = xc;
        f[worst] = fc;
      } else {
        for (int v : {ord[1], ord[2]}) {
          simplex[v] = {0.5 * (simplex[v][0] + xb[0]), 0.5 * (simplex[v][1] + xb[1])};
          f[v] = sse_at(simplex[v]);
        }
      }
    }
  }

  if (best.hi - best.lo < res) {
    FitOptions point_options = options;
    point_options.cache = obj.shared_cache();
    FitReport point = fit_single_diameter(measured, params, range, point_options);
    if (better(best.fit.sse, best.lo, point.sse, point.distribution.point_nm(), flat)) {
      point.distribution = DiameterDistribution::point(best.lo);
      point.scale = best.fit.scale;
      point.offset = best.fit.offset;
      point.sse = best.fit.sse;
    }
    point.n_model_evals += obj.evaluations();
    point.warnings.insert(point.warnings.begin(),
                          "interval optimum has zero width; collapsed to point fit");
    point.coarse_scan.insert(point.coarse_scan.begin(), report.coarse_scan.begin(), report.coarse_scan.end());
    return point;
  }

  report.distribution = DiameterDistribution::uniform_interval(best.lo, best.hi);
  report.scale = best.fit.scale;
  report.offset = best.fit.offset;
  report.sse = best.fit.sse;
  report.n_model_evals = obj.evaluations();
  if (best.hi >= range.max_nm - 10 * res) warn_if_pinned(report, best.hi, range);
  if (best.lo <= range.min_nm + 10 * res) warn_if_pinned(report, best.lo, range);
  return report;
}

FitReport fit_grid_distribution(const Spectrum& measured, const RcfParams& params,
                                std::span<const double> grid_nm, const FitOptions& options) {
  if (grid_nm.size() < 5 || grid_nm.size() > 50) {
    throw ValidationError("grid fit needs between 5 and 50 diameters, got " + std::to_string(grid_nm.size()));
  }
  for (double d : grid_nm) {
    if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("grid diameters must be positive");
  }
  require_peak_normalizable(measured);
  Objective obj(measured, params, options);

  const auto y = obj.y();
  const auto rows = static_cast<Eigen::Index>(y.size());
  const auto cols = static_cast<Eigen::Index>(grid_nm.size());
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const auto p = obj.cache().profile(obj.kernel(), obj.grid(), grid_nm[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = (*p)[static_cast<std::size_t>(i)];
  }
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), rows);

  // The free offset is eliminated exactly by centering rows.
  const Eigen::RowVectorXd col_mean = M.colwise().mean();
  const double y_mean = yv.mean();
  const Eigen::MatrixXd Mc = M.rowwise() - col_mean;
  const Eigen::VectorXd yc = yv.array() - y_mean;

  const NnlsResult nn = solve_nnls(Mc, yc, 1e-12);
  const double total = nn.x.sum();
  if (!(total > 0.0)) throw NoFitError("grid fit: nonnegative solution is identically zero");

  std::vector<double> weights(static_cast<std::size_t>(cols));
  for (Eigen::Index j = 0; j < cols; ++j) weights[static_cast<std::size_t>(j)] = nn.x[j] / total;
  // Push the rounding remainder onto the largest weight so the sum is 1.
  const double drift = 1.0 - std::accumulate(weights.begin(), weights.end(), 0.0);
  *std::max_element(weights.begin(), weights.end()) += drift;

  const double offset = y_mean - col_mean.dot(nn.x);
  const double sse = (yv - M * nn.x - Eigen::VectorXd::Constant(rows, offset)).squaredNorm();

  FitReport report = empty_report(grid_nm.front(), params);
  report.distribution = DiameterDistribution::grid({grid_nm.begin(), grid_nm.end()}, weights);
  report.scale = total;
  report.offset = offset;
  report.sse = sse;
  report.n_model_evals = static_cast<int>(cols);
  report.kkt_residual = nn.kkt_residual;
  report.nnls_residual_history = nn.residual_history;
  if (!nn.converged) report.warnings.emplace_back("grid fit: NNLS stopped before meeting the KKT tolerance");
  return report;
}

}  // namespace nwraman
