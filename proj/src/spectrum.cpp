#include "nwraman/spectrum.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "nwraman/errors.hpp"

namespace nwraman {

namespace {

void check_shape(const std::vector<double>& w, const std::vector<double>& y) {
  if (w.size() != y.size()) {
    throw ValidationError("spectrum: wavenumber and intensity lengths differ (" +
                          std::to_string(w.size()) + " vs " + std::to_string(y.size()) + ")");
  }
  if (w.size() < kMinSamples) {
    throw InsufficientDataError("spectrum: " + std::to_string(w.size()) +
                                " samples, at least " + std::to_string(kMinSamples) +
                                " required");
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i]) || !std::isfinite(y[i])) {
      throw ValidationError("spectrum: non-finite value at index " + std::to_string(i));
    }
  }
}

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

// Median of y_i - slope * x_i over an index range.
double detrended_median(std::span<const double> x, std::span<const double> y, double slope) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = y[i] - slope * x[i];
  return median_of(std::move(r));
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc{} && ptr == tok.data() + tok.size();
}

}  // namespace

Spectrum::Spectrum(std::vector<double> wavenumbers, std::vector<double> intensities)
    : wavenumbers_(std::move(wavenumbers)), intensities_(std::move(intensities)) {
  check_shape(wavenumbers_, intensities_);
  for (std::size_t i = 1; i < wavenumbers_.size(); ++i) {
    if (!(wavenumbers_[i] > wavenumbers_[i - 1])) {
      throw ValidationError(wavenumbers_[i] == wavenumbers_[i - 1]
                                ? "spectrum: duplicate wavenumber " + std::to_string(wavenumbers_[i])
                                : "spectrum: wavenumbers not strictly increasing at index " +
                                      std::to_string(i));
    }
  }
}

Spectrum Spectrum::from_unsorted(std::vector<double> wavenumbers, std::vector<double> intensities) {
  check_shape(wavenumbers, intensities);
  std::vector<std::size_t> order(wavenumbers.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return wavenumbers[a] < wavenumbers[b]; });
  std::vector<double> w(order.size()), y(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    w[i] = wavenumbers[order[i]];
    y[i] = intensities[order[i]];
  }
  return Spectrum(std::move(w), std::move(y));
}

Spectrum Spectrum::with_intensities(std::vector<double> intensities) const {
  return Spectrum(wavenumbers_, std::move(intensities));
}

Spectrum Spectrum::mirrored() const {
  std::vector<double> w(wavenumbers_.rbegin(), wavenumbers_.rend());
  for (double& v : w) v = -v;
  return Spectrum(std::move(w), std::vector<double>(intensities_.rbegin(), intensities_.rend()));
}

void MeasurementMeta::validate() const {
  if (!(wavelength_nm > 0.0)) throw ValidationError("meta: wavelength_nm must be > 0");
  if (!(source_power_uW > 0.0)) throw ValidationError("meta: source_power_uW must be > 0");
  if (!(filter_od >= 0.0)) throw ValidationError("meta: filter_od must be >= 0");
  if (catalyst_size_nm && !(*catalyst_size_nm > 0.0)) {
    throw ValidationError("meta: catalyst_size_nm must be > 0");
  }
}

double MeasurementMeta::delivered_power_uW() const {
  validate();
  return source_power_uW * std::pow(10.0, -filter_od);
}

Spectrum parse_spectrum(std::istream& in) {
  std::vector<double> w, y;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;

    double vals[2];
    std::size_t n = 0;
    std::size_t pos = 0;
    while (pos < body.size()) {
      const auto start = body.find_first_not_of(" \t,;", pos);
      if (start == std::string_view::npos) break;
      auto stop = body.find_first_of(" \t,;", start);
      if (stop == std::string_view::npos) stop = body.size();
      if (n == 2) throw ParseError("expected two columns, found more", lineno);
      if (!parse_double(body.substr(start, stop - start), vals[n])) {
        throw ParseError("not a number: '" + std::string(body.substr(start, stop - start)) + "'",
                         lineno);
      }
      ++n;
      pos = stop;
    }
    if (n != 2) throw ParseError("expected two columns, found " + std::to_string(n), lineno);
    w.push_back(vals[0]);
    y.push_back(vals[1]);
  }
  return Spectrum::from_unsorted(std::move(w), std::move(y));
}

Spectrum load_spectrum(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spectrum file " + path.string(), 0);
  try {
    return parse_spectrum(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

void write_spectrum(std::ostream& out, const Spectrum& s, std::span<const std::string> header_comments) {
  for (const auto& c : header_comments) out << "# " << c << '\n';
  char buf[64];
  const auto put = [&](double v) {
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    out.write(buf, end - buf);
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    put(s.wavenumbers()[i]);
    out << ' ';
    put(s.intensities()[i]);
    out << '\n';
  }
}

void save_spectrum(const std::filesystem::path& path, const Spectrum& s,
                   std::span<const std::string> header_comments) {
  std::ostringstream buf;
  write_spectrum(buf, s, header_comments);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << buf.str();
}

Spectrum subtract_baseline(const Spectrum& s, double edge_fraction) {
  if (!(edge_fraction > 0.0 && edge_fraction <= 0.4)) {
    throw ValidationError("subtract_baseline: edge_fraction must lie in (0, 0.4]");
  }
  const std::size_t n = s.size();
  const auto m = static_cast<std::size_t>(std::ceil(edge_fraction * static_cast<double>(n)));
  const auto x = s.wavenumbers();
  const auto y = s.intensities();
  const auto xl = x.first(m), yl = y.first(m);
  const auto xr = x.last(m), yr = y.last(m);

  // gap(slope) = median_right(y - slope x) - median_left(y - slope x) is
  // continuous and strictly decreasing because every right-edge abscissa
  // exceeds every left-edge one; its root is the baseline slope.
  const auto gap = [&](double slope) {
    return detrended_median(xr, yr, slope) - detrended_median(xl, yl, slope);
  };
  const double span_x = median_of({xr.begin(), xr.end()}) - median_of({xl.begin(), xl.end()});
  double seed = (median_of({yr.begin(), yr.end()}) - median_of({yl.begin(), yl.end()})) / span_x;
  double step = std::max(1.0, std::abs(seed));
  double lo = seed - step, hi = seed + step;
  while (gap(lo) < 0.0) lo -= (step *= 2.0);
  while (gap(hi) > 0.0) hi += (step *= 2.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g = gap(mid);
    if (g == 0.0) {
      lo = hi = mid;
      break;
    }
    (g > 0.0 ? lo : hi) = mid;
  }
  const double slope = 0.5 * (lo + hi);
  const double intercept = detrended_median(xl, yl, slope);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i] - (intercept + slope * x[i]);
  return s.with_intensities(std::move(out));
}

Spectrum crop_window(const Spectrum& s, double lo, double hi) {
  if (!(lo < hi)) throw ValidationError("crop_window: lo must be below hi");
  std::vector<double> w, y;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = s.wavenumbers()[i];
    if (x >= lo && x <= hi) {
      w.push_back(x);
      y.push_back(s.intensities()[i]);
    }
  }
  if (w.size() < kMinSamples) {
    throw InsufficientDataError("crop_window: [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                "] keeps " + std::to_string(w.size()) + " samples");
  }
  return Spectrum(std::move(w), std::move(y));
}

Spectrum normalize_peak(const Spectrum& s) {
  const auto y = s.intensities();
  const double peak = *std::max_element(y.begin(), y.end());
  if (!(peak > 0.0)) throw ValidationError("normalize_peak: maximum intensity is not positive");
  std::vector<double> out(y.begin(), y.end());
  for (double& v : out) v /= peak;
  return s.with_intensities(std::move(out));
}

double integrated_area(const Spectrum& s) {
  const auto x = s.wavenumbers();
  const auto y = s.intensities();
  double area = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) area += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return area;
}

}  // namespace nwraman
