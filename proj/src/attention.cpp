#include "wayfind/attention.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <numbers>

namespace wayfind {

double frustum_horizontal_factor(double eccentricity_deg, const FrustumParams& params) {
  const double z = (eccentricity_deg - params.gaussian_mu) / params.gaussian_sigma;
  return std::exp(-0.5 * z * z);
}

namespace {

double beta_log_density(double y, double alpha, double beta) {
  return (alpha - 1.0) * std::log(y) + (beta - 1.0) * std::log1p(-y);
}

}  // namespace

double frustum_vertical_factor(double y, const FrustumParams& params) {
  const double a = params.beta_alpha, b = params.beta_beta;
  if (a < 1.0 || b < 1.0) return std::exp(beta_log_density(y, a, b));
  if (a == 1.0 && b == 1.0) return 1.0;
  const double mode = (a - 1.0) / (a + b - 2.0);
  // Mode at a boundary: the density limit there is finite and equals the peak.
  auto log_at = [&](double t) {
    double v = 0.0;
    if (a != 1.0) v += (a - 1.0) * std::log(t);
    if (b != 1.0) v += (b - 1.0) * std::log1p(-t);
    return v;
  };
  return std::exp(log_at(y) - log_at(mode));
}

double column_eccentricity_deg(int column, const CameraConfig& config) {
  const double u = (column + 0.5) - 0.5 * config.raster_width;
  return std::atan(u / config.focal_px()) * 180.0 / std::numbers::pi;
}

AttentionMap frustum_map(int width, int height, const CameraConfig& config, const FrustumParams& params) {
  Eigen::ArrayXd horizontal(width);
  for (int x = 0; x < width; ++x) {
    horizontal(x) = frustum_horizontal_factor(column_eccentricity_deg(x, config), params);
  }
  Eigen::ArrayXd vertical(height);
  for (int y = 0; y < height; ++y) {
    const double from_top = (y + 0.5) / height;
    const double yn = params.vertical_origin == FrustumParams::VerticalOrigin::top ? from_top : 1.0 - from_top;
    vertical(y) = frustum_vertical_factor(yn, params);
  }
  if (params.beta_alpha < 1.0 || params.beta_beta < 1.0) vertical /= vertical.maxCoeff();
  return (vertical.matrix() * horizontal.matrix().transpose()).array();
}

namespace saliency {

Plane channel_plane(const ViewRaster& raster, Channel channel) {
  const auto& r = raster.red;
  const auto& g = raster.green;
  const auto& b = raster.blue;
  switch (channel) {
    case Channel::luminance: return {0.299 * r + 0.587 * g + 0.114 * b, 0.0, 1.0};
    case Channel::red_green: return {r - g, -1.0, 1.0};
    case Channel::blue_yellow: return {b - 0.5 * (r + g), -1.0, 1.0};
  }
  return {r, 0.0, 1.0};
}

int bin_of(double value, double lo, double hi, int bins) {
  const double f = (value - lo) / (hi - lo) * bins;
  if (!(f >= 0.0)) return 0;
  return f >= bins ? bins - 1 : static_cast<int>(f);
}

Raster<double> pyramid_down(const Raster<double>& level) {
  static constexpr double kTaps[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  const int h = static_cast<int>(level.rows());
  const int w = static_cast<int>(level.cols());
  const int oh = (h + 1) / 2;
  const int ow = (w + 1) / 2;
  // Horizontal blur evaluated only at the even columns that survive subsampling.
  Raster<double> horiz(h, ow);
  for (int y = 0; y < h; ++y) {
    const double* row = level.data() + static_cast<std::ptrdiff_t>(y) * w;
    for (int x = 0; x < ow; ++x) {
      const int c = 2 * x;
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) acc += kTaps[k + 2] * row[std::clamp(c + k, 0, w - 1)];
      horiz(y, x) = acc;
    }
  }
  Raster<double> out(oh, ow);
  for (int y = 0; y < oh; ++y) {
    const int r = 2 * y;
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) acc += kTaps[k + 2] * horiz(std::clamp(r + k, 0, h - 1), x);
      out(y, x) = acc;
    }
  }
  return out;
}

Raster<double> rarity_map(const Raster<double>& values, double lo, double hi, int bins) {
  std::vector<long> histogram(static_cast<std::size_t>(bins), 0);
  Raster<int> index(values.rows(), values.cols());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    index(i) = bin_of(values(i), lo, hi, bins);
    ++histogram[static_cast<std::size_t>(index(i))];
  }
  const double n = static_cast<double>(values.size());
  std::vector<double> info(histogram.size(), 0.0);
  for (std::size_t b = 0; b < histogram.size(); ++b) {
    if (histogram[b] > 0) info[b] = -std::log(static_cast<double>(histogram[b]) / n);
  }
  Raster<double> out(values.rows(), values.cols());
  for (Eigen::Index i = 0; i < values.size(); ++i) out(i) = info[static_cast<std::size_t>(index(i))];
  return out;
}

Raster<double> normalize_rarity(const Raster<double>& rarity) {
  const double hi = rarity.maxCoeff();
  const double lo = rarity.minCoeff();
  if (hi == lo) return Raster<double>::Constant(rarity.rows(), rarity.cols(), kFloor);
  return rarity / hi;
}

namespace {

// Adds (or writes) the pixel-center aligned bilinear resampling of `src` into `dst`.
void resample_into(const Raster<double>& src, Raster<double>& dst, bool accumulate) {
  const int sh = static_cast<int>(src.rows());
  const int sw = static_cast<int>(src.cols());
  const int height = static_cast<int>(dst.rows());
  const int width = static_cast<int>(dst.cols());
  struct Tap {
    int i0, i1;
    double t;
  };
  auto taps = [](int n_out, int n_src) {
    std::vector<Tap> out(static_cast<std::size_t>(n_out));
    const double scale = static_cast<double>(n_src) / n_out;
    for (int i = 0; i < n_out; ++i) {
      const double f = std::clamp((i + 0.5) * scale - 0.5, 0.0, n_src - 1.0);
      const int i0 = static_cast<int>(f);
      out[static_cast<std::size_t>(i)] = {i0, std::min(i0 + 1, n_src - 1), f - i0};
    }
    return out;
  };
  const auto xs = taps(width, sw);
  const auto ys = taps(height, sh);
  for (int y = 0; y < height; ++y) {
    const Tap& ty = ys[static_cast<std::size_t>(y)];
    const double* r0 = src.data() + static_cast<std::ptrdiff_t>(ty.i0) * sw;
    const double* r1 = src.data() + static_cast<std::ptrdiff_t>(ty.i1) * sw;
    double* out = dst.data() + static_cast<std::ptrdiff_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      const Tap& tx = xs[static_cast<std::size_t>(x)];
      const double top = (1.0 - tx.t) * r0[tx.i0] + tx.t * r0[tx.i1];
      const double bottom = (1.0 - tx.t) * r1[tx.i0] + tx.t * r1[tx.i1];
      const double v = (1.0 - ty.t) * top + ty.t * bottom;
      out[x] = accumulate ? out[x] + v : v;
    }
  }
}

// Normalized rarity of one pyramid level, i.e. normalize_rarity(rarity_map(values)).
Raster<double> normalized_rarity(const Raster<double>& values, double lo, double hi) {
  std::array<long, kBins> histogram{};
  Raster<int> index(values.rows(), values.cols());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    index(i) = bin_of(values(i), lo, hi, kBins);
    ++histogram[static_cast<std::size_t>(index(i))];
  }
  const double n = static_cast<double>(values.size());
  std::array<double, kBins> info{};
  double top = -1.0, bottom = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < histogram.size(); ++b) {
    if (histogram[b] == 0) continue;
    info[b] = -std::log(static_cast<double>(histogram[b]) / n);
    top = std::max(top, info[b]);
    bottom = std::min(bottom, info[b]);
  }
  for (auto& v : info) v = top == bottom ? kFloor : v / top;
  Raster<double> out(values.rows(), values.cols());
  for (Eigen::Index i = 0; i < values.size(); ++i) out(i) = info[static_cast<std::size_t>(index(i))];
  return out;
}

}  // namespace

Raster<double> upsample_bilinear(const Raster<double>& src, int width, int height) {
  if (src.rows() == height && src.cols() == width) return src;
  Raster<double> out(height, width);
  resample_into(src, out, false);
  return out;
}

}  // namespace saliency

AttentionMap saliency_map(const ViewRaster& raster) {
  using namespace saliency;
  const int width = raster.width();
  const int height = raster.height();
  AttentionMap sum = AttentionMap::Zero(height, width);
  int maps = 0;
  for (Channel c : {Channel::luminance, Channel::red_green, Channel::blue_yellow}) {
    Plane plane = channel_plane(raster, c);
    Raster<double> level = std::move(plane.values);
    for (int l = 0; l < kLevels; ++l) {
      if (l > 0) level = pyramid_down(level);
      const Raster<double> rarity = normalized_rarity(level, plane.lo, plane.hi);
      if (l == 0) {
        sum += rarity;
      } else {
        resample_into(rarity, sum, true);
      }
      ++maps;
    }
  }
  AttentionMap mean = sum / maps;
  const double hi = mean.maxCoeff();
  if (hi - mean.minCoeff() <= 0.0 || hi <= 0.0) return mean;
  return mean / hi;
}

AttentionMap semantic_map(const SignMask& mask, const Environment& env) {
  AttentionMap out(mask.height(), mask.width());
  const auto& model = env.semantic_model;
  SignId cached_id = 0;
  double cached_value = model.background_relevance;
  for (Eigen::Index i = 0; i < mask.ids.size(); ++i) {
    const SignId id = mask.ids(i);
    if (id == 0) {
      out(i) = model.background_relevance;
      continue;
    }
    if (id != cached_id) {
      cached_id = id;
      cached_value = model.of(env.sign(id).object_class);
    }
    out(i) = cached_value;
  }
  return out;
}

AttentionMap fuse_attention_raw(const AttentionMap& sal, const AttentionMap& sem, const AttentionMap& fru,
                                const FusionWeights& w) {
  if (sal.rows() != sem.rows() || sal.cols() != sem.cols() || sal.rows() != fru.rows() ||
      sal.cols() != fru.cols()) {
    throw std::invalid_argument("fuse_attention: channel maps differ in size");
  }
  if (!(w.total() > 0.0) || w.saliency < 0.0 || w.semantic < 0.0 || w.frustum < 0.0) {
    throw std::invalid_argument("fuse_attention: weights must be nonnegative with a positive sum");
  }
  AttentionMap out(sal.rows(), sal.cols());
  if (w.saliency == w.semantic && w.semantic == w.frustum) {
    // Equal weights: the plain cube root of the product.
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = std::cbrt(sal(i) * sem(i) * fru(i));
    return out;
  }
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = fuse_value(sal(i), sem(i), fru(i), w);
  return out;
}

AttentionMap fuse_attention(const AttentionMap& sal, const AttentionMap& sem, const AttentionMap& fru,
                            const FusionWeights& w) {
  AttentionMap out = fuse_attention_raw(sal, sem, fru, w);
  const double hi = out.size() > 0 ? out.maxCoeff() : 0.0;
  if (hi > 0.0) out /= hi;
  return out;
}

std::vector<SignScore> score_signs(const AttentionMap& fused, const SignMask& mask, double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("score_signs: kappa must be positive");
  std::map<SignId, SignScore> acc;
  for (Eigen::Index i = 0; i < mask.ids.size(); ++i) {
    const SignId id = mask.ids(i);
    if (id == 0) continue;
    auto& s = acc[id];
    s.sign = id;
    s.raw_sum += fused(i);
    ++s.pixels;
  }
  std::vector<SignScore> out;
  out.reserve(acc.size());
  for (auto& [id, s] : acc) {
    s.attention = saturate_attention(s.raw_sum, kappa);
    out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(), [](const SignScore& a, const SignScore& b) {
    if (a.attention != b.attention) return a.attention > b.attention;
    return a.sign < b.sign;
  });
  return out;
}

}  // namespace wayfind
