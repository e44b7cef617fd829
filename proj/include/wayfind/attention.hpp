#pragma once

#include "wayfind/camera.hpp"
#include "wayfind/environment.hpp"
#include "wayfind/raster.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace wayfind {

struct FrustumParams {
  enum class VerticalOrigin { top, bottom };
  double gaussian_mu = 0.0;     // degrees
  double gaussian_sigma = 7.0;  // degrees
  double beta_alpha = 3.0;
  double beta_beta = 12.0;
  VerticalOrigin vertical_origin = VerticalOrigin::top;
};

struct FusionWeights {
  double saliency = 1.0;
  double semantic = 1.0;
  double frustum = 1.0;

  double total() const { return saliency + semantic + frustum; }
};

struct SignScore {
  SignId sign = 0;
  double raw_sum = 0.0;
  double attention = 0.0;
  long pixels = 0;
};

// --- frustum ---------------------------------------------------------------

/// Peak-normalized Gaussian over horizontal eccentricity in degrees.
double frustum_horizontal_factor(double eccentricity_deg, const FrustumParams& params);

/// Peak-normalized Beta density over the normalized vertical coordinate in (0,1).
/// For alpha, beta >= 1 the peak is the distribution mode; otherwise the caller normalizes.
double frustum_vertical_factor(double y_normalized, const FrustumParams& params);

/// Horizontal eccentricity of a raster column's center under the pinhole model, in degrees.
double column_eccentricity_deg(int column, const CameraConfig& config);

AttentionMap frustum_map(int width, int height, const CameraConfig& config, const FrustumParams& params);

// --- saliency --------------------------------------------------------------

namespace saliency {

inline constexpr int kBins = 32;
inline constexpr int kLevels = 3;
inline constexpr double kFloor = 1.0 / kBins;

enum class Channel { luminance, red_green, blue_yellow };

/// Opponent channel plane and the fixed value range used for binning.
struct Plane {
  Raster<double> values;
  double lo;
  double hi;
};

Plane channel_plane(const ViewRaster& raster, Channel channel);

int bin_of(double value, double lo, double hi, int bins = kBins);

/// One dyadic pyramid step: 5-tap binomial blur with clamped borders, then keep even samples.
Raster<double> pyramid_down(const Raster<double>& level);

/// Self-information of each pixel's bin under the plane's own histogram: -log(h / N).
Raster<double> rarity_map(const Raster<double>& values, double lo, double hi, int bins = kBins);

/// Divide by the maximum; a constant map becomes the uniform floor.
Raster<double> normalize_rarity(const Raster<double>& rarity);

/// Pixel-center aligned bilinear resampling.
Raster<double> upsample_bilinear(const Raster<double>& src, int width, int height);

}  // namespace saliency

/// Rarity saliency over luminance and two opponent-color channels at three pyramid levels.
AttentionMap saliency_map(const ViewRaster& raster);

// --- semantic ----------------------------------------------------------------

AttentionMap semantic_map(const SignMask& mask, const Environment& env);

// --- fusion ------------------------------------------------------------------

/// Weighted geometric mean of one pixel. A zero input with positive weight annihilates.
template <typename Scalar>
Scalar fuse_value(Scalar sal, Scalar sem, Scalar fru, const FusionWeights& w) {
  const Scalar total = static_cast<Scalar>(w.total());
  Scalar log_sum = 0;
  const Scalar values[3] = {sal, sem, fru};
  const double weights[3] = {w.saliency, w.semantic, w.frustum};
  for (int i = 0; i < 3; ++i) {
    if (weights[i] == 0.0) continue;
    if (values[i] <= Scalar(0)) return Scalar(0);
    log_sum += static_cast<Scalar>(weights[i]) * std::log(values[i]);
  }
  return std::exp(log_sum / total);
}

/// Pixelwise weighted geometric mean without frame renormalization.
AttentionMap fuse_attention_raw(const AttentionMap& sal, const AttentionMap& sem, const AttentionMap& fru,
                                const FusionWeights& w);

/// Weighted geometric mean rescaled so the frame maximum is 1. Throws std::invalid_argument
/// on mismatched dimensions or non-positive total weight.
AttentionMap fuse_attention(const AttentionMap& sal, const AttentionMap& sem, const AttentionMap& fru,
                            const FusionWeights& w);

// --- scoring -----------------------------------------------------------------

/// Saturating map from summed attention to [0,1).
inline double saturate_attention(double raw_sum, double kappa) { return 1.0 - std::exp(-raw_sum / kappa); }

/// 1% of the raster area.
inline double default_kappa(const CameraConfig& c) { return 0.01 * c.raster_width * c.raster_height; }

/// Per-sign attention sums, sorted by attention descending then sign id ascending.
std::vector<SignScore> score_signs(const AttentionMap& fused, const SignMask& mask, double kappa);

}  // namespace wayfind
