#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lookupf/core.hpp"
#include "lookupf/fft.hpp"
#include "lookupf/imgproc.hpp"
#include "lookupf/store.hpp"

namespace lookupf {

struct Descriptor {
  std::vector<float> values;
  bool normalized = false;

  std::size_t dim() const noexcept { return values.size(); }
  friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

using Extractor = std::function<Descriptor(const ImageBuffer&)>;

inline double l2_norm(const Descriptor& d) {
  double s = 0.0;
  for (float v : d.values) s += static_cast<double>(v) * v;
  return std::sqrt(s);
}

// Unit-length copy. Zero vectors stay zero with normalized = false.
inline Descriptor l2_normalize(Descriptor d) {
  const double n = l2_norm(d);
  if (n == 0.0) {
    d.normalized = false;
    return d;
  }
  for (auto& v : d.values) v = static_cast<float>(v / n);
  d.normalized = true;
  return d;
}

inline double descriptor_distance(const Descriptor& a, const Descriptor& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "descriptor dimensions " + std::to_string(a.dim()) +
                                                  " and " + std::to_string(b.dim()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = static_cast<double>(a.values[i]) - b.values[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Distance between the re-normalized descriptors; used as the augmentation
// difficulty proxy.
inline double descriptor_drift(const Descriptor& original, const Descriptor& transformed) {
  if (original.dim() != transformed.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "descriptor dimensions differ");
  }
  return descriptor_distance(l2_normalize(original), l2_normalize(transformed));
}

// ---------------------------------------------------------------------------
// GIST

struct GistParams {
  int resize_edge = 64;
  int scales = 4;
  std::vector<int> orientations_per_scale{8, 8, 8, 8};
  int grid = 4;
  double epsilon = 1e-6;

  int channel_count() const {
    return std::accumulate(orientations_per_scale.begin(), orientations_per_scale.end(), 0);
  }
  std::size_t dimension() const {
    return static_cast<std::size_t>(grid) * grid * channel_count();
  }

  void validate() const {
    if (resize_edge < 8) throw Error(ErrorCode::InvalidParams, "resize_edge must be >= 8");
    if (scales < 1 || static_cast<int>(orientations_per_scale.size()) != scales) {
      throw Error(ErrorCode::InvalidParams, "orientations_per_scale must list one count per scale");
    }
    for (int o : orientations_per_scale) {
      if (o < 1) throw Error(ErrorCode::InvalidParams, "orientation counts must be >= 1");
    }
    if (grid < 1 || grid > resize_edge) {
      throw Error(ErrorCode::InvalidParams, "grid must be in [1, resize_edge]");
    }
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidParams, "epsilon must be positive");
  }

  // Stable description written into index manifests.
  std::string manifest() const {
    std::ostringstream os;
    os << "gist/r" << resize_edge << "/s" << scales << "/o";
    for (std::size_t i = 0; i < orientations_per_scale.size(); ++i) {
      os << (i ? "," : "") << orientations_per_scale[i];
    }
    os << "/g" << grid << "/e" << epsilon;
    return os.str();
  }
};

namespace gist {

// Peak radial frequency (cycles/pixel) of scale s; each scale is 1.85x
// coarser than the previous.
inline double scale_frequency(int scale) { return 0.3 / std::pow(1.85, scale); }

// Angle (radians, in [0, pi)) of the frequency direction orientation o is
// tuned to. o = n/2 responds to energy along the vertical frequency axis,
// i.e. horizontal stripes.
inline double orientation_angle(int orientation, int orientations) {
  return std::numbers::pi * orientation / orientations;
}

// Real, zero-DC transfer function of one filter on an n x n DFT grid.
inline std::vector<double> transfer_function(int n, int scale, int orientation, int orientations) {
  std::vector<double> h(static_cast<std::size_t>(n) * n);
  const double f0 = scale_frequency(scale);
  const double theta0 = orientation_angle(orientation, orientations);
  const double angular = 2.0 * std::numbers::pi * (16.0 * orientations * orientations / 1024.0);
  for (int ky = 0; ky < n; ++ky) {
    const double fy = fft::bin_frequency(ky, n);
    for (int kx = 0; kx < n; ++kx) {
      const double fx = fft::bin_frequency(kx, n);
      const double rho = std::hypot(fx, fy);
      double dtheta = std::atan2(fy, fx) - theta0;
      dtheta = std::remainder(dtheta, 2.0 * std::numbers::pi);
      const double radial = rho / f0 - 1.0;
      h[static_cast<std::size_t>(ky) * n + kx] =
          std::exp(-3.5 * radial * radial - angular * dtheta * dtheta);
    }
  }
  h[0] = 0.0;
  return h;
}

// Gaussian low-pass used by contrast normalization; 4 cycles/image cutoff.
inline std::vector<double> lowpass_transfer(int n) {
  const double s1 = 4.0 / std::sqrt(std::log(2.0));
  std::vector<double> g(static_cast<std::size_t>(n) * n);
  for (int ky = 0; ky < n; ++ky) {
    const double fy = fft::bin_frequency(ky, n) * n;
    for (int kx = 0; kx < n; ++kx) {
      const double fx = fft::bin_frequency(kx, n) * n;
      g[static_cast<std::size_t>(ky) * n + kx] = std::exp(-(fx * fx + fy * fy) / (s1 * s1));
    }
  }
  return g;
}

inline std::vector<fft::Complex> to_complex(const Plane& p) {
  std::vector<fft::Complex> out(p.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = p.values[i];
  return out;
}

inline std::vector<fft::Complex> apply_transfer(const std::vector<fft::Complex>& spectrum,
                                                const std::vector<double>& transfer, int n) {
  std::vector<fft::Complex> prod(spectrum.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = spectrum[i] * transfer[i];
  return fft::inverse(prod, n, n);
}

// Luminance resampled to the working grid, log-compressed.
inline Plane working_plane(const ImageBuffer& img, const GistParams& params) {
  Plane p = resize_bilinear(luminance(img), params.resize_edge, params.resize_edge);
  for (auto& v : p.values) v = std::log1p(v);
  return p;
}

// High-pass, then divide by the local RMS contrast (epsilon-guarded).
inline Plane contrast_normalize(const Plane& p, double epsilon) {
  const int n = p.width;
  const auto g = lowpass_transfer(n);
  const auto low = apply_transfer(fft::forward(to_complex(p), n, n), g, n);
  Plane hp(n, n);
  for (std::size_t i = 0; i < hp.values.size(); ++i) hp.values[i] = p.values[i] - low[i].real();
  Plane sq(n, n);
  for (std::size_t i = 0; i < sq.values.size(); ++i) sq.values[i] = hp.values[i] * hp.values[i];
  const auto local = apply_transfer(fft::forward(to_complex(sq), n, n), g, n);
  Plane out(n, n);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = hp.values[i] / (std::sqrt(std::abs(local[i].real())) + epsilon);
  }
  return out;
}

// Complex response of every filter, ordered (scale, orientation).
inline std::vector<std::vector<fft::Complex>> filter_bank_responses(const Plane& normalized,
                                                                    const GistParams& params) {
  const int n = normalized.width;
  const auto spectrum = fft::forward(to_complex(normalized), n, n);
  std::vector<std::vector<fft::Complex>> out;
  out.reserve(params.channel_count());
  for (int s = 0; s < params.scales; ++s) {
    const int no = params.orientations_per_scale[s];
    for (int o = 0; o < no; ++o) {
      out.push_back(apply_transfer(spectrum, transfer_function(n, s, o, no), n));
    }
  }
  return out;
}

// Mean magnitude over grid x grid blocks, block-row major.
inline std::vector<double> pool_blocks(const std::vector<fft::Complex>& response, int n, int grid) {
  std::vector<double> pooled(static_cast<std::size_t>(grid) * grid, 0.0);
  for (int by = 0; by < grid; ++by) {
    const int y0 = by * n / grid, y1 = (by + 1) * n / grid;
    for (int bx = 0; bx < grid; ++bx) {
      const int x0 = bx * n / grid, x1 = (bx + 1) * n / grid;
      double s = 0.0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) s += std::abs(response[static_cast<std::size_t>(y) * n + x]);
      }
      pooled[static_cast<std::size_t>(by) * grid + bx] = s / ((y1 - y0) * (x1 - x0));
    }
  }
  return pooled;
}

}  // namespace gist

inline Descriptor gist_descriptor(const ImageBuffer& img, const GistParams& params = {}) {
  params.validate();
  const Plane plane = gist::working_plane(img, params);
  Descriptor d;
  d.values.assign(params.dimension(), 0.0f);

  const auto [lo, hi] = std::minmax_element(plane.values.begin(), plane.values.end());
  if (*hi - *lo < 1e-12) return d;  // flat input carries no band-pass energy

  const Plane normalized = gist::contrast_normalize(plane, params.epsilon);
  const auto responses = gist::filter_bank_responses(normalized, params);
  std::vector<double> raw;
  raw.reserve(params.dimension());
  for (const auto& r : responses) {
    const auto pooled = gist::pool_blocks(r, params.resize_edge, params.grid);
    raw.insert(raw.end(), pooled.begin(), pooled.end());
  }
  double norm = 0.0;
  for (double v : raw) norm += v * v;
  norm = std::sqrt(norm);
  if (norm < 1e-9) return d;
  for (std::size_t i = 0; i < raw.size(); ++i) d.values[i] = static_cast<float>(raw[i] / norm);
  d.normalized = true;
  return d;
}

inline Extractor gist_extractor(GistParams params = {}) {
  params.validate();
  return [params](const ImageBuffer& img) { return gist_descriptor(img, params); };
}

// ---------------------------------------------------------------------------
// External embeddings

struct ExternalLoadOptions {
  bool l2_normalize = true;
};

inline std::vector<std::pair<std::string, Descriptor>> load_external_descriptors(
    const std::filesystem::path& path, ExternalLoadOptions options = {}) {
  auto store = load_store(path);
  std::vector<std::pair<std::string, Descriptor>> out;
  out.reserve(store.records.size());
  for (auto& rec : store.records) {
    Descriptor d{std::move(rec.values), false};
    for (float v : d.values) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::MalformedFile, "non-finite value in record " + rec.id);
      }
    }
    if (options.l2_normalize) d = l2_normalize(std::move(d));
    out.emplace_back(std::move(rec.id), std::move(d));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Whitening

struct WhiteningModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd transform;  // out_dim x dim

  std::size_t input_dim() const { return static_cast<std::size_t>(mean.size()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(transform.rows()); }
};

inline WhiteningModel fit_whitening(const std::vector<Descriptor>& train, std::size_t out_dim,
                                    double epsilon = 1e-9) {
  if (out_dim < 1 || train.size() <= out_dim) {
    throw Error(ErrorCode::TooFewSamples, "need more than out_dim training descriptors (" +
                                              std::to_string(train.size()) + " given, out_dim " +
                                              std::to_string(out_dim) + ")");
  }
  const auto d = static_cast<Eigen::Index>(train.front().dim());
  if (static_cast<std::size_t>(d) < out_dim) {
    throw Error(ErrorCode::InvalidParams, "out_dim exceeds descriptor dimension");
  }
  const auto n = static_cast<Eigen::Index>(train.size());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(train[i].dim()) != d) {
      throw Error(ErrorCode::DimensionMismatch, "training descriptors differ in dimension");
    }
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = train[i].values[j];
  }
  WhiteningModel model;
  model.mean = x.colwise().mean().transpose();
  x.rowwise() -= model.mean.transpose();
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  // eigenvalues ascending; take the top out_dim
  const auto k = static_cast<Eigen::Index>(out_dim);
  model.transform.resize(k, d);
  for (Eigen::Index r = 0; r < k; ++r) {
    const Eigen::Index col = d - 1 - r;
    const double lambda = std::max(eig.eigenvalues()(col), 0.0);
    model.transform.row(r) = eig.eigenvectors().col(col).transpose() / std::sqrt(lambda + epsilon);
  }
  return model;
}

inline Descriptor apply_whitening(const WhiteningModel& model, const Descriptor& in,
                                  bool renormalize = true) {
  if (in.dim() != model.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "descriptor does not match whitening input");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(in.dim()));
  for (std::size_t i = 0; i < in.dim(); ++i) v(static_cast<Eigen::Index>(i)) = in.values[i];
  const Eigen::VectorXd w = model.transform * (v - model.mean);
  Descriptor out;
  out.values.resize(static_cast<std::size_t>(w.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) out.values[i] = static_cast<float>(w(i));
  return renormalize ? l2_normalize(std::move(out)) : out;
}

}  // namespace lookupf
