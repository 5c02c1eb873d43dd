#include "ggln/gating.hpp"

#include <cmath>

#include "ggln/gaussian.hpp"

namespace ggln {

HalfSpaceContext::HalfSpaceContext(std::vector<double> normal, double offset)
    : normal_(std::move(normal)), offset_(offset) {
  if (normal_.empty()) throw ValidationError("half-space normal needs dimension >= 1");
  double n2 = 0.0;
  for (double v : normal_) {
    if (!std::isfinite(v)) throw ValidationError("half-space normal must be finite");
    n2 += v * v;
  }
  if (!std::isfinite(offset_)) throw ValidationError("half-space offset must be finite");
  if (std::abs(std::sqrt(n2) - 1.0) >= 1e-9) throw ValidationError("half-space normal must have unit norm");
}

ComposedContext::ComposedContext(std::vector<HalfSpaceContext> contexts) : contexts_(std::move(contexts)) {
  if (contexts_.empty()) throw ValidationError("composed context needs at least one half-space");
  if (contexts_.size() > 31) throw ValidationError("context dimension above 31 is not supported");
  for (const auto& c : contexts_) {
    if (c.dim() != contexts_.front().dim()) throw ValidationError("half-spaces differ in dimension");
  }
}

HalfSpaceContext sample_halfspace(std::size_t d, double bias_scale, Rng& rng) {
  if (d == 0) throw ValidationError("half-space dimension must be >= 1");
  if (!(bias_scale >= 0.0)) throw ValidationError("bias scale must be non-negative");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(d);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (auto& v : x) {
      v = normal(rng);
      n2 += v * v;
    }
  } while (n2 == 0.0);
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& v : x) v *= inv;
  const double b = bias_scale * normal(rng);
  return HalfSpaceContext(std::move(x), b);
}

ComposedContext sample_composed(std::size_t d, std::size_t s, double bias_scale, Rng& rng) {
  std::vector<HalfSpaceContext> cs;
  cs.reserve(s);
  for (std::size_t i = 0; i < s; ++i) cs.push_back(sample_halfspace(d, bias_scale, rng));
  return ComposedContext(std::move(cs));
}

int context_bit(const HalfSpaceContext& c, std::span<const double> z) {
  if (z.size() != c.dim()) throw ValidationError("side information dimension mismatch");
  double dot = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (!std::isfinite(z[k])) throw ValidationError("side information must be finite");
    dot += z[k] * c.normal()[k];
  }
  return dot >= c.offset() ? 1 : 0;
}

std::uint32_t context_index(const ComposedContext& cc, std::span<const double> z) {
  std::uint32_t idx = 0;
  for (std::size_t i = 0; i < cc.size(); ++i) {
    idx |= static_cast<std::uint32_t>(context_bit(cc.contexts()[i], z)) << i;
  }
  return idx;
}

std::uint32_t context_index_unchecked(const ComposedContext& cc, std::span<const double> z) {
  std::uint32_t idx = 0;
  const auto& cs = cc.contexts();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const auto v = cs[i].normal();
    double dot = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) dot += z[k] * v[k];
    if (dot >= cs[i].offset()) idx |= std::uint32_t{1} << i;
  }
  return idx;
}

}  // namespace ggln
