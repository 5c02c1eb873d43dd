#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ggln {

using Rng = std::mt19937_64;

/// Half-space {z : z.v >= b} with a unit normal v.
class HalfSpaceContext {
 public:
  /// Throws ValidationError unless | |v| - 1 | < 1e-9 and everything is finite.
  HalfSpaceContext(std::vector<double> normal, double offset);

  std::span<const double> normal() const { return normal_; }
  double offset() const { return offset_; }
  std::size_t dim() const { return normal_.size(); }

 private:
  std::vector<double> normal_;
  double offset_;
};

/// s half-spaces read together as an s-bit context index.
class ComposedContext {
 public:
  explicit ComposedContext(std::vector<HalfSpaceContext> contexts);

  std::size_t size() const { return contexts_.size(); }
  std::size_t dim() const { return contexts_.front().dim(); }
  std::size_t cells() const { return std::size_t{1} << contexts_.size(); }
  const std::vector<HalfSpaceContext>& contexts() const { return contexts_; }

 private:
  std::vector<HalfSpaceContext> contexts_;
};

/// v = x / |x| with x ~ N(0, I_d); b = bias_scale * N(0, 1).
HalfSpaceContext sample_halfspace(std::size_t d, double bias_scale, Rng& rng);

ComposedContext sample_composed(std::size_t d, std::size_t s, double bias_scale, Rng& rng);

/// 1 iff z.v >= b.
int context_bit(const HalfSpaceContext& c, std::span<const double> z);

/// Little-endian: context i contributes 2^i.
std::uint32_t context_index(const ComposedContext& cc, std::span<const double> z);

/// Unchecked variant for the inner loop; z is assumed finite and of matching size.
std::uint32_t context_index_unchecked(const ComposedContext& cc, std::span<const double> z);

}  // namespace ggln
