#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cropforge {

/// Unscrambled Sobol sequence (Joe-Kuo direction numbers, Gray-code order).
/// The all-zeros first point is skipped, so the first D=1 point is 0.5.
class SobolSequence {
 public:
  static constexpr std::size_t kMaxDimension = 64;

  explicit SobolSequence(std::size_t dimension);

  std::size_t dimension() const noexcept { return state_.size(); }
  /// Number of points emitted so far.
  std::uint64_t index() const noexcept { return index_; }

  void next(std::span<double> out);
  std::vector<double> next();

 private:
  std::vector<std::uint32_t> state_;
  std::uint64_t index_ = 0;
};

}  // namespace cropforge
