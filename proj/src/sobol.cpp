#include "cropforge/sobol.hpp"

#include <bit>
#include <string>

#include "cropforge/error.hpp"

namespace cropforge {

namespace {

constexpr std::uint32_t kDirections[SobolSequence::kMaxDimension][32] = {
#include "sobol_table.inc"
};

}  // namespace

SobolSequence::SobolSequence(std::size_t dimension) : state_(dimension, 0u) {
  if (dimension == 0 || dimension > kMaxDimension) {
    throw ValidationError("sobol: dimension must be in [1, " + std::to_string(kMaxDimension) + "], got " +
                          std::to_string(dimension));
  }
}

void SobolSequence::next(std::span<double> out) {
  if (out.size() != state_.size()) throw ValidationError("sobol: output size does not match dimension");
  if (index_ + 1 >= (std::uint64_t{1} << 32)) throw ValidationError("sobol: sequence exhausted");
  // Point i+1 differs from point i in the direction of the lowest zero bit of i.
  const int bit = std::countr_one(index_);
  ++index_;
  for (std::size_t d = 0; d < state_.size(); ++d) {
    state_[d] ^= kDirections[d][bit];
    out[d] = static_cast<double>(state_[d]) * 0x1.0p-32;
  }
}

std::vector<double> SobolSequence::next() {
  std::vector<double> point(state_.size());
  next(point);
  return point;
}

}  // namespace cropforge
