#include "lmmk/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "lmmk/error.hpp"

namespace lmmk {

namespace {

// Box-Muller on the raw engine output; std::normal_distribution is not
// specified bit-for-bit across standard libraries.
class Normal {
 public:
  explicit Normal(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

SyntheticData make_gaussian_classes(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.n_classes < 1 || spec.per_class < 1 || spec.informative < 0 || spec.noise < 0 ||
      spec.informative + spec.noise < 1)
    throw Error(ErrorCode::InvalidArgument, "invalid synthetic spec");
  const Index n = static_cast<Index>(spec.n_classes) * spec.per_class;
  const Index dims = spec.informative + spec.noise;
  SyntheticData out;
  out.features.resize(n, dims);
  out.labels.reserve(static_cast<std::size_t>(n));
  Normal normal(seed);
  Index row = 0;
  for (int c = 0; c < spec.n_classes; ++c) {
    const double angle = 2.0 * std::numbers::pi * c / spec.n_classes;
    for (int s = 0; s < spec.per_class; ++s, ++row) {
      for (Index f = 0; f < dims; ++f) {
        double mean = 0.0;
        if (f < spec.informative) {
          const double phase = angle + (f / 2) * std::numbers::pi / 4.0;
          mean = spec.radius * (f % 2 == 0 ? std::cos(phase) : std::sin(phase));
        }
        out.features(row, f) = mean + spec.stddev * normal();
      }
      out.labels.push_back(c + 1);
    }
  }
  return out;
}

}  // namespace lmmk
