#include "trigmp/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "trigmp/errors.hpp"

namespace trigmp {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t count) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(count, 1)));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

void check_length(std::size_t input, std::size_t length) {
  if (length < input || length == 0) {
    throw DomainError("padded_dft: transform length " + std::to_string(length) +
                      " shorter than input " + std::to_string(input));
  }
}

}  // namespace

namespace detail {

// Real-to-complex transform of fixed length with owned, aligned buffers.
// FFTW_ESTIMATE keeps the chosen algorithm, and therefore the output bits,
// independent of timing.
class RealTransform {
 public:
  explicit RealTransform(std::size_t length)
      : length_(length),
        in_(fftw_buffer<double>(length)),
        out_(fftw_buffer<fftw_complex>(length / 2 + 1)) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(length), in_.get(), out_.get(), FFTW_ESTIMATE);
    if (plan_ == nullptr) throw std::runtime_error("FFTW planning failed");
  }

  ~RealTransform() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }

  RealTransform(const RealTransform&) = delete;
  RealTransform& operator=(const RealTransform&) = delete;

  std::size_t length() const noexcept { return length_; }

  // Zero-pads `y` and transforms; returns bins 0..length/2.
  std::span<const Complex> run(std::span<const double> y) {
    std::copy(y.begin(), y.end(), in_.get());
    std::fill(in_.get() + y.size(), in_.get() + length_, 0.0);
    fftw_execute(plan_);
    return {reinterpret_cast<const Complex*>(out_.get()), length_ / 2 + 1};
  }

 private:
  std::size_t length_;
  FftwBuffer<double> in_;
  FftwBuffer<fftw_complex> out_;
  fftw_plan plan_ = nullptr;
};

}  // namespace detail

std::vector<Complex> padded_dft(std::span<const double> y, std::size_t length) {
  check_length(y.size(), length);
  detail::RealTransform transform(length);
  const auto half = transform.run(y);
  std::vector<Complex> out(length);
  std::copy(half.begin(), half.end(), out.begin());
  for (std::size_t k = half.size(); k < length; ++k) out[k] = std::conj(out[length - k]);
  return out;
}

std::vector<Complex> padded_dft(std::span<const Complex> y, std::size_t length) {
  check_length(y.size(), length);
  auto buf = fftw_buffer<fftw_complex>(length);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(length), buf.get(), buf.get(), FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
  auto* data = reinterpret_cast<Complex*>(buf.get());
  std::copy(y.begin(), y.end(), data);
  std::fill(data + y.size(), data + length, Complex{});
  fftw_execute(plan);
  std::vector<Complex> out(data, data + length);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::size_t InnerProductVector::size() const noexcept {
  return fourier.size() + cosine.size() + sine.size();
}

Complex InnerProductVector::at(AtomIndex index) const {
  if (index < 1 || index > size()) {
    throw DomainError("inner product index " + std::to_string(index) + " out of range");
  }
  const std::size_t k = index - 1;
  switch (kind) {
    case DictionaryCase::Fourier: return fourier[k];
    case DictionaryCase::Cosine: return cosine[k];
    case DictionaryCase::Sine: return sine[k];
    case DictionaryCase::CosineSine:
      return k < cosine.size() ? cosine[k] : sine[k - cosine.size()];
  }
  return {};
}

InnerProductEngine::InnerProductEngine(const DictionarySpec& spec) : spec_(spec) {
  const std::size_t dim = spec.dim();
  if (spec.kind() == DictionaryCase::Fourier) {
    transform_ = std::make_unique<detail::RealTransform>(spec.atoms());
    return;
  }
  // Cosine and sine inner products share one transform of length 2M'.
  const std::size_t sub = spec.sub_atoms();
  transform_ = std::make_unique<detail::RealTransform>(2 * sub);
  phase_.resize(sub + 1);
  for (std::size_t k = 0; k <= sub; ++k) {
    phase_[k] = std::polar(1.0, -std::numbers::pi * static_cast<double>(k) /
                                    (2.0 * static_cast<double>(sub)));
  }
  if (spec.kind() != DictionaryCase::Sine) {
    inv_cos_.resize(sub);
    for (std::size_t n = 1; n <= sub; ++n) inv_cos_[n - 1] = 1.0 / weight_cos(n, sub, dim);
  }
  if (spec.kind() != DictionaryCase::Cosine) {
    inv_sin_.resize(sub);
    for (std::size_t n = 1; n <= sub; ++n) inv_sin_[n - 1] = 1.0 / weight_sin(n, sub, dim);
  }
}

InnerProductEngine::~InnerProductEngine() = default;
InnerProductEngine::InnerProductEngine(InnerProductEngine&&) noexcept = default;
InnerProductEngine& InnerProductEngine::operator=(InnerProductEngine&&) noexcept = default;

void InnerProductEngine::compute(std::span<const double> residual, InnerProductVector& out) {
  if (residual.size() != spec_.dim()) {
    throw DomainError("inner_products: residual length " + std::to_string(residual.size()) +
                      " != atom length " + std::to_string(spec_.dim()));
  }
  out.kind = spec_.kind();
  const auto bins = transform_->run(residual);

  if (spec_.kind() == DictionaryCase::Fourier) {
    const std::size_t m = spec_.atoms();
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec_.dim()));
    out.fourier.resize(m);
    out.cosine.clear();
    out.sine.clear();
    for (std::size_t k = 0; k < bins.size(); ++k) out.fourier[k] = scale * bins[k];
    for (std::size_t k = bins.size(); k < m; ++k) out.fourier[k] = std::conj(out.fourier[m - k]);
    return;
  }

  out.fourier.clear();
  const std::size_t sub = spec_.sub_atoms();
  if (!inv_cos_.empty()) {
    out.cosine.resize(sub);
    // bin n-1 -> cosine atom n
    for (std::size_t k = 0; k < sub; ++k) out.cosine[k] = inv_cos_[k] * (phase_[k] * bins[k]).real();
  } else {
    out.cosine.clear();
  }
  if (!inv_sin_.empty()) {
    out.sine.resize(sub);
    // bin k -> sine atom k, k = 1..M'
    for (std::size_t k = 1; k <= sub; ++k) {
      out.sine[k - 1] = -inv_sin_[k - 1] * (phase_[k] * bins[k]).imag();
    }
  } else {
    out.sine.clear();
  }
}

InnerProductVector InnerProductEngine::compute(std::span<const double> residual) {
  InnerProductVector out;
  compute(residual, out);
  return out;
}

InnerProductVector inner_products(std::span<const double> residual, const DictionarySpec& spec) {
  InnerProductEngine engine(spec);
  return engine.compute(residual);
}

}  // namespace trigmp
