#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace kepshear {

using cplx = std::complex<double>;

/// Monte-Carlo estimate of a complex mean with its standard error
/// sqrt(sum |z - mean|^2 / ((n - 1) n)).
struct Estimate {
  cplx value{};
  double stderr_ = 0.0;
  std::size_t n = 0;

  double stderr() const { return stderr_; }
};

/// Running complex mean / second moment (Welford), mergeable in a fixed order.
class ComplexMoments {
 public:
  void add(cplx z) {
    ++n_;
    const cplx d = z - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += std::real(d * std::conj(z - mean_));
  }

  void merge(const ComplexMoments& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
    const cplx d = o.mean_ - mean_;
    const double n = na + nb;
    mean_ += d * (nb / n);
    m2_ += o.m2_ + std::norm(d) * na * nb / n;
    n_ += o.n_;
  }

  std::size_t count() const { return n_; }
  cplx mean() const { return mean_; }

  Estimate estimate() const {
    Estimate e;
    e.value = mean_;
    e.n = n_;
    e.stderr_ = n_ > 1 ? std::sqrt(m2_ / (static_cast<double>(n_ - 1) * static_cast<double>(n_))) : 0.0;
    return e;
  }

 private:
  std::size_t n_ = 0;
  cplx mean_{};
  double m2_ = 0.0;
};

inline ComplexMoments merge_in_order(std::span<const ComplexMoments> parts) {
  ComplexMoments acc;
  for (const auto& p : parts) acc.merge(p);
  return acc;
}

/// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample KS distance of `z` (values in [0,1)) to the uniform law.
double ks_uniform(std::vector<double> z);

}  // namespace kepshear
