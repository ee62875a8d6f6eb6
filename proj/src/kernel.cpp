#include "dilateron/transference/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fftw3.h>

#include "dilateron/error.hpp"

namespace dilateron::transference {

namespace {

constexpr double kPi = std::numbers::pi;

int next_pow2(long long n) {
  long long m = 1;
  while (m < n) m <<= 1;
  if (m > (1LL << 30)) throw InputError("FFT size too large");
  return static_cast<int>(m);
}

// In-place FFT buffer with forward and backward plans.
class Fft {
 public:
  explicit Fft(int size) : size_(size) {
    buf_ = fftw_alloc_complex(static_cast<size_t>(size));
    if (buf_ == nullptr) throw Error("fftw allocation failed");
    fwd_ = fftw_plan_dft_1d(size, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(size, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  cplx* data() { return reinterpret_cast<cplx*>(buf_); }
  int size() const { return size_; }
  void clear() { std::fill(data(), data() + size_, cplx(0.0)); }
  void forward() { fftw_execute(fwd_); }
  void backward() { fftw_execute(bwd_); }

 private:
  int size_;
  fftw_complex* buf_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

}  // namespace

TimeKernel::TimeKernel(double h, double t0, Eigen::VectorXcd samples)
    : h_(h), t0_(t0), samples_(std::move(samples)) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("kernel step must be positive");
  if (!std::isfinite(t0)) throw InputError("kernel origin must be finite");
  if (samples_.size() == 0) throw InputError("kernel needs at least one sample");
  if (!samples_.allFinite()) throw InputError("kernel samples must be finite");
}

TimeKernel TimeKernel::sample(const std::function<cplx(double)>& f, double h, double horizon) {
  if (!(h > 0.0) || !(horizon > 0.0)) throw InputError("step and horizon must be positive");
  const long long count = std::max<long long>(1, std::llround(horizon / h));
  if (count > (1LL << 26)) throw InputError("kernel grid too large");
  Eigen::VectorXcd s(count);
  for (long long j = 0; j < count; ++j) s(j) = f((static_cast<double>(j) + 0.5) * h);
  return TimeKernel(h, 0.5 * h, std::move(s));
}

TimeKernel TimeKernel::delta(double h) {
  Eigen::VectorXcd s(1);
  s(0) = 1.0 / h;
  return TimeKernel(h, 0.0, std::move(s));
}

double TimeKernel::l1_norm() const { return h_ * samples_.cwiseAbs().sum(); }

cplx TimeKernel::fourier(double nu) const {
  cplx acc = 0.0;
  for (int j = 0; j < size(); ++j) acc += samples_(j) * std::polar(1.0, -nu * time(j));
  return h_ * acc;
}

cplx TimeKernel::laplace(double x) const {
  cplx acc = 0.0;
  for (int j = 0; j < size(); ++j) acc += samples_(j) * std::exp(-x * time(j));
  return h_ * acc;
}

TimeKernel TimeKernel::trimmed(double rel) const {
  const Eigen::VectorXd mass = samples_.cwiseAbs();
  const double budget = rel * mass.sum();
  int lo = 0;
  int hi = size() - 1;
  double dropped = 0.0;
  // Drop from whichever end is cheaper until the budget is exhausted.
  while (lo < hi) {
    const double cost = std::min(mass(lo), mass(hi));
    if (dropped + cost > budget) break;
    dropped += cost;
    if (mass(lo) <= mass(hi)) {
      ++lo;
    } else {
      --hi;
    }
  }
  return TimeKernel(h_, time(lo), samples_.segment(lo, hi - lo + 1));
}

TimeKernel exponential_kernel(double rate, double h, double horizon) {
  if (!(rate > 0.0)) throw InputError("rate must be positive");
  return TimeKernel::sample([rate](double t) { return cplx(std::exp(-rate * t)); }, h, horizon);
}

TimeKernel gaussian_bump(double center, double width, double h) {
  if (!(width > 0.0)) throw InputError("width must be positive");
  const double norm = 1.0 / (width * std::sqrt(2.0 * kPi));
  return TimeKernel::sample(
             [=](double t) {
               const double z = (t - center) / width;
               return cplx(norm * std::exp(-0.5 * z * z));
             },
             h, center + 8.0 * width)
      .trimmed();
}

TimeKernel window_average(double t, double h) {
  const long long steps = std::llround(t / h);
  if (steps < 1) throw InputError("window shorter than one step");
  return TimeKernel(h, 0.5 * h, Eigen::VectorXcd::Constant(steps, 1.0 / (steps * h)));
}

TimeKernel random_causal_kernel(Rng& rng, double h, int kind) {
  switch (((kind % 4) + 4) % 4) {
    case 0:
      return gaussian_bump(uniform(rng, 0.2, 2.0), uniform(rng, 0.1, 0.5), h);
    case 1: {
      const double rate = uniform(rng, 0.5, 3.0);
      return exponential_kernel(rate, h, 36.0 / rate).trimmed();
    }
    case 2: {
      const double c = uniform(rng, 0.3, 1.5);
      const double w = uniform(rng, 0.1, 0.4);
      const double freq = uniform(rng, -6.0, 6.0);
      const double norm = 1.0 / (w * std::sqrt(2.0 * kPi));
      return TimeKernel::sample(
                 [=](double t) {
                   const double z = (t - c) / w;
                   return norm * std::exp(-0.5 * z * z) * std::polar(1.0, freq * t);
                 },
                 h, c + 8.0 * w)
          .trimmed();
    }
    default: {
      const int len = uniform_int(rng, 4, 60);
      return TimeKernel(h, 0.0, complex_gaussian_vector(rng, len) / (h * len));
    }
  }
}

TimeKernel convolve(const TimeKernel& a, const TimeKernel& b) {
  if (std::abs(a.h() - b.h()) > 1e-15 * a.h()) throw InputError("kernels must share the step");
  const int la = a.size();
  const int lb = b.size();
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(la + lb - 1);
  for (int i = 0; i < la; ++i) {
    for (int j = 0; j < lb; ++j) c(i + j) += a.samples()(i) * b.samples()(j);
  }
  return TimeKernel(a.h(), a.t0() + b.t0(), a.h() * c);
}

struct ToeplitzOperator::Plan {
  explicit Plan(int size) : fft(size) {}
  Fft fft;
  Eigen::VectorXcd kernel_hat;
};

ToeplitzOperator::ToeplitzOperator(const TimeKernel& k, int window)
    : n_(window), taps_(k.h() * k.samples()) {
  if (window < 1) throw InputError("window must be positive");
  size_ = next_pow2(static_cast<long long>(window) + k.size() - 1);
  plan_ = std::make_unique<Plan>(size_);
  plan_->fft.clear();
  std::copy(taps_.data(), taps_.data() + taps_.size(), plan_->fft.data());
  plan_->fft.forward();
  plan_->kernel_hat = Eigen::Map<Eigen::VectorXcd>(plan_->fft.data(), size_);
}

ToeplitzOperator::~ToeplitzOperator() = default;

Eigen::VectorXcd ToeplitzOperator::transform(const Eigen::VectorXcd& x, bool conjugate_kernel) const {
  if (x.size() != n_) throw InputError("Toeplitz operand has the wrong length");
  Fft& fft = plan_->fft;
  fft.clear();
  std::copy(x.data(), x.data() + n_, fft.data());
  fft.forward();
  cplx* d = fft.data();
  for (int g = 0; g < size_; ++g) {
    const cplx kh = plan_->kernel_hat(g);
    d[g] *= conjugate_kernel ? std::conj(kh) : kh;
  }
  fft.backward();
  return Eigen::Map<Eigen::VectorXcd>(d, n_) / static_cast<double>(size_);
}

Eigen::VectorXcd ToeplitzOperator::apply(const Eigen::VectorXcd& x) const { return transform(x, false); }

// Circular correlation; no wrap-around because size >= N + L - 1.
Eigen::VectorXcd ToeplitzOperator::adjoint(const Eigen::VectorXcd& y) const { return transform(y, true); }

Eigen::MatrixXcd ToeplitzOperator::dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n_, n_);
  for (int r = 0; r < n_; ++r) {
    for (int c = 0; c <= r; ++c) {
      if (r - c < taps_.size()) m(r, c) = taps_(r - c);
    }
  }
  return m;
}

ascent::LinearMap toeplitz_map(const TimeKernel& k, int window) {
  auto op = std::make_shared<ToeplitzOperator>(k, window);
  ascent::LinearMap map;
  map.rows = window;
  map.cols = window;
  map.apply = [op](const Eigen::VectorXcd& x) { return op->apply(x); };
  map.adjoint = [op](const Eigen::VectorXcd& y) { return op->adjoint(y); };
  return map;
}

FourierSup fourier_sup(const TimeKernel& k) {
  const int len = k.size();
  const int g = next_pow2(std::min<long long>(std::max<long long>(512LL * len, 16384), 1LL << 23));
  Fft fft(g);
  fft.clear();
  std::copy(k.samples().data(), k.samples().data() + len, fft.data());
  fft.forward();
  double best = 0.0;
  int arg = 0;
  for (int i = 0; i < g; ++i) {
    const double f = std::norm(fft.data()[i]);
    if (f > best) {
      best = f;
      arg = i;
    }
  }
  FourierSup out;
  out.grid_max = k.h() * std::sqrt(best);
  out.argmax = 2.0 * kPi * arg / (static_cast<double>(g) * k.h());
  // |p|^2 is a trigonometric polynomial of degree D in nu h; Bernstein bounds its
  // second derivative by D^2 sup, and the grid leaves at most pi / g to the peak.
  const double d = static_cast<double>(len - 1);
  const double slack = 1.0 - d * d * kPi * kPi / (2.0 * static_cast<double>(g) * g);
  out.certified = slack > 0.0 ? out.grid_max / std::sqrt(slack) : std::numeric_limits<double>::infinity();
  return out;
}

ConvolverLower convolver_lower(const TimeKernel& k, double p, int window, std::uint64_t seed,
                               int starts, const Eigen::VectorXcd* warm_start) {
  if (!(p >= 1.0)) throw InputError("p must be at least 1");
  ConvolverLower out;
  const ascent::LinearMap map = toeplitz_map(k, window);
  if (p == 1.0) {
    // Columns of a lower-triangular Toeplitz matrix: the first column is the longest.
    out.witness = Eigen::VectorXcd::Unit(window, 0);
    out.value = map.apply(out.witness).cwiseAbs().sum();
    return out;
  }
  std::vector<Eigen::VectorXcd> extra;
  extra.push_back(Eigen::VectorXcd::Ones(window));
  if (warm_start != nullptr && warm_start->size() > 0) {
    // Extend a witness from a smaller window by zero padding.
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(window);
    const int m = std::min<int>(window, static_cast<int>(warm_start->size()));
    w.head(m) = warm_start->head(m);
    extra.push_back(w);
  }
  // Modulated constants probe the Fourier peak, which governs p near 2.
  const double nu = fourier_sup(k).argmax * k.h();
  Eigen::VectorXcd wave(window);
  for (int j = 0; j < window; ++j) wave(j) = std::polar(1.0, nu * j);
  extra.push_back(wave);
  ascent::Options opts;
  opts.starts = starts;
  opts.seed = seed;
  opts.max_iterations = 300;
  opts.tol = 1e-10;
  const auto norm = ascent::MixedNorm::plain(p);
  const ascent::Result r = ascent::maximize_ratio(map, norm, norm, opts, extra);
  out.value = r.value;
  out.witness = r.witness;
  return out;
}

double convolver_upper(const TimeKernel& k, double p) {
  if (!(p >= 1.0)) throw InputError("p must be at least 1");
  const double l1 = k.l1_norm();
  if (p == 1.0) return l1;
  const double s = std::min(fourier_sup(k).certified, l1);
  const double pp = p > 2.0 ? p / (p - 1.0) : p;
  const double theta = 2.0 * (1.0 - 1.0 / pp);
  return std::pow(l1, 1.0 - theta) * std::pow(s, theta);
}

}  // namespace dilateron::transference
