#include "perish/demand.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "perish/grid.hpp"

namespace perish {

namespace {

constexpr double kTruncationMass = 1e-9;
constexpr double kPoissonSplitMean = 30.0;

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double poisson_pmf0(double lambda) { return std::exp(-lambda); }

}  // namespace

DemandModel DemandModel::exponential(double mean, double step) {
  if (!(mean > 0.0)) throw std::invalid_argument("exponential demand requires mean > 0");
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  DemandModel m;
  m.kind_ = DemandKind::Exponential;
  m.mean_ = mean;
  m.variance_ = mean * mean;
  m.step_ = step;
  m.grid_max_ = grid_ceil_value(-mean * std::log(kTruncationMass), step);
  return m;
}

DemandModel DemandModel::poisson(double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("poisson demand requires mean > 0");
  if (mean > 500.0) throw std::invalid_argument("poisson mean above 500 is not supported");
  DemandModel m;
  m.kind_ = DemandKind::Poisson;
  m.mean_ = mean;
  m.variance_ = mean;
  m.step_ = 1.0;
  // Walk the tail until the survival mass drops below the truncation bound.
  double p = poisson_pmf0(mean);
  double cum = p;
  long long k = 0;
  while (1.0 - cum > kTruncationMass && k < 100000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cum += p;
  }
  m.grid_max_ = static_cast<double>(k);
  return m;
}

DemandModel DemandModel::finite(std::vector<double> values, std::vector<double> probs,
                                double step) {
  if (values.empty() || values.size() != probs.size())
    throw std::invalid_argument("finite demand requires matching nonempty values/probs");
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  DemandModel m;
  m.kind_ = DemandKind::Finite;
  m.step_ = step;
  double sum = 0.0;
  for (std::size_t i : order) {
    grid_index_checked(values[i], step, "finite demand support");
    if (probs[i] < 0.0) throw std::invalid_argument("finite demand probabilities must be >= 0");
    m.values_.push_back(values[i]);
    m.probs_.push_back(probs[i]);
    sum += probs[i];
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("finite demand probabilities must sum to 1 within 1e-12");
  double mean = 0.0, sq = 0.0, cum = 0.0;
  for (std::size_t i = 0; i < m.values_.size(); ++i) {
    mean += m.values_[i] * m.probs_[i];
    sq += m.values_[i] * m.values_[i] * m.probs_[i];
    cum += m.probs_[i];
    m.cum_.push_back(cum);
  }
  m.cum_.back() = 1.0;
  m.mean_ = mean;
  m.variance_ = std::max(0.0, sq - mean * mean);
  m.grid_max_ = m.values_.back();
  return m;
}

double DemandModel::cdf(double z) const {
  if (z < 0.0) throw std::invalid_argument("demand cdf requires z >= 0");
  switch (kind_) {
    case DemandKind::Exponential:
      return -std::expm1(-z / mean_);
    case DemandKind::Poisson: {
      const long long k = static_cast<long long>(std::floor(z + 1e-9));
      double p = poisson_pmf0(mean_);
      double cum = p;
      for (long long j = 1; j <= k; ++j) {
        p *= mean_ / static_cast<double>(j);
        cum += p;
      }
      return std::min(cum, 1.0);
    }
    case DemandKind::Finite: {
      double cum = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] <= z + 1e-9 * step_) cum = cum_[i];
      }
      return cum;
    }
  }
  return 0.0;
}

double DemandModel::survival(double z) const {
  if (z < 0.0) throw std::invalid_argument("demand survival requires z >= 0");
  switch (kind_) {
    case DemandKind::Exponential:
      return std::exp(-z / mean_);
    case DemandKind::Poisson: {
      // Sum the upper tail directly; terms decay geometrically past the mean.
      const long long k = static_cast<long long>(std::floor(z + 1e-9));
      double p = poisson_pmf0(mean_);
      for (long long j = 1; j <= k + 1; ++j) p *= mean_ / static_cast<double>(j);
      double tail = 0.0;
      long long j = k + 1;
      while (p > 1e-300) {
        tail += p;
        ++j;
        p *= mean_ / static_cast<double>(j);
        if (j > k + 2000000) break;
      }
      return std::min(tail, 1.0);
    }
    case DemandKind::Finite: {
      double tail = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] > z + 1e-9 * step_) tail += probs_[i];
      }
      return tail;
    }
  }
  return 0.0;
}

double DemandModel::quantile(double p) const {
  if (p < 0.0) throw std::invalid_argument("quantile requires p >= 0");
  if (p >= 1.0) throw std::invalid_argument("quantile is unbounded at p >= 1");
  switch (kind_) {
    case DemandKind::Exponential:
      return -mean_ * std::log1p(-p);
    case DemandKind::Poisson: {
      double pm = poisson_pmf0(mean_);
      double cum = pm;
      long long k = 0;
      while (cum < p - 1e-12 && k < 1000000) {
        ++k;
        pm *= mean_ / static_cast<double>(k);
        cum += pm;
      }
      return static_cast<double>(k);
    }
    case DemandKind::Finite: {
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (cum_[i] >= p - 1e-12) return values_[i];
      }
      return values_.back();
    }
  }
  return 0.0;
}

double DemandModel::sample(Rng& rng) const {
  switch (kind_) {
    case DemandKind::Exponential: {
      const double u = uniform01(rng);
      return -mean_ * std::log1p(-u);
    }
    case DemandKind::Poisson: {
      // Inversion by search; exact split into sub-draws keeps the pmf
      // recurrence well above underflow for large means.
      const int parts = std::max(1, static_cast<int>(std::ceil(mean_ / kPoissonSplitMean)));
      const double lam = mean_ / parts;
      long long total = 0;
      for (int i = 0; i < parts; ++i) {
        const double u = uniform01(rng);
        double p = poisson_pmf0(lam);
        double cum = p;
        long long k = 0;
        const long long cap =
            static_cast<long long>(lam + 12.0 * std::sqrt(lam + 1.0) + 100.0);
        while (u >= cum && k < cap) {
          ++k;
          p *= lam / static_cast<double>(k);
          cum += p;
        }
        total += k;
      }
      return static_cast<double>(total);
    }
    case DemandKind::Finite: {
      const double u = uniform01(rng);
      const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
      const std::size_t i = std::min(static_cast<std::size_t>(it - cum_.begin()),
                                     values_.size() - 1);
      return values_[i];
    }
  }
  return 0.0;
}

std::vector<double> DemandModel::cell_pmf_centered(std::size_t n) const {
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  if (kind_ == DemandKind::Exponential) {
    const double half = 0.5 * step_;
    out[0] = cdf(half);
    for (std::size_t k = 1; k < n; ++k) {
      const double lo = grid_value(static_cast<long long>(k), step_) - half;
      out[k] = std::exp(-lo / mean_) * -std::expm1(-step_ / mean_);
    }
    return out;
  }
  return cell_pmf_left(n, false);
}

std::vector<double> DemandModel::cell_pmf_left(std::size_t n, bool fold_tail) const {
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  switch (kind_) {
    case DemandKind::Exponential: {
      const double d = -std::expm1(-step_ / mean_);
      for (std::size_t k = 0; k < n; ++k)
        out[k] = std::exp(-grid_value(static_cast<long long>(k), step_) / mean_) * d;
      break;
    }
    case DemandKind::Poisson: {
      double p = poisson_pmf0(mean_);
      out[0] = p;
      for (std::size_t k = 1; k < n; ++k) {
        p *= mean_ / static_cast<double>(k);
        out[k] = p;
      }
      break;
    }
    case DemandKind::Finite: {
      for (std::size_t i = 0; i < values_.size(); ++i) {
        const auto idx = static_cast<std::size_t>(std::llround(values_[i] / step_));
        if (idx < n) out[idx] += probs_[i];
      }
      break;
    }
  }
  if (fold_tail) {
    double sum = 0.0;
    for (double v : out) sum += v;
    out[n - 1] += std::max(0.0, 1.0 - sum);
  }
  return out;
}

std::string DemandModel::id() const {
  switch (kind_) {
    case DemandKind::Exponential:
      return "exponential_" + fmt_num(mean_) + "_" + fmt_num(step_);
    case DemandKind::Poisson:
      return "poisson_" + fmt_num(mean_);
    case DemandKind::Finite: {
      std::size_t h = values_.size();
      auto mix = [&h](double v) {
        h ^= std::hash<double>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      };
      for (double v : values_) mix(v);
      for (double p : probs_) mix(p);
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%016zx", h);
      return "finite_" + std::string(buf) + "_" + fmt_num(step_);
    }
  }
  return "unknown";
}

}  // namespace perish
