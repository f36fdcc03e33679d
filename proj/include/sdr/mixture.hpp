#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sdr/errors.hpp"
#include "sdr/linalg.hpp"

namespace sdr {

// One population: prior weight, mean, covariance.
struct GaussianComponent {
  double weight;
  Vec mean;
  SpdMatrix cov;

  GaussianComponent(double w, Vec mu, SpdMatrix sigma)
      : weight(w), mean(std::move(mu)), cov(std::move(sigma)) {}
};

// Ground-truth mixture over H populations; weights sum to 1.
struct GaussianMixtureSpec {
  std::vector<GaussianComponent> components;

  std::size_t h() const { return components.size(); }
  std::size_t p() const { return components.empty() ? 0 : components.front().mean.size(); }

  // weights positive and summing to 1 (1e-12), consistent dimensions
  void validate() const {
    if (components.empty()) throw ConfigError("mixture has no components");
    const std::size_t dim = p();
    double total = 0.0;
    for (std::size_t i = 0; i < components.size(); ++i) {
      const GaussianComponent& c = components[i];
      if (!(c.weight > 0.0))
        throw ConfigError("component " + std::to_string(i + 1) + " weight must be positive");
      if (c.mean.size() != dim || c.cov.dim() != dim)
        throw ShapeMismatch("component " + std::to_string(i + 1) + " dimension mismatch");
      total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("mixture weights must sum to 1");
  }
};

}  // namespace sdr
