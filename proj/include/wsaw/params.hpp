#pragma once

#include <stdexcept>
#include <string>

namespace wsaw {

/// Thrown when a configured node/sample budget is exhausted. Maps to a
/// distinct exit code in the CLI.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Model knobs shared by every operation: lattice dimension d, interaction
/// strength beta in [0,1], optional torus side r (r == 0 means Z^d), and the
/// walk length n.
struct ModelParams {
  int dim = 1;
  double beta = 0.0;
  int torus_r = 0;  // 0: Z^d ambient; >= 3: torus of side r
  int length = 0;

  bool torus() const { return torus_r > 0; }

  double volume() const {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= static_cast<double>(torus_r);
    return v;
  }

  void validate() const {
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (!(beta >= 0.0 && beta <= 1.0))
      throw std::invalid_argument("beta must lie in [0,1]");
    if (torus_r != 0 && torus_r < 3)
      throw std::invalid_argument("torus side r must be >= 3 (the walk lift is a bijection only for r >= 3)");
    if (length < 0) throw std::invalid_argument("length must be >= 0");
  }
};

}  // namespace wsaw
