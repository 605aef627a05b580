#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace hfe {

/// A linear system over GF(2) with bit-packed rows.
class Gf2System {
 public:
  explicit Gf2System(int unknowns);

  /// Adds sum_{v in vars} x_v = rhs. Repeated variables cancel.
  void add_equation(const std::vector<int>& vars, bool rhs);

  int unknowns() const { return unknowns_; }
  int equations() const { return static_cast<int>(rhs_.size()); }

  struct Result {
    bool feasible = false;
    int rank = 0;
    std::vector<std::uint8_t> x;  // a solution with free variables set to 0
  };

  /// Gaussian elimination; the system itself is left untouched.
  Result solve() const;

 private:
  int unknowns_;
  int words_;
  std::vector<std::vector<std::uint64_t>> rows_;
  std::vector<std::uint8_t> rhs_;
};

}  // namespace hfe
