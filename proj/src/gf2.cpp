#include "hfe/gf2.hpp"

#include <stdexcept>
#include <utility>

namespace hfe {

Gf2System::Gf2System(int unknowns) : unknowns_(unknowns), words_((unknowns + 63) / 64) {
  if (unknowns < 0) throw std::invalid_argument("Gf2System: negative unknown count");
}

void Gf2System::add_equation(const std::vector<int>& vars, bool rhs) {
  std::vector<std::uint64_t> row(static_cast<std::size_t>(words_), 0);
  for (int v : vars) {
    if (v < 0 || v >= unknowns_) throw std::out_of_range("Gf2System: variable out of range");
    row[static_cast<std::size_t>(v / 64)] ^= std::uint64_t{1} << (v % 64);
  }
  rows_.push_back(std::move(row));
  rhs_.push_back(rhs ? 1 : 0);
}

Gf2System::Result Gf2System::solve() const {
  auto rows = rows_;
  auto rhs = rhs_;
  const int m = equations();
  std::vector<int> pivot_col;
  int r = 0;
  for (int col = 0; col < unknowns_ && r < m; ++col) {
    const std::size_t w = static_cast<std::size_t>(col / 64);
    const std::uint64_t bit = std::uint64_t{1} << (col % 64);
    int p = r;
    while (p < m && !(rows[p][w] & bit)) ++p;
    if (p == m) continue;
    std::swap(rows[p], rows[r]);
    std::swap(rhs[p], rhs[r]);
    for (int i = 0; i < m; ++i) {
      if (i != r && (rows[i][w] & bit)) {
        for (int j = 0; j < words_; ++j) rows[i][j] ^= rows[r][j];
        rhs[i] ^= rhs[r];
      }
    }
    pivot_col.push_back(col);
    ++r;
  }
  Result out;
  out.rank = r;
  // Rows below the rank are zero; a nonzero right-hand side there is a contradiction.
  for (int i = r; i < m; ++i) {
    if (rhs[i]) return out;
  }
  out.feasible = true;
  out.x.assign(static_cast<std::size_t>(unknowns_), 0);
  for (int i = 0; i < r; ++i) out.x[static_cast<std::size_t>(pivot_col[i])] = rhs[i];
  return out;
}

}  // namespace hfe
