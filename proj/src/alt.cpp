#include "nonholo/alt.hpp"

#include <algorithm>
#include <memory>

namespace nonholo {

namespace {

IndexTable build_table(int n, int k) {
  IndexTable t;
  t.n = n;
  t.k = k;
  std::array<int, kMaxDegree> cur{};
  auto rec = [&](auto&& self, int pos, int start) -> void {
    if (pos == k) {
      t.idx.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur[pos] = i;
      self(self, pos + 1, i + 1);
    }
  };
  rec(rec, 0, 0);
  std::size_t total = 1;
  for (int i = 0; i < k; ++i) total *= static_cast<std::size_t>(n);
  t.rank.assign(total, -1);
  t.sign.assign(total, 0);
  std::array<int, kMaxDegree> tup{};
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (int p = k - 1; p >= 0; --p) {
      tup[p] = static_cast<int>(c % n);
      c /= n;
    }
    int sgn = 1;
    std::array<int, kMaxDegree> s = tup;
    bool repeat = false;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j + 1 < k - i; ++j) {
        if (s[j] == s[j + 1]) repeat = true;
        if (s[j] > s[j + 1]) {
          std::swap(s[j], s[j + 1]);
          sgn = -sgn;
        }
      }
    if (repeat) continue;
    const auto it = std::lower_bound(t.idx.begin(), t.idx.end(), s, [k](const auto& a, const auto& b) {
      return std::lexicographical_compare(a.begin(), a.begin() + k, b.begin(), b.begin() + k);
    });
    t.rank[code] = static_cast<int>(it - t.idx.begin());
    t.sign[code] = sgn;
  }
  return t;
}

struct Tables {
  std::unique_ptr<IndexTable> t[kMaxDim + 1][kMaxDegree + 1];
  Tables() {
    for (int n = 0; n <= kMaxDim; ++n)
      for (int k = 0; k <= kMaxDegree; ++k) t[n][k] = std::make_unique<IndexTable>(build_table(n, k));
  }
};

}  // namespace

const IndexTable& index_table(int n, int k) {
  static const Tables tables;
  if (n < 0 || n > kMaxDim || k < 0 || k > kMaxDegree) throw std::out_of_range("index_table: unsupported dimension or degree");
  return *tables.t[n][k];
}

SignedSlot slot_of(int n, const int* tuple, int k) {
  const IndexTable& t = index_table(n, k);
  std::size_t code = 0;
  for (int p = 0; p < k; ++p) code = code * n + static_cast<std::size_t>(tuple[p]);
  return {t.sign[code], t.rank[code]};
}

}  // namespace nonholo
