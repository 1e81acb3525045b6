#include "maxstab/partition.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <map>

#include "maxstab/errors.hpp"

namespace maxstab {

namespace {

using Mask = Partition::Mask;

Mask full_mask(int d) { return d == 64 ? ~Mask{0} : ((Mask{1} << d) - 1); }

void sort_blocks(std::vector<Mask>& blocks) {
  std::sort(blocks.begin(), blocks.end(),
            [](Mask a, Mask b) { return std::countr_zero(a) < std::countr_zero(b); });
}

void check_dim(int d) {
  if (d < 1 || d > kMaxDim) {
    throw ValidationError("partition dimension must lie in [1, 64], got " + std::to_string(d));
  }
}

BigCount checked_add(BigCount a, BigCount b) {
  BigCount r;
  if (__builtin_add_overflow(a, b, &r)) throw CapacityError("count exceeds 128-bit range");
  return r;
}

BigCount checked_mul(BigCount a, BigCount b) {
  BigCount r;
  if (__builtin_mul_overflow(a, b, &r)) throw CapacityError("count exceeds 128-bit range");
  return r;
}

}  // namespace

std::string to_string(BigCount value) {
  if (value == 0) return "0";
  std::string out;
  while (value > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

Partition Partition::from_masks(std::vector<Mask> masks, int d) {
  check_dim(d);
  Mask seen = 0;
  for (Mask m : masks) {
    if (m == 0) throw ValidationError("partition has an empty block");
    if ((m & ~full_mask(d)) != 0) throw ValidationError("block index outside {1..d}");
    if ((seen & m) != 0) throw ValidationError("partition blocks overlap");
    seen |= m;
  }
  if (seen != full_mask(d)) throw ValidationError("partition does not cover every index");
  sort_blocks(masks);
  return Partition(std::move(masks), d);
}

Partition Partition::from_blocks(const std::vector<std::vector<int>>& blocks, int d) {
  check_dim(d);
  std::vector<Mask> masks;
  masks.reserve(blocks.size());
  for (const auto& block : blocks) {
    Mask m = 0;
    for (int j : block) {
      if (j < 0 || j >= d) throw ValidationError("block index outside {1..d}");
      const Mask bit = Mask{1} << j;
      if ((m & bit) != 0) throw ValidationError("repeated index within a block");
      m |= bit;
    }
    masks.push_back(m);
  }
  return from_masks(std::move(masks), d);
}

Partition Partition::from_labels(std::span<const int> labels) {
  const int d = static_cast<int>(labels.size());
  check_dim(d);
  std::map<int, std::size_t> slot;
  std::vector<Mask> masks;
  for (int j = 0; j < d; ++j) {
    auto [it, inserted] = slot.try_emplace(labels[static_cast<std::size_t>(j)], masks.size());
    if (inserted) masks.push_back(0);
    masks[it->second] |= Mask{1} << j;
  }
  // First-occurrence order is already ascending in the smallest element.
  return Partition(std::move(masks), d);
}

Partition Partition::single_block(int d) {
  check_dim(d);
  return Partition({full_mask(d)}, d);
}

Partition Partition::singletons(int d) {
  check_dim(d);
  std::vector<Mask> masks(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) masks[static_cast<std::size_t>(j)] = Mask{1} << j;
  return Partition(std::move(masks), d);
}

Partition Partition::parse(std::string_view text) {
  std::vector<std::vector<int>> blocks(1);
  int max_index = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find_first_of(",|", pos);
    const std::string_view token = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    int value = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || res.ec != std::errc{} || res.ptr != token.data() + token.size() || value < 1) {
      throw ValidationError("malformed partition string: '" + std::string(text) + "'");
    }
    blocks.back().push_back(value - 1);
    max_index = std::max(max_index, value);
    if (end == std::string_view::npos) break;
    if (text[end] == '|') blocks.emplace_back();
    pos = end + 1;
  }
  return from_blocks(blocks, max_index);
}

int Partition::block_size(int i) const { return std::popcount(block(i)); }

std::vector<int> Partition::block_indices(int i) const {
  std::vector<int> out;
  for (Mask m = block(i); m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

std::vector<int> Partition::block_sizes() const {
  std::vector<int> out;
  out.reserve(blocks_.size());
  for (Mask m : blocks_) out.push_back(std::popcount(m));
  return out;
}

std::vector<int> Partition::labels() const {
  std::vector<int> out(static_cast<std::size_t>(d_));
  for (int b = 0; b < size(); ++b) {
    for (Mask m = block(b); m != 0; m &= m - 1) out[static_cast<std::size_t>(std::countr_zero(m))] = b;
  }
  return out;
}

std::string Partition::to_string() const {
  std::string out;
  for (int b = 0; b < size(); ++b) {
    if (b > 0) out.push_back('|');
    bool first = true;
    for (int j : block_indices(b)) {
      if (!first) out.push_back(',');
      out += std::to_string(j + 1);
      first = false;
    }
  }
  return out;
}

std::strong_ordering operator<=>(const Partition& a, const Partition& b) {
  if (auto c = a.d_ <=> b.d_; c != 0) return c;
  return a.blocks_ <=> b.blocks_;
}

PartitionEnumerator::PartitionEnumerator(int d) : d_(d) {
  if (d < 1) throw ValidationError("enumeration needs d >= 1");
  if (d > kEnumerationCap) {
    throw CapacityError("full partition enumeration is capped at d = " + std::to_string(kEnumerationCap));
  }
  rgs_.assign(static_cast<std::size_t>(d), 0);
  prefix_max_.assign(static_cast<std::size_t>(d), 0);
}

bool PartitionEnumerator::next(Partition& out) {
  if (done_) return false;
  if (started_) {
    // Rightmost position that can still grow: a[i] <= max(a[0..i-1]).
    int i = d_ - 1;
    while (i >= 1 && rgs_[static_cast<std::size_t>(i)] > prefix_max_[static_cast<std::size_t>(i - 1)]) --i;
    if (i < 1) {
      done_ = true;
      return false;
    }
    auto ui = static_cast<std::size_t>(i);
    ++rgs_[ui];
    prefix_max_[ui] = std::max(prefix_max_[ui - 1], rgs_[ui]);
    for (std::size_t k = ui + 1; k < rgs_.size(); ++k) {
      rgs_[k] = 0;
      prefix_max_[k] = prefix_max_[ui];
    }
  }
  started_ = true;
  out = Partition::from_labels(rgs_);
  return true;
}

void for_each_partition(int d, const std::function<void(const Partition&)>& fn) {
  PartitionEnumerator it(d);
  Partition p = Partition::single_block(d);
  while (it.next(p)) fn(p);
}

std::vector<Partition> enumerate_partitions(int d) {
  std::vector<Partition> out;
  for_each_partition(d, [&](const Partition& p) { out.push_back(p); });
  return out;
}

BigCount bell_number(int d) {
  if (d < 1) throw DomainError("bell_number needs d >= 1");
  // Bell triangle: each row starts with the last entry of the previous row.
  std::vector<BigCount> row{1};
  for (int i = 1; i < d; ++i) {
    std::vector<BigCount> next{row.back()};
    next.reserve(row.size() + 1);
    for (BigCount v : row) next.push_back(checked_add(next.back(), v));
    row = std::move(next);
  }
  return row.back();
}

BigCount stirling2(int d, int k) {
  if (d < 1 || k < 1 || k > d) throw DomainError("stirling2 needs 1 <= k <= d");
  std::vector<BigCount> s(static_cast<std::size_t>(k) + 1, 0);
  s[0] = 1;
  for (int i = 1; i <= d; ++i) {
    for (int j = std::min(i, k); j >= 1; --j) {
      auto uj = static_cast<std::size_t>(j);
      s[uj] = checked_add(checked_mul(static_cast<BigCount>(j), s[uj]), s[uj - 1]);
    }
    s[0] = 0;
  }
  return s[static_cast<std::size_t>(k)];
}

void for_each_block_split(const Partition& p,
                          const std::function<void(int, Partition::Mask, Partition::Mask)>& fn) {
  for (int b = 0; b < p.size(); ++b) {
    const Mask block = p.block(b);
    const Mask low = block & (~block + 1);
    const Mask others = block ^ low;
    if (others == 0) continue;
    // Halves containing the smallest element, excluding the whole block.
    for (Mask sub = (others - 1) & others;; sub = (sub - 1) & others) {
      fn(b, low | sub, others ^ sub);
      if (sub == 0) break;
    }
  }
}

std::vector<Partition> split_block_refinements(const Partition& p) {
  std::vector<Partition> out;
  out.reserve(static_cast<std::size_t>(refinement_count(p)));
  for_each_block_split(p, [&](int b, Mask part, Mask rest) {
    std::vector<Mask> masks = p.blocks();
    masks[static_cast<std::size_t>(b)] = part;
    masks.push_back(rest);
    out.push_back(Partition::from_masks(std::move(masks), p.dim()));
  });
  return out;
}

std::uint64_t refinement_count(const Partition& p) {
  std::uint64_t total = 0;
  for (int s : p.block_sizes()) total += (std::uint64_t{1} << (s - 1)) - 1;
  return total;
}

Partition occurrence_partition(std::span<const double> rows, int n, int d) {
  if (n < 1 || d < 1) throw ValidationError("occurrence_partition needs n >= 1 and d >= 1");
  if (rows.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(d)) {
    throw ValidationError("block size does not match n * d");
  }
  std::vector<int> argmax(static_cast<std::size_t>(d), 0);
  for (int i = 0; i < n; ++i) {
    const auto row = rows.subspan(static_cast<std::size_t>(i) * static_cast<std::size_t>(d),
                                  static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      if (!std::isfinite(row[uj])) throw ValidationError("non-finite entry in block");
      if (row[uj] > rows[static_cast<std::size_t>(argmax[uj]) * static_cast<std::size_t>(d) + uj]) {
        argmax[uj] = i;
      }
    }
  }
  return Partition::from_labels(argmax);
}

double ratio_exact(std::int64_t n, std::int64_t d) {
  if (n < 1 || d < 1) throw DomainError("ratio_exact needs n >= 1 and d >= 1");
  if (d > n) throw DomainError("ratio_exact: d > n, every configuration repeats a vector");
  double log_ratio = 0.0;
  const double nn = static_cast<double>(n);
  for (std::int64_t k = 1; k < d; ++k) log_ratio += std::log1p(-static_cast<double>(k) / nn);
  return std::exp(log_ratio);
}

double ratio_approx(std::int64_t n, std::int64_t d) {
  if (n < 1 || d < 1) throw DomainError("ratio_approx needs n >= 1 and d >= 1");
  const double dd = static_cast<double>(d);
  return std::exp(-dd * dd / (2.0 * static_cast<double>(n)));
}

}  // namespace maxstab
