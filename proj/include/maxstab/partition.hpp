#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace maxstab {

/// Largest dimension representable by a Partition (blocks are 64-bit masks).
inline constexpr int kMaxDim = 64;

/// Largest d for which all B_d partitions may be enumerated.
inline constexpr int kEnumerationCap = 14;

__extension__ typedef unsigned __int128 BigCount;

std::string to_string(BigCount value);

/// A set partition of {0,...,d-1} in canonical form.
///
/// Each block is stored as a bit mask; blocks are ordered by their smallest
/// element, which makes two partitions equal iff their block vectors are.
/// The text encoding is 1-based: "1,2|3,4|5".
class Partition {
 public:
  using Mask = std::uint64_t;

  /// Builds a partition from 0-based index sets. Throws ValidationError on
  /// overlapping blocks, missing or out-of-range indices, or empty blocks.
  static Partition from_blocks(const std::vector<std::vector<int>>& blocks, int d);
  static Partition from_masks(std::vector<Mask> masks, int d);
  /// labels[j] names the block of index j; any labelling is accepted.
  static Partition from_labels(std::span<const int> labels);
  static Partition single_block(int d);
  static Partition singletons(int d);
  /// Parses the 1-based "1,2|3" encoding.
  static Partition parse(std::string_view text);

  int dim() const { return d_; }
  int size() const { return static_cast<int>(blocks_.size()); }
  Mask block(int i) const { return blocks_[static_cast<std::size_t>(i)]; }
  const std::vector<Mask>& blocks() const { return blocks_; }
  int block_size(int i) const;
  std::vector<int> block_indices(int i) const;
  std::vector<int> block_sizes() const;
  /// Restricted growth string: label of each index, first occurrences ascending.
  std::vector<int> labels() const;

  bool is_singletons() const { return size() == d_; }

  std::string to_string() const;

  friend bool operator==(const Partition&, const Partition&) = default;
  friend std::strong_ordering operator<=>(const Partition& a, const Partition& b);

 private:
  Partition(std::vector<Mask> blocks, int d) : blocks_(std::move(blocks)), d_(d) {}

  std::vector<Mask> blocks_;
  int d_ = 0;
};

/// Iterates all partitions of {0,...,d-1} via restricted growth strings
/// without materialising the whole set.
class PartitionEnumerator {
 public:
  explicit PartitionEnumerator(int d);

  /// Writes the next partition to `out`; returns false once exhausted.
  bool next(Partition& out);

 private:
  int d_;
  std::vector<int> rgs_;
  std::vector<int> prefix_max_;
  bool started_ = false;
  bool done_ = false;
};

void for_each_partition(int d, const std::function<void(const Partition&)>& fn);
std::vector<Partition> enumerate_partitions(int d);

/// Exact B_d; CapacityError if it exceeds 128 bits.
BigCount bell_number(int d);
/// Exact {d,k}; DomainError unless 1 <= k <= d.
BigCount stirling2(int d, int k);

/// Every partition obtained from p by splitting exactly one block in two.
std::vector<Partition> split_block_refinements(const Partition& p);

/// Visits the refinements without building Partition objects: fn receives the
/// split block's position and the two non-empty halves.
void for_each_block_split(const Partition& p,
                          const std::function<void(int block, Partition::Mask part,
                                                   Partition::Mask rest)>& fn);

/// Sum over blocks of (2^{d_i-1} - 1).
std::uint64_t refinement_count(const Partition& p);

/// Groups columns of a row-major n x d block by the row attaining their
/// maximum. Ties go to the smallest row index.
Partition occurrence_partition(std::span<const double> rows, int n, int d);

/// n!/((n-d)! n^d); DomainError if d > n.
double ratio_exact(std::int64_t n, std::int64_t d);
/// exp(-d^2 / (2n)).
double ratio_approx(std::int64_t n, std::int64_t d);

}  // namespace maxstab
