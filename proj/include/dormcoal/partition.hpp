#ifndef DORMCOAL_PARTITION_HPP
#define DORMCOAL_PARTITION_HPP

#include <string>
#include <vector>

namespace dormcoal {

// Partition of {1..n}, stored canonically: every block sorted ascending, blocks
// ordered by least element. Canonical form is unique for a given set partition,
// so trajectories can be compared exactly in golden tests.
class Partition {
  public:
    Partition() = default;

    static Partition singletons(int n);
    // Validates that `blocks` partitions {1..n}, then canonicalizes.
    static Partition from_blocks(int n, std::vector<std::vector<int>> blocks);

    int leaf_count() const { return n_; }
    int block_count() const { return int(blocks_.size()); }
    bool single_block() const { return blocks_.size() == 1; }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }

    // Merge the named blocks: each merge set holds indices (0-based) into
    // blocks(); sets must be pairwise disjoint and in range. Blocks not named
    // are carried over unchanged; the result is canonical.
    Partition merge_blocks(const std::vector<std::vector<int>>& merge_sets) const;

    bool operator==(const Partition&) const = default;

    // "{1,3}{2}" style rendering for logs and golden files.
    std::string str() const;

  private:
    int n_ = 0;
    std::vector<std::vector<int>> blocks_;
    void canonicalize();
};

}  // namespace dormcoal

#endif
