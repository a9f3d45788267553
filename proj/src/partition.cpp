#include "dormcoal/partition.hpp"

#include <algorithm>
#include <stdexcept>

namespace dormcoal {

void Partition::canonicalize() {
    for (auto& b : blocks_) std::sort(b.begin(), b.end());
    std::sort(blocks_.begin(), blocks_.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

Partition Partition::singletons(int n) {
    if (n < 0) throw std::invalid_argument("Partition: n must be >= 0");
    Partition p;
    p.n_ = n;
    p.blocks_.reserve(n);
    for (int i = 1; i <= n; ++i) p.blocks_.push_back({i});
    return p;
}

Partition Partition::from_blocks(int n, std::vector<std::vector<int>> blocks) {
    Partition p;
    p.n_ = n;
    p.blocks_ = std::move(blocks);
    std::vector<char> seen(std::size_t(n) + 1, 0);
    std::size_t count = 0;
    for (const auto& b : p.blocks_) {
        if (b.empty()) throw std::invalid_argument("Partition: empty block");
        for (int e : b) {
            if (e < 1 || e > n) throw std::invalid_argument("Partition: element out of range");
            if (seen[e]) throw std::invalid_argument("Partition: duplicate element");
            seen[e] = 1;
            ++count;
        }
    }
    if (count != std::size_t(n)) throw std::invalid_argument("Partition: union is not {1..n}");
    p.canonicalize();
    return p;
}

Partition Partition::merge_blocks(const std::vector<std::vector<int>>& merge_sets) const {
    std::vector<int> owner(blocks_.size(), -1);
    for (std::size_t s = 0; s < merge_sets.size(); ++s) {
        for (int idx : merge_sets[s]) {
            if (idx < 0 || std::size_t(idx) >= blocks_.size())
                throw std::invalid_argument("merge_blocks: block index out of range");
            if (owner[idx] != -1)
                throw std::invalid_argument("merge_blocks: overlapping merge sets");
            owner[idx] = int(s);
        }
    }
    Partition out;
    out.n_ = n_;
    std::vector<std::vector<int>> merged(merge_sets.size());
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        if (owner[i] == -1) {
            out.blocks_.push_back(blocks_[i]);
        } else {
            auto& dst = merged[owner[i]];
            dst.insert(dst.end(), blocks_[i].begin(), blocks_[i].end());
        }
    }
    for (auto& b : merged)
        if (!b.empty()) out.blocks_.push_back(std::move(b));
    out.canonicalize();
    return out;
}

std::string Partition::str() const {
    std::string s;
    for (const auto& b : blocks_) {
        s += '{';
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(b[i]);
        }
        s += '}';
    }
    return s;
}

}  // namespace dormcoal
