#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

namespace fibcon::detail {

// Union by size with path halving; find() returns the smallest-size-stable root.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n = 0) { reset(n); }

    void reset(std::size_t n)
    {
        parent_.resize(n);
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
        size_.assign(n, 1);
        sets_ = n;
    }

    std::size_t add()
    {
        parent_.push_back(parent_.size());
        size_.push_back(1);
        ++sets_;
        return parent_.size() - 1;
    }

    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return false;
        if (size_[a] < size_[b])
            std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        --sets_;
        return true;
    }

    std::size_t size() const { return parent_.size(); }
    std::size_t set_count() const { return sets_; }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
    std::size_t sets_ = 0;
};

} // namespace fibcon::detail
