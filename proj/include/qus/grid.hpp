#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qus {

/// Dense 2D array indexed as (scanline, depth sample), scanline-major storage.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(std::size_t lines, std::size_t depth, T fill = T{})
        : lines_(lines), depth_(depth), data_(lines * depth, fill) {}

    std::size_t lines() const noexcept { return lines_; }
    std::size_t depth() const noexcept { return depth_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t line, std::size_t sample) {
        assert(line < lines_ && sample < depth_);
        return data_[line * depth_ + sample];
    }
    const T& operator()(std::size_t line, std::size_t sample) const {
        assert(line < lines_ && sample < depth_);
        return data_[line * depth_ + sample];
    }

    std::span<T> line(std::size_t i) { return {data_.data() + i * depth_, depth_}; }
    std::span<const T> line(std::size_t i) const { return {data_.data() + i * depth_, depth_}; }

    std::vector<T>& data() noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

    template <typename U>
    bool same_shape(const Grid<U>& other) const noexcept {
        return lines_ == other.lines() && depth_ == other.depth();
    }

    bool operator==(const Grid&) const = default;

private:
    std::size_t lines_ = 0;
    std::size_t depth_ = 0;
    std::vector<T> data_;
};

using BinaryImage = Grid<std::uint8_t>;

}  // namespace qus
