#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace reoi {

using Rgb = std::array<float, 3>;

inline float rgb_dist(const Rgb& a, const Rgb& b) {
    float d0 = a[0] - b[0], d1 = a[1] - b[1], d2 = a[2] - b[2];
    return std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
}

inline float rgb_linf(const Rgb& a, const Rgb& b) {
    return std::max({std::fabs(a[0] - b[0]), std::fabs(a[1] - b[1]), std::fabs(a[2] - b[2])});
}

/// Half-open pixel rectangle: rows [r0,r1), cols [c0,c1).
struct Rect {
    int r0 = 0, c0 = 0, r1 = 0, c1 = 0;

    int height() const { return r1 - r0; }
    int width() const { return c1 - c0; }
    int area() const { return std::max(0, height()) * std::max(0, width()); }
    bool empty() const { return r1 <= r0 || c1 <= c0; }
    bool contains(int r, int c) const { return r >= r0 && r < r1 && c >= c0 && c < c1; }

    Rect dilated(int k) const { return {r0 - k, c0 - k, r1 + k, c1 + k}; }
    Rect clamped(int h, int w) const {
        return {std::max(0, r0), std::max(0, c0), std::min(h, r1), std::min(w, c1)};
    }
    bool intersects(const Rect& o) const {
        return r0 < o.r1 && o.r0 < r1 && c0 < o.c1 && o.c0 < c1;
    }
    bool operator==(const Rect& o) const = default;
};

/// RGB image with unit-interval intensities, row-major (row, col, channel).
struct Frame {
    int h = 0, w = 0;
    std::vector<float> px;

    Frame() = default;
    Frame(int h_, int w_, float fill = 0.f) : h(h_), w(w_), px(size_t(h_) * w_ * 3, fill) {}

    float& at(int r, int c, int ch) { return px[(size_t(r) * w + c) * 3 + ch]; }
    float at(int r, int c, int ch) const { return px[(size_t(r) * w + c) * 3 + ch]; }

    Rgb rgb(int r, int c) const { return {at(r, c, 0), at(r, c, 1), at(r, c, 2)}; }
    void set(int r, int c, const Rgb& v) {
        at(r, c, 0) = v[0];
        at(r, c, 1) = v[1];
        at(r, c, 2) = v[2];
    }

    bool same_shape(const Frame& o) const { return h == o.h && w == o.w; }
    bool operator==(const Frame& o) const { return h == o.h && w == o.w && px == o.px; }
};

/// Boolean pixel mask.
struct Mask {
    int h = 0, w = 0;
    std::vector<uint8_t> m;

    Mask() = default;
    Mask(int h_, int w_, bool fill = false) : h(h_), w(w_), m(size_t(h_) * w_, fill ? 1 : 0) {}

    uint8_t& at(int r, int c) { return m[size_t(r) * w + c]; }
    uint8_t at(int r, int c) const { return m[size_t(r) * w + c]; }

    int count() const {
        int n = 0;
        for (uint8_t v : m) n += v != 0;
        return n;
    }
    bool any() const {
        for (uint8_t v : m)
            if (v) return true;
        return false;
    }
    bool all() const {
        for (uint8_t v : m)
            if (!v) return false;
        return true;
    }

    /// Chebyshev dilation by k pixels.
    Mask dilated(int k) const {
        Mask out(h, w);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                if (!at(r, c)) continue;
                for (int dr = -k; dr <= k; ++dr)
                    for (int dc = -k; dc <= k; ++dc) {
                        int rr = r + dr, cc = c + dc;
                        if (rr >= 0 && rr < h && cc >= 0 && cc < w) out.at(rr, cc) = 1;
                    }
            }
        return out;
    }

    bool intersects(const Mask& o) const {
        for (size_t i = 0; i < m.size(); ++i)
            if (m[i] && o.m[i]) return true;
        return false;
    }

    bool operator==(const Mask& o) const { return h == o.h && w == o.w && m == o.m; }
};

inline Mask mask_union(const Mask& a, const Mask& b) {
    Mask out = a;
    for (size_t i = 0; i < out.m.size(); ++i) out.m[i] = out.m[i] || b.m[i];
    return out;
}

/// Tight bounding box of set pixels; empty Rect if the mask is empty.
inline Rect mask_bbox(const Mask& m) {
    int r0 = m.h, c0 = m.w, r1 = 0, c1 = 0;
    bool found = false;
    for (int r = 0; r < m.h; ++r)
        for (int c = 0; c < m.w; ++c)
            if (m.at(r, c)) {
                found = true;
                r0 = std::min(r0, r);
                c0 = std::min(c0, c);
                r1 = std::max(r1, r + 1);
                c1 = std::max(c1, c + 1);
            }
    if (!found) return {};
    return {r0, c0, r1, c1};
}

}  // namespace reoi
