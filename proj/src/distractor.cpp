#include "reoi/distractor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "reoi/kernels.hpp"
#include "reoi/ssim.hpp"

namespace reoi::distractor {

std::array<int, 3> quantize(const Rgb& c) {
    auto q = [](float v) {
        int level = int(std::floor(std::clamp(v, 0.f, 1.f) * kQuantLevels));
        return std::min(level, kQuantLevels - 1);
    };
    return {q(c[0]), q(c[1]), q(c[2])};
}

std::vector<Segment> segment(const Frame& frame, int min_area) {
    const int h = frame.h, w = frame.w;
    const auto bg = quantize(sim::kBackground);
    const auto grip = quantize(sim::kGripperColor);

    std::vector<std::array<int, 3>> q(size_t(h) * w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) q[size_t(r) * w + c] = quantize(frame.rgb(r, c));

    std::vector<int> comp(size_t(h) * w, -1);
    std::vector<Segment> segs;
    std::vector<size_t> stack;

    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            size_t i = size_t(r) * w + c;
            if (comp[i] >= 0 || q[i] == bg || q[i] == grip) continue;

            int id = int(segs.size());
            Segment s;
            s.mask = Mask(h, w);
            double sum[3] = {0, 0, 0};
            stack.assign(1, i);
            comp[i] = id;
            while (!stack.empty()) {
                size_t p = stack.back();
                stack.pop_back();
                int pr = int(p / w), pc = int(p % w);
                s.mask.at(pr, pc) = 1;
                ++s.area;
                for (int ch = 0; ch < 3; ++ch) sum[ch] += frame.at(pr, pc, ch);
                const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
                for (int k = 0; k < 4; ++k) {
                    int nr = pr + dr[k], nc = pc + dc[k];
                    if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                    size_t ni = size_t(nr) * w + nc;
                    if (comp[ni] >= 0 || q[ni] != q[i]) continue;
                    comp[ni] = id;
                    stack.push_back(ni);
                }
            }
            s.mean_color = {float(sum[0] / s.area), float(sum[1] / s.area), float(sum[2] / s.area)};
            s.bbox = mask_bbox(s.mask);
            segs.push_back(std::move(s));
        }

    std::erase_if(segs, [&](const Segment& s) { return s.area < min_area; });
    std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) {
        return std::pair(a.bbox.r0, a.bbox.c0) < std::pair(b.bbox.r0, b.bbox.c0);
    });
    for (size_t i = 0; i < segs.size(); ++i) segs[i].id = int(i) + 1;
    return segs;
}

Mask gripper_color_mask(const Frame& frame) {
    Mask m(frame.h, frame.w);
    for (int r = 0; r < frame.h; ++r)
        for (int c = 0; c < frame.w; ++c) {
            Rgb p = frame.rgb(r, c);
            float lum = (p[0] + p[1] + p[2]) / 3.f;
            float sat = std::max({std::fabs(p[0] - lum), std::fabs(p[1] - lum),
                                  std::fabs(p[2] - lum)});
            if (lum < 0.5f && sat < 0.1f) m.at(r, c) = 1;
        }
    return m;
}

sim::ActionPlan safety_check_plan(const sim::TaskSpec&) {
    return sim::ActionPlan(6, sim::Action{0, 0, 0});
}

double persistence_score(const Segment& seg, const Frame& frame0, const Frame& frameK) {
    double s = metrics::masked_ssim(frame0, frameK, seg.mask, 2);
    return std::clamp(s, 0.0, 1.0);
}

IdentificationReport identify(const wm::WorldModel& model, const Frame& frame0,
                              const sim::TaskSpec& task, double tau) {
    sim::ActionPlan plan = safety_check_plan(task);
    if (int(plan.size()) < kCheckFrameIndex)
        throw std::runtime_error("identify: safety-check rollout shorter than check frame");
    std::vector<Frame> predicted = wm::rollout(model, frame0, {}, plan);
    const Frame& check = predicted[kCheckFrameIndex - 1];

    IdentificationReport rep;
    rep.segments = segment(frame0);
    rep.check_frame_index = kCheckFrameIndex;

    Mask gripper = gripper_color_mask(frame0).dilated(2);
    const Rgb container_color = sim::training_palette()[sim::kContainerColorIndex];

    for (const Segment& s : rep.segments) {
        double score = persistence_score(s, frame0, check);
        rep.scores.push_back(score);
        if (score >= tau) continue;
        if (s.mask.intersects(gripper)) continue;                       // robot itself
        if (rgb_dist(s.mean_color, task.target_color) < 0.15f) continue;  // task target
        if (rgb_dist(s.mean_color, container_color) < 0.15f) continue;    // goal container
        rep.flagged.push_back(s.id);
    }
    return rep;
}

Frame inpaint(const Frame& frame, const Mask& mask) {
    if (mask.h != frame.h || mask.w != frame.w)
        throw std::invalid_argument("inpaint: mask shape mismatch");
    if (!mask.any()) return frame;
    if (mask.all()) throw std::invalid_argument("inpaint: mask covers the whole frame");

    // Initialize the masked region to the mean of the 1-px outer boundary.
    double bsum[3] = {0, 0, 0};
    int bcount = 0;
    for (int r = 0; r < frame.h; ++r)
        for (int c = 0; c < frame.w; ++c) {
            if (mask.at(r, c)) continue;
            const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
            bool boundary = false;
            for (int k = 0; k < 4 && !boundary; ++k) {
                int nr = r + dr[k], nc = c + dc[k];
                boundary = nr >= 0 && nr < frame.h && nc >= 0 && nc < frame.w && mask.at(nr, nc);
            }
            if (!boundary) continue;
            ++bcount;
            for (int ch = 0; ch < 3; ++ch) bsum[ch] += frame.at(r, c, ch);
        }

    Frame cur = frame;
    if (bcount > 0) {
        Rgb init = {float(bsum[0] / bcount), float(bsum[1] / bcount), float(bsum[2] / bcount)};
        for (int r = 0; r < frame.h; ++r)
            for (int c = 0; c < frame.w; ++c)
                if (mask.at(r, c)) cur.set(r, c, init);
    }

    Frame next = cur;
    for (int it = 0; it < 500; ++it) {
        float change = kernels::jacobi_fill_step(cur, next, mask);
        std::swap(cur, next);
        if (change < 1e-4f) break;
    }
    return cur;
}

}  // namespace reoi::distractor
