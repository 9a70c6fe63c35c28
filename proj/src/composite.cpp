#include "reoi/composite.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace reoi::composite {

double assign_depth(const Segment& seg, DepthSource source,
                    const std::vector<int32_t>* depth_map, int h, int w) {
    if (!seg.mask.any()) throw std::invalid_argument("assign_depth: empty mask");
    const int row_max = seg.bbox.r1 - 1;  // bottom edge: lower in image = closer
    double key = double(row_max) / h;

    if (source == DepthSource::initial_obs && depth_map) {
        std::vector<int32_t> ranks;
        int32_t max_rank = 0;
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                int32_t v = (*depth_map)[size_t(r) * w + c];
                max_rank = std::max(max_rank, v);
                if (seg.mask.at(r, c) && v > 0) ranks.push_back(v);
            }
        if (!ranks.empty() && max_rank > 0) {
            std::sort(ranks.begin(), ranks.end());
            double median = ranks[ranks.size() / 2];
            // Tie-break strictly below the 1/h row quantum.
            key += (median / (max_rank + 1.0)) * (0.5 / h);
        }
    }
    return key;
}

LayerStack decompose(const Frame& frame) {
    LayerStack stack;
    Mask all(frame.h, frame.w);

    for (const Segment& seg : distractor::segment(frame)) {
        Layer layer;
        layer.mask = seg.mask;
        layer.pixels = frame;
        layer.depth_key = assign_depth(seg, DepthSource::predicted_frame, nullptr, frame.h, frame.w);
        all = mask_union(all, layer.mask);
        stack.layers.push_back(std::move(layer));
    }

    Mask gripper = distractor::gripper_color_mask(frame);
    if (gripper.any()) {
        Segment pseudo;
        pseudo.mask = gripper;
        pseudo.bbox = mask_bbox(gripper);
        Layer layer;
        layer.mask = gripper;
        layer.pixels = frame;
        layer.depth_key =
            assign_depth(pseudo, DepthSource::predicted_frame, nullptr, frame.h, frame.w);
        all = mask_union(all, gripper);
        stack.layers.push_back(std::move(layer));
    }

    stack.background = all.any() ? distractor::inpaint(frame, all) : frame;
    return stack;
}

Frame composite(const LayerStack& stack) {
    Frame out = stack.background;
    std::vector<size_t> order(stack.layers.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return stack.layers[a].depth_key < stack.layers[b].depth_key;
    });
    for (size_t idx : order) {
        const Layer& layer = stack.layers[idx];
        for (int r = 0; r < out.h; ++r)
            for (int c = 0; c < out.w; ++c)
                if (layer.mask.at(r, c)) out.set(r, c, layer.pixels.rgb(r, c));
    }
    return out;
}

std::vector<Frame> reinsert(const std::vector<Frame>& predicted,
                            const std::vector<Layer>& distractor_layers) {
    std::vector<Frame> out;
    out.reserve(predicted.size());
    for (const Frame& f : predicted) {
        for (const Layer& l : distractor_layers)
            if (l.mask.h != f.h || l.mask.w != f.w)
                throw std::invalid_argument("reinsert: layer shape mismatch");
        LayerStack stack = decompose(f);
        for (const Layer& l : distractor_layers) stack.layers.push_back(l);
        out.push_back(composite(stack));
    }
    return out;
}

std::vector<Layer> extract_layers(const Frame& frame, const distractor::IdentificationReport& rep,
                                  const std::vector<int32_t>* depth_map) {
    std::vector<Layer> layers;
    for (int id : rep.flagged) {
        const Segment* seg = rep.find(id);
        if (!seg) continue;
        Layer layer;
        layer.mask = seg->mask;
        layer.pixels = frame;
        layer.depth_key = assign_depth(*seg, DepthSource::initial_obs, depth_map, frame.h, frame.w);
        layers.push_back(std::move(layer));
    }
    return layers;
}

}  // namespace reoi::composite
