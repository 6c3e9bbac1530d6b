// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "occtrack/appearance.hpp"
#include "occtrack/core_types.hpp"
#include "occtrack/error.hpp"
#include "occtrack/metrics.hpp"

namespace occtrack {

/**
 * Portable pseudo-random source: std::mt19937_64 (fully specified by the
 * standard) with uniforms built from the top 53 bits and normals from the
 * cosine branch of Box-Muller. Library distributions are avoided because
 * their algorithms differ between implementations.
 */
class SimRng {
public:
    explicit SimRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

/// Contiguous occlusion episode: severity[i] applies to frame start + i.
struct OcclusionEvent {
    int start = 1;
    std::vector<double> severities;
    int occluder = 0;  ///< identity whose appearance leaks in; 0 for clutter with no appearance

    int end() const { return start + static_cast<int>(severities.size()) - 1; }
};

struct AgentSpec {
    int identity = 1;
    BoundingBox initial_box;
    double vx = 0.0;
    double vy = 0.0;
    Embedding anchor;  ///< empty: derived from the scenario (basis vector or seeded random)
    std::vector<OcclusionEvent> events;
};

struct NoiseSpec {
    double box_jitter_std = 0.0;
    double embedding_noise_std = 0.0;
    double drop_threshold = 0.15;  ///< visibility below this emits no detection
    double score_noise_std = 0.0;  ///< perturbs the emitted occlusion score
    double confidence = 0.9;
};

struct Scenario {
    std::uint64_t seed = 0;
    int duration = 1;
    std::vector<AgentSpec> agents;
    NoiseSpec noise;
    int embedding_dim = static_cast<int>(kDefaultEmbeddingDim);
    /// Anchors are distinct basis vectors; otherwise seeded random unit vectors.
    bool orthogonal_anchors = true;

    void validate() const {
        if (duration < 1) {
            throw InputError("scenario duration must be at least 1");
        }
        if (embedding_dim < 1) {
            throw InputError("embedding dimension must be positive");
        }
        if (orthogonal_anchors && agents.size() > static_cast<std::size_t>(embedding_dim)) {
            throw InputError("orthogonal anchors need at least as many dimensions as agents");
        }
        const NoiseSpec& n = noise;
        if (!(n.box_jitter_std >= 0.0) || !(n.embedding_noise_std >= 0.0) || !(n.score_noise_std >= 0.0)) {
            throw InputError("noise standard deviations must be nonnegative");
        }
        if (!(n.drop_threshold >= 0.0 && n.drop_threshold <= 1.0)) {
            throw InputError("drop threshold must lie in [0,1]");
        }
        if (!(n.confidence >= 0.0 && n.confidence <= 1.0)) {
            throw InputError("detection confidence must lie in [0,1]");
        }
        std::set<int> ids;
        for (const AgentSpec& a : agents) {
            if (a.identity < 1 || !ids.insert(a.identity).second) {
                throw InputError("agent identities must be positive and unique");
            }
            if (!a.initial_box.valid() || a.initial_box.width() <= 0.0 || a.initial_box.height() <= 0.0) {
                throw InputError("agent " + std::to_string(a.identity) + " has an empty initial box");
            }
            if (!std::isfinite(a.vx) || !std::isfinite(a.vy)) {
                throw InputError("agent velocity must be finite");
            }
            if (a.anchor.size() != 0 && a.anchor.size() != embedding_dim) {
                throw InputError("agent anchor dimension differs from the scenario");
            }
        }
        for (const AgentSpec& a : agents) {
            int last_end = 0;
            std::vector<OcclusionEvent> events = a.events;
            std::sort(events.begin(), events.end(),
                      [](const OcclusionEvent& x, const OcclusionEvent& y) { return x.start < y.start; });
            for (const OcclusionEvent& e : events) {
                if (e.start < 1 || e.severities.empty()) {
                    throw InputError("occlusion events need a start frame >= 1 and a severity profile");
                }
                if (e.start <= last_end) {
                    throw InputError("occlusion events of agent " + std::to_string(a.identity) + " overlap");
                }
                for (double s : e.severities) {
                    if (!(s >= 0.0 && s <= 1.0)) {
                        throw InputError("occlusion severities must lie in [0,1]");
                    }
                }
                if (e.occluder != 0 && (e.occluder == a.identity || !ids.contains(e.occluder))) {
                    throw InputError("occluder must be another agent of the scenario");
                }
                last_end = e.end();
            }
        }
    }
};

/// Ground-truth row; `detectable` is false when the agent emitted no detection.
struct GtRecord {
    int frame = 0;
    int identity = 0;
    BoundingBox box;
    double visibility = 1.0;
    bool detectable = true;
};

struct SimulationOutput {
    std::vector<FrameObservations> observations;  ///< one entry per frame 1..duration
    std::vector<GtRecord> ground_truth;           ///< frame-major, agent order
};

/// Visibility of an agent at a frame (1 outside events).
inline double agent_visibility(const AgentSpec& a, int frame) {
    for (const OcclusionEvent& e : a.events) {
        if (frame >= e.start && frame <= e.end()) {
            return 1.0 - e.severities[static_cast<std::size_t>(frame - e.start)];
        }
    }
    return 1.0;
}

inline const OcclusionEvent* active_event(const AgentSpec& a, int frame) {
    for (const OcclusionEvent& e : a.events) {
        if (frame >= e.start && frame <= e.end()) {
            return &e;
        }
    }
    return nullptr;
}

/// Noise-free box of an agent at a frame (linear path from frame 1).
inline BoundingBox agent_box(const AgentSpec& a, int frame) {
    const double t = static_cast<double>(frame - 1);
    return a.initial_box.translated(a.vx * t, a.vy * t);
}

/// Identity anchors by agent identity, in agent order.
inline std::map<int, Embedding> scenario_anchors(const Scenario& s) {
    std::map<int, Embedding> anchors;
    SimRng rng(s.seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
        const AgentSpec& a = s.agents[i];
        if (a.anchor.size() != 0) {
            anchors[a.identity] = normalize(a.anchor);
        } else if (s.orthogonal_anchors) {
            anchors[a.identity] = Embedding::Unit(s.embedding_dim, static_cast<Eigen::Index>(i));
        } else {
            Embedding v(s.embedding_dim);
            for (Eigen::Index k = 0; k < v.size(); ++k) {
                v(k) = rng.normal();
            }
            anchors[a.identity] = normalize(v);
        }
    }
    return anchors;
}

/**
 * Materializes a scenario. Per frame and agent: the GT box follows the linear
 * path; visibility comes from the event profile; below drop_threshold no
 * detection is emitted. Emitted boxes carry independent jitter on each edge,
 * embeddings are the unit blend v * anchor + (1 - v) * occluder_anchor plus
 * noise, and the occlusion score is the visibility (plus optional noise,
 * clamped to [0,1]).
 */
inline SimulationOutput generate(const Scenario& s) {
    s.validate();
    const std::map<int, Embedding> anchors = scenario_anchors(s);
    SimRng rng(s.seed);
    SimulationOutput out;
    for (int f = 1; f <= s.duration; ++f) {
        FrameObservations obs;
        obs.frame = f;
        for (const AgentSpec& a : s.agents) {
            const BoundingBox truth = agent_box(a, f);
            const double v = agent_visibility(a, f);
            const bool detectable = v >= s.noise.drop_threshold;
            out.ground_truth.push_back({f, a.identity, truth, v, detectable});
            if (!detectable) {
                continue;
            }
            Detection d;
            d.frame = f;
            d.confidence = s.noise.confidence;
            const double j = s.noise.box_jitter_std;
            d.box = truth;
            if (j > 0.0) {
                d.box.left += j * rng.normal();
                d.box.top += j * rng.normal();
                d.box.right += j * rng.normal();
                d.box.bottom += j * rng.normal();
            }
            Embedding e = anchors.at(a.identity);
            const OcclusionEvent* ev = active_event(a, f);
            if (ev != nullptr && ev->occluder != 0) {
                e = v * e + (1.0 - v) * anchors.at(ev->occluder);
            }
            if (s.noise.embedding_noise_std > 0.0) {
                for (Eigen::Index k = 0; k < e.size(); ++k) {
                    e(k) += s.noise.embedding_noise_std * rng.normal();
                }
            }
            d.embedding = normalize(e);
            double score = v;
            if (s.noise.score_noise_std > 0.0) {
                score = std::clamp(v + s.noise.score_noise_std * rng.normal(), 0.0, 1.0);
            }
            d.occlusion_score = score;
            obs.detections.push_back(std::move(d));
        }
        out.observations.push_back(std::move(obs));
    }
    return out;
}

/// Evaluation ground truth: detectable records only, grouped per frame 1..duration.
inline std::vector<EvalFrame> evaluation_frames(const std::vector<GtRecord>& gt, int duration) {
    std::vector<EvalFrame> frames(static_cast<std::size_t>(std::max(duration, 0)));
    for (int f = 1; f <= duration; ++f) {
        frames[static_cast<std::size_t>(f - 1)].frame = f;
    }
    for (const GtRecord& r : gt) {
        if (r.detectable && r.frame >= 1 && r.frame <= duration) {
            frames[static_cast<std::size_t>(r.frame - 1)].gt.push_back({r.identity, r.box, r.visibility});
        }
    }
    return frames;
}

/**
 * Two pedestrians walking toward each other. A is occluded by B with a
 * severity ramp up to 0.9 and back over frames 21-35; the eight 0.9 frames
 * fall below the drop threshold, and the partial frames carry B's
 * appearance in A's embeddings.
 */
inline Scenario adversarial_crossing() {
    Scenario s;
    s.seed = 20260415;
    s.duration = 60;
    s.embedding_dim = static_cast<int>(kDefaultEmbeddingDim);
    s.orthogonal_anchors = true;
    s.noise.box_jitter_std = 1.0;
    s.noise.embedding_noise_std = 0.03;
    s.noise.drop_threshold = 0.15;
    s.noise.confidence = 0.9;

    AgentSpec a;
    a.identity = 1;
    a.initial_box = {100.0, 200.0, 140.0, 300.0};
    a.vx = 3.0;
    OcclusionEvent e;
    e.start = 21;
    e.severities = {0.2, 0.4, 0.6, 0.8, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.6, 0.4, 0.2};
    e.occluder = 2;
    a.events.push_back(e);

    AgentSpec b;
    b.identity = 2;
    b.initial_box = {260.0, 205.0, 304.0, 315.0};
    b.vx = -3.0;

    s.agents = {a, b};
    return s;
}

/// One agent, constant velocity, no noise and no occlusion.
inline Scenario single_agent(int duration = 50) {
    Scenario s;
    s.seed = 1;
    s.duration = duration;
    AgentSpec a;
    a.identity = 1;
    a.initial_box = {50.0, 80.0, 90.0, 180.0};
    a.vx = 2.0;
    a.vy = 0.5;
    s.agents = {a};
    return s;
}

}  // namespace occtrack
