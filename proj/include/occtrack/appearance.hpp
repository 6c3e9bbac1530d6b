// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "occtrack/core_types.hpp"
#include "occtrack/error.hpp"

namespace occtrack {

/// Norms below this are treated as the zero vector.
inline constexpr double kMinEmbeddingNorm = 1e-12;

/// How the short-term update weight depends on the occlusion score.
enum class BetaMode {
    Linear,    ///< beta = alpha * score
    Constant,  ///< beta = alpha (occlusion-blind, for ablation)
};

struct UpdateParams {
    double alpha = 0.2;
    /// Minimum occlusion score for a long-term update. A tiny positive value
    /// reproduces the literal "score > 0" indicator.
    double occlusion_threshold = 0.5;
    BetaMode beta_mode = BetaMode::Linear;
};

inline Embedding normalize(const Embedding& v) {
    const double n = v.norm();
    if (!(n >= kMinEmbeddingNorm) || !std::isfinite(n)) {
        throw InputError("cannot normalize a zero or non-finite embedding");
    }
    return v / n;
}

/// 1 - cos(a, b), in [0, 2].
inline double cosine_distance(const Embedding& a, const Embedding& b) {
    if (a.size() != b.size()) {
        throw InputError("embedding dimensions differ: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na >= kMinEmbeddingNorm) || !(nb >= kMinEmbeddingNorm)) {
        throw InputError("cosine distance of a zero embedding");
    }
    const double c = a.dot(b) / (na * nb);
    return 1.0 - std::clamp(c, -1.0, 1.0);
}

inline double short_term_weight(double occlusion_score, const UpdateParams& p) {
    return p.beta_mode == BetaMode::Linear ? p.alpha * occlusion_score : p.alpha;
}

/**
 * Long-term update: pulled toward the detection only when the detection is
 * visible enough (score >= occlusion_threshold); otherwise returned as is.
 */
inline Embedding update_long(const Embedding& long_term, const Embedding& detection, double occlusion_score,
                             const UpdateParams& p) {
    if (occlusion_score < p.occlusion_threshold) {
        return long_term;
    }
    return normalize(long_term + p.alpha * normalize(detection));
}

/// Short-term update: every matched detection, weighted by its occlusion score.
inline Embedding update_short(const Embedding& short_term, const Embedding& detection, double occlusion_score,
                              const UpdateParams& p) {
    return normalize(short_term + short_term_weight(occlusion_score, p) * normalize(detection));
}

/// The two per-track embeddings.
struct EmbeddingPair {
    Embedding long_term;
    Embedding short_term;

    /// Both start at the founding detection's direction.
    static EmbeddingPair from_detection(const Embedding& detection) {
        const Embedding n = normalize(detection);
        return {n, n};
    }

    void update(const Embedding& detection, double occlusion_score, const UpdateParams& p) {
        long_term = update_long(long_term, detection, occlusion_score, p);
        short_term = update_short(short_term, detection, occlusion_score, p);
    }
};

}  // namespace occtrack
