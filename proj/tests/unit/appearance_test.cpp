// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "occtrack/appearance.hpp"

namespace occtrack {
namespace {

Embedding vec(std::initializer_list<double> v) {
    Embedding e(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) {
        e(i++) = x;
    }
    return e;
}

Embedding random_vec(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    Embedding e(dim);
    for (int k = 0; k < dim; ++k) {
        e(k) = n(rng);
    }
    return e;
}

TEST(Normalize, Examples) {
    const Embedding n = normalize(vec({3, 4}));
    EXPECT_DOUBLE_EQ(n(0), 0.6);
    EXPECT_DOUBLE_EQ(n(1), 0.8);
    EXPECT_EQ(normalize(vec({0, 1, 0})), vec({0, 1, 0}));
    EXPECT_THROW(normalize(vec({0, 0, 0})), InputError);
    EXPECT_THROW(normalize(vec({1e-13, 0})), InputError);
}

TEST(CosineDistance, Examples) {
    EXPECT_NEAR(cosine_distance(vec({1, 2}), vec({1, 2})), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(cosine_distance(vec({1, 0}), vec({0, 1})), 1.0);
    EXPECT_DOUBLE_EQ(cosine_distance(vec({1, 0}), vec({-1, 0})), 2.0);
    EXPECT_THROW(cosine_distance(vec({0, 0}), vec({1, 0})), InputError);
    EXPECT_THROW(cosine_distance(vec({1, 0}), vec({1, 0, 0})), InputError);
}

TEST(UpdateLong, Examples) {
    const UpdateParams p;
    const Embedding f = vec({1, 0});
    EXPECT_EQ(update_long(f, vec({0, 2}), 0.0, p), f);

    // (1, 0.2) / sqrt(1.04)
    const Embedding u = update_long(f, vec({0, 2}), 1.0, p);
    EXPECT_NEAR(u(0), 1.0 / std::sqrt(1.04), 1e-15);
    EXPECT_NEAR(u(1), 0.2 / std::sqrt(1.04), 1e-15);
    EXPECT_NEAR(u(0), 0.98058, 1e-5);
    EXPECT_NEAR(u(1), 0.19612, 1e-5);

    const Embedding parallel = update_long(f, vec({5, 0}), 1.0, p);
    EXPECT_NEAR((parallel - f).norm(), 0.0, 1e-15);
}

TEST(UpdateLong, BelowThresholdIsBitIdentity) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> score(0.0, 0.4999);
    const UpdateParams p;
    for (int i = 0; i < 1000; ++i) {
        const Embedding f = normalize(random_vec(rng, 16));
        const Embedding out = update_long(f, random_vec(rng, 16), score(rng), p);
        EXPECT_TRUE((out.array() == f.array()).all());
    }
}

TEST(UpdateLong, ThresholdIsInclusive) {
    const UpdateParams p;
    EXPECT_NE(update_long(vec({1, 0}), vec({0, 1}), 0.5, p), vec({1, 0}));
}

TEST(UpdateShort, Examples) {
    const UpdateParams p;
    const Embedding f = vec({1, 0});
    EXPECT_EQ(update_short(f, vec({0, 2}), 0.0, p), f);
    const Embedding u = update_short(f, vec({0, 2}), 1.0, p);
    EXPECT_NEAR(u(0), 0.98058, 1e-5);
    EXPECT_NEAR(u(1), 0.19612, 1e-5);
    for (double s : {0.0, 0.3, 1.0}) {
        EXPECT_NEAR((update_short(f, vec({2, 0}), s, p) - f).norm(), 0.0, 1e-15);
    }
    EXPECT_THROW(update_short(f, vec({0, 0}), 1.0, p), InputError);
}

TEST(UpdateShort, WeightFollowsBetaMode) {
    UpdateParams p;
    EXPECT_DOUBLE_EQ(short_term_weight(0.5, p), 0.1);
    p.beta_mode = BetaMode::Constant;
    EXPECT_DOUBLE_EQ(short_term_weight(0.5, p), 0.2);
    // With constant beta an occluded detection moves the embedding as much as a visible one.
    EXPECT_EQ(update_short(vec({1, 0}), vec({0, 1}), 0.0, p), update_short(vec({1, 0}), vec({0, 1}), 1.0, p));
}

TEST(AppearanceProperty, UpdatesReturnUnitNorm) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> score(0.0, 1.0), alpha(0.0, 2.0), scale(1e-6, 1e3);
    for (int i = 0; i < 20000; ++i) {
        UpdateParams p;
        p.alpha = alpha(rng);
        const Embedding f = normalize(random_vec(rng, 8));
        const Embedding e = scale(rng) * random_vec(rng, 8);
        EXPECT_NEAR(update_long(f, e, score(rng), p).norm(), 1.0, 1e-6);
        EXPECT_NEAR(update_short(f, e, score(rng), p).norm(), 1.0, 1e-6);
    }
}

TEST(AppearanceProperty, MonotonePull) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> score(0.5, 1.0);
    const UpdateParams p;
    for (int i = 0; i < 2000; ++i) {
        const Embedding f = normalize(random_vec(rng, 6));
        const Embedding e = random_vec(rng, 6);
        const double before = cosine_distance(f, e);
        if (before < 1e-9 || before > 2.0 - 1e-9) {
            continue;
        }
        const double s = score(rng);
        EXPECT_LT(cosine_distance(update_long(f, e, s, p), e), before);
        EXPECT_LT(cosine_distance(update_short(f, e, s, p), e), before);
    }
}

TEST(AppearanceProperty, LongTermIgnoresOccluderStream) {
    const UpdateParams p;
    const Embedding own = vec({1, 0, 0});
    const Embedding occluder = vec({0, 1, 0});
    EmbeddingPair clean = EmbeddingPair::from_detection(own);
    EmbeddingPair mixed = clean;
    for (int i = 0; i < 100; ++i) {
        clean.update(own, 1.0, p);
        mixed.update(i % 2 == 0 ? own : occluder, i % 2 == 0 ? 1.0 : 0.0, p);
    }
    EXPECT_EQ(cosine_distance(mixed.long_term, own), cosine_distance(clean.long_term, own));
}

TEST(EmbeddingPair, FoundedOnDetection) {
    const EmbeddingPair e = EmbeddingPair::from_detection(vec({0, 3, 4}));
    EXPECT_EQ(e.long_term, e.short_term);
    EXPECT_NEAR(e.long_term.norm(), 1.0, 1e-15);
}

}  // namespace
}  // namespace occtrack
