// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "occtrack/core_types.hpp"
#include "occtrack/error.hpp"
#include "occtrack/mot_io.hpp"

namespace occtrack {

inline constexpr std::array<char, 4> kSidecarMagic{'O', 'A', 'E', 'M'};
inline constexpr std::uint32_t kSidecarVersion = 1;

/**
 * Binary embedding file, all integers and floats little-endian:
 *
 *   "OAEM" u32 version u32 dim u64 count
 *   count x { u32 frame, u32 ordinal, dim x f32 }
 *
 * `ordinal` is the detection's row position within its frame in the
 * matching det.txt.
 */
struct SidecarRecord {
    std::uint32_t frame = 0;
    std::uint32_t ordinal = 0;
    std::vector<float> values;
};

struct EmbeddingSidecar {
    std::uint32_t dim = 0;
    std::vector<SidecarRecord> records;
};

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v & 0xffffffffu));
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

inline void put_f32(std::ostream& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

inline void read_exact(std::istream& in, unsigned char* dst, std::size_t n, const char* what) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw ParseError(0, std::string("embedding sidecar truncated while reading ") + what);
    }
}

inline std::uint32_t get_u32(std::istream& in, const char* what) {
    unsigned char b[4];
    read_exact(in, b, 4, what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::uint64_t get_u64(std::istream& in, const char* what) {
    const std::uint64_t lo = get_u32(in, what);
    const std::uint64_t hi = get_u32(in, what);
    return lo | (hi << 32);
}

}  // namespace detail

inline void write_sidecar(std::ostream& out, const EmbeddingSidecar& s) {
    out.write(kSidecarMagic.data(), 4);
    detail::put_u32(out, kSidecarVersion);
    detail::put_u32(out, s.dim);
    detail::put_u64(out, s.records.size());
    for (const SidecarRecord& r : s.records) {
        if (r.values.size() != s.dim) {
            throw InputError("sidecar record dimension differs from the header");
        }
        detail::put_u32(out, r.frame);
        detail::put_u32(out, r.ordinal);
        for (float f : r.values) {
            detail::put_f32(out, f);
        }
    }
}

/// Reads and validates a sidecar: magic, version, nonzero dim, exact record count, finite unique records.
inline EmbeddingSidecar read_sidecar(std::istream& in) {
    std::array<char, 4> magic{};
    detail::read_exact(in, reinterpret_cast<unsigned char*>(magic.data()), 4, "magic");
    if (magic != kSidecarMagic) {
        throw ParseError(0, "not an embedding sidecar (bad magic)");
    }
    const std::uint32_t version = detail::get_u32(in, "version");
    if (version != kSidecarVersion) {
        throw ParseError(0, "unsupported embedding sidecar version " + std::to_string(version));
    }
    EmbeddingSidecar s;
    s.dim = detail::get_u32(in, "dim");
    if (s.dim == 0) {
        throw ParseError(0, "embedding sidecar dimension must be positive");
    }
    const std::uint64_t count = detail::get_u64(in, "count");
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (std::uint64_t i = 0; i < count; ++i) {
        SidecarRecord r;
        r.frame = detail::get_u32(in, "record frame");
        r.ordinal = detail::get_u32(in, "record ordinal");
        if (!seen.insert({r.frame, r.ordinal}).second) {
            throw ParseError(0, "duplicate sidecar record for frame " + std::to_string(r.frame) + " ordinal " +
                                    std::to_string(r.ordinal));
        }
        r.values.resize(s.dim);
        for (float& f : r.values) {
            f = std::bit_cast<float>(detail::get_u32(in, "record values"));
            if (!std::isfinite(f)) {
                throw ParseError(0, "non-finite value in sidecar record");
            }
        }
        s.records.push_back(std::move(r));
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw ParseError(0, "embedding sidecar has bytes beyond its declared record count");
    }
    return s;
}

/// Sidecar for a set of frames; ordinals follow the detection order of each frame.
inline EmbeddingSidecar make_sidecar(const std::vector<FrameObservations>& frames) {
    EmbeddingSidecar s;
    for (const FrameObservations& f : frames) {
        std::uint32_t ordinal = 0;
        for (const Detection& d : f.detections) {
            if (s.dim == 0) {
                s.dim = static_cast<std::uint32_t>(d.embedding.size());
            }
            if (d.embedding.size() == 0 || static_cast<std::uint32_t>(d.embedding.size()) != s.dim) {
                throw InputError("every detection needs an embedding of one common dimension");
            }
            SidecarRecord r;
            r.frame = static_cast<std::uint32_t>(f.frame);
            r.ordinal = ordinal++;
            r.values.reserve(s.dim);
            for (Eigen::Index k = 0; k < d.embedding.size(); ++k) {
                r.values.push_back(static_cast<float>(d.embedding(k)));
            }
            s.records.push_back(std::move(r));
        }
    }
    return s;
}

/**
 * Attaches sidecar embeddings to parsed detection rows. Every record must
 * name an existing (frame, ordinal) row and every row must receive one.
 */
inline void attach_embeddings(std::vector<DetectionRow>& rows, const EmbeddingSidecar& s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, const SidecarRecord*> by_key;
    for (const SidecarRecord& r : s.records) {
        by_key[{r.frame, r.ordinal}] = &r;
    }
    if (by_key.size() != rows.size()) {
        throw InputError("embedding sidecar has " + std::to_string(by_key.size()) + " records for " +
                         std::to_string(rows.size()) + " detection rows");
    }
    for (DetectionRow& row : rows) {
        const auto it = by_key.find({static_cast<std::uint32_t>(row.detection.frame),
                                     static_cast<std::uint32_t>(row.ordinal)});
        if (it == by_key.end()) {
            throw InputError("no sidecar embedding for detection at line " + std::to_string(row.line));
        }
        Embedding e(static_cast<Eigen::Index>(s.dim));
        for (std::uint32_t k = 0; k < s.dim; ++k) {
            e(k) = static_cast<double>(it->second->values[k]);
        }
        if (e.norm() < 1e-12) {
            throw InputError("zero embedding for detection at line " + std::to_string(row.line));
        }
        row.detection.embedding = std::move(e);
    }
}

}  // namespace occtrack
