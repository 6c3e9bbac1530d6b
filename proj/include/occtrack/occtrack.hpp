// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "occtrack/appearance.hpp"
#include "occtrack/assignment.hpp"
#include "occtrack/association.hpp"
#include "occtrack/config.hpp"
#include "occtrack/core_types.hpp"
#include "occtrack/error.hpp"
#include "occtrack/metrics.hpp"
#include "occtrack/mot_io.hpp"
#include "occtrack/motion.hpp"
#include "occtrack/occlusion.hpp"
#include "occtrack/pipeline.hpp"
#include "occtrack/sidecar.hpp"
#include "occtrack/simulator.hpp"
#include "occtrack/track.hpp"
