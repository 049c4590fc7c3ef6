// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fsim/analysis.hpp"
#include "fsim/compat.hpp"
#include "fsim/config.hpp"
#include "fsim/engine.hpp"
#include "fsim/errors.hpp"
#include "fsim/exact_simulation.hpp"
#include "fsim/graph.hpp"
#include "fsim/io.hpp"
#include "fsim/label_similarity.hpp"
#include "fsim/matching.hpp"
#include "fsim/parallel.hpp"
#include "fsim/score_table.hpp"
#include "fsim/variant.hpp"
