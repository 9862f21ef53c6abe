// Copyright 2026 The lavabo Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LAVABO_LAVABO_HPP
#define LAVABO_LAVABO_HPP

#include "lavabo/acquisition.hpp"
#include "lavabo/benchmarks.hpp"
#include "lavabo/channel.hpp"
#include "lavabo/error.hpp"
#include "lavabo/quasi_newton.hpp"
#include "lavabo/random.hpp"
#include "lavabo/solver.hpp"
#include "lavabo/space.hpp"
#include "lavabo/surrogate.hpp"
#include "lavabo/trace.hpp"

#endif  // LAVABO_LAVABO_HPP
