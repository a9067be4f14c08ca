// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Umbrella header for the whole toolkit.

#include "softcreep/config.hpp"
#include "softcreep/csv.hpp"
#include "softcreep/distributions.hpp"
#include "softcreep/errors.hpp"
#include "softcreep/estimation.hpp"
#include "softcreep/finger.hpp"
#include "softcreep/linalg.hpp"
#include "softcreep/manifest.hpp"
#include "softcreep/quadrature.hpp"
#include "softcreep/rng.hpp"
#include "softcreep/rvt.hpp"
#include "softcreep/simulate.hpp"
#include "softcreep/sobol.hpp"
#include "softcreep/svg.hpp"
#include "softcreep/version.hpp"
#include "softcreep/viscoelastic.hpp"
