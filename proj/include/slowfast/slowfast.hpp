#pragma once

/// Umbrella header: discretization, spectral analysis, nonlinear dynamics,
/// and the sweep/report harness for the singularly perturbed operator family.

#include "slowfast/assembly.hpp"
#include "slowfast/attractor.hpp"
#include "slowfast/coefficients.hpp"
#include "slowfast/config.hpp"
#include "slowfast/equilibria.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/family.hpp"
#include "slowfast/flow.hpp"
#include "slowfast/gaps.hpp"
#include "slowfast/manifold.hpp"
#include "slowfast/mesh.hpp"
#include "slowfast/rates.hpp"
#include "slowfast/reaction.hpp"
#include "slowfast/report.hpp"
#include "slowfast/spectral.hpp"
#include "slowfast/sweep.hpp"
