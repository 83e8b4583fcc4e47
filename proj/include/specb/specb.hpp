#pragma once

// Umbrella header: spectral bandit policies, graph/spectral machinery,
// ratings pipeline, and the experiment harness.

#include "specb/bandit.hpp"
#include "specb/graph.hpp"
#include "specb/harness.hpp"
#include "specb/jacobi.hpp"
#include "specb/linalg.hpp"
#include "specb/policies.hpp"
#include "specb/ratings.hpp"
#include "specb/spectral.hpp"
#include "specb/util.hpp"
