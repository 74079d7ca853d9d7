#pragma once

// Umbrella header for the degenerate-maser synchronization toolkit.

#include "maser/density_matrix.hpp"
#include "maser/experiments.hpp"
#include "maser/io.hpp"
#include "maser/liouvillian.hpp"
#include "maser/params.hpp"
#include "maser/steady_state.hpp"
#include "maser/sync.hpp"
#include "maser/validate_suite.hpp"
