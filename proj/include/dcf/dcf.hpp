#pragma once

// Umbrella header: analytic MAC model, queueing delay bounds, the
// discrete-event simulator and the experiment harness.

#include "dcf/config_io.hpp"
#include "dcf/delay_model.hpp"
#include "dcf/errors.hpp"
#include "dcf/harness.hpp"
#include "dcf/mac_model.hpp"
#include "dcf/rng.hpp"
#include "dcf/sim.hpp"
#include "dcf/stats.hpp"
