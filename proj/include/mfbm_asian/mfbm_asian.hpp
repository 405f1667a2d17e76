#pragma once

// Umbrella header.

#include "mfbm_asian/fbm.hpp"
#include "mfbm_asian/mc.hpp"
#include "mfbm_asian/model.hpp"
#include "mfbm_asian/pricing.hpp"
#include "mfbm_asian/rng.hpp"
#include "mfbm_asian/special.hpp"
#include "mfbm_asian/sweep.hpp"
#include "mfbm_asian/validate.hpp"
