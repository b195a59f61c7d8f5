#pragma once

// Convenience umbrella for the whole library.

#include "wavecv/cross_validation.hpp"
#include "wavecv/denoise.hpp"
#include "wavecv/filters.hpp"
#include "wavecv/signal.hpp"
#include "wavecv/simulation.hpp"
#include "wavecv/test_signals.hpp"
#include "wavecv/thresholding.hpp"
#include "wavecv/transform.hpp"
