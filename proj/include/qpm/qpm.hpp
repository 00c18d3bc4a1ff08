// qpm.hpp
// Umbrella header: trainable quantum measurements for classification.

#pragma once

#include "qpm/config.hpp"
#include "qpm/data.hpp"
#include "qpm/experiment.hpp"
#include "qpm/gradients.hpp"
#include "qpm/models.hpp"
#include "qpm/neural.hpp"
#include "qpm/observable.hpp"
#include "qpm/prng.hpp"
#include "qpm/selftest.hpp"
#include "qpm/state.hpp"
#include "qpm/svg_plot.hpp"
