#pragma once

// Umbrella header for the whole library: granular classifier, streaming
// metrics, spectral feature pipeline, feature selection, experiment drivers.

#include "egnn/common.hpp"
#include "egnn/csv.hpp"
#include "egnn/experiment.hpp"
#include "egnn/features.hpp"
#include "egnn/granule.hpp"
#include "egnn/io.hpp"
#include "egnn/metrics.hpp"
#include "egnn/network.hpp"
#include "egnn/normalize.hpp"
#include "egnn/selection.hpp"
#include "egnn/synth.hpp"
