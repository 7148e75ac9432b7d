#pragma once

// Umbrella header: gait characteristic extraction from body-movement series,
// two-sample condition comparison, and copula-entropy dependence analysis.

#include "gaitkit/core.hpp"
#include "gaitkit/csv.hpp"
#include "gaitkit/signal.hpp"
#include "gaitkit/io.hpp"
#include "gaitkit/segmentation.hpp"
#include "gaitkit/spectrum.hpp"
#include "gaitkit/peaks.hpp"
#include "gaitkit/features.hpp"
#include "gaitkit/table.hpp"
#include "gaitkit/copula.hpp"
#include "gaitkit/hypotest.hpp"
#include "gaitkit/synth.hpp"
#include "gaitkit/report.hpp"
