// Umbrella header.
#pragma once

#include "innonet/core.hpp"
#include "innonet/csv.hpp"
#include "innonet/directory.hpp"
#include "innonet/frames.hpp"
#include "innonet/graph.hpp"
#include "innonet/ingest.hpp"
#include "innonet/metrics.hpp"
#include "innonet/pipeline.hpp"
#include "innonet/stats/hypothesis.hpp"
#include "innonet/stats/linalg.hpp"
#include "innonet/stats/logit.hpp"
#include "innonet/stats/quadrature.hpp"
#include "innonet/stats/special.hpp"
#include "innonet/synth.hpp"
