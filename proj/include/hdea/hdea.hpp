#pragma once

// Umbrella header for the haploid-diploid evolutionary algorithm library.

#include "hdea/config.hpp"
#include "hdea/csv.hpp"
#include "hdea/error.hpp"
#include "hdea/evolve.hpp"
#include "hdea/external.hpp"
#include "hdea/genome.hpp"
#include "hdea/harness.hpp"
#include "hdea/nk.hpp"
#include "hdea/objective.hpp"
#include "hdea/protocol.hpp"
#include "hdea/rng.hpp"
#include "hdea/stats.hpp"
#include "hdea/subprocess.hpp"
