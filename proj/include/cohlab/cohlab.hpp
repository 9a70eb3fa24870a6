#pragma once

// Umbrella header: coherence quantifiers for finite-dimensional quantum
// states, trace-distance minimization backends, incoherent channels, and the
// registered scan experiments.

#include "cohlab/channels.hpp"
#include "cohlab/complex_matrix.hpp"
#include "cohlab/errors.hpp"
#include "cohlab/experiments.hpp"
#include "cohlab/io.hpp"
#include "cohlab/linalg.hpp"
#include "cohlab/measures.hpp"
#include "cohlab/rng.hpp"
#include "cohlab/simplex_solver.hpp"
#include "cohlab/states.hpp"
#include "cohlab/tracedist.hpp"
