#pragma once

#include <cstdint>

#include "quatlink/ingest.hpp"
#include "quatlink/square_diagram.hpp"

namespace quatlink::rgen {

// Random piecewise-linear link in the cube: 1-2 components, each either a
// closed loop or a chain of up to `max_transitions` face transitions.
ingest::PLLink random_link(uint64_t seed, int max_transitions = 4);

// Valid square diagram obtained by projecting a random link; resamples until
// validation and the lift preconditions pass.
sqd::SquareDiagram random_square_diagram(uint64_t seed);

}  // namespace quatlink::rgen
