#pragma once

// Umbrella header. serialize.hpp is left out because it needs nlohmann/json.

#include "archetypal.hpp"
#include "errors.hpp"
#include "hull.hpp"
#include "io.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "parallel.hpp"
#include "pipeline.hpp"
#include "random.hpp"
#include "simplex.hpp"
#include "sketch.hpp"
#include "synth.hpp"
