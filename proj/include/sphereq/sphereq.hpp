#pragma once

// Umbrella for the core library. experiments.hpp is not pulled in here
// because it depends on GMP; include it directly where needed.

#include "sphereq/agwp.hpp"
#include "sphereq/algebra.hpp"
#include "sphereq/equations.hpp"
#include "sphereq/errors.hpp"
#include "sphereq/hashing.hpp"
#include "sphereq/io.hpp"
#include "sphereq/random.hpp"
#include "sphereq/reductions.hpp"
