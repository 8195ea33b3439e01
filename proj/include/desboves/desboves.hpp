#pragma once

#include "desboves/types.hpp"
#include "desboves/small_matrix.hpp"
#include "desboves/proj_geometry.hpp"
#include "desboves/desboves_map.hpp"
#include "desboves/critical_locus.hpp"
#include "desboves/quartic.hpp"
#include "desboves/preimage.hpp"
#include "desboves/rng.hpp"
#include "desboves/parallel.hpp"
#include "desboves/measures.hpp"
#include "desboves/julia.hpp"
#include "desboves/bifurcation.hpp"
