#pragma once

#include "steiner/absorb.hpp"
#include "steiner/combinatorics.hpp"
#include "steiner/fractional.hpp"
#include "steiner/gf.hpp"
#include "steiner/harness.hpp"
#include "steiner/hypergraph.hpp"
#include "steiner/io.hpp"
#include "steiner/leave.hpp"
#include "steiner/nibble.hpp"
#include "steiner/operators.hpp"
#include "steiner/rng.hpp"
#include "steiner/template.hpp"
