#pragma once

// Umbrella header for the grid potential-theory toolkit.

#include "capacity.hpp"
#include "config.hpp"
#include "cover.hpp"
#include "equivalence.hpp"
#include "fatness.hpp"
#include "geometry.hpp"
#include "grid.hpp"
#include "hardy.hpp"
#include "perfectness.hpp"
#include "report.hpp"
#include "trend.hpp"
#include "util.hpp"
#include "version.hpp"
