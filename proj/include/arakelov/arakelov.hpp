#pragma once

#include "arakelov/error.hpp"
#include "arakelov/exact.hpp"
#include "arakelov/linalg.hpp"
#include "arakelov/lattice.hpp"
#include "arakelov/field.hpp"
#include "arakelov/units.hpp"
#include "arakelov/parallel.hpp"
#include "arakelov/divisor.hpp"
#include "arakelov/verify.hpp"
