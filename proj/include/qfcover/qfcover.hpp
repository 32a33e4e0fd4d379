// Umbrella header.
#ifndef QFCOVER_QFCOVER_HPP
#define QFCOVER_QFCOVER_HPP

#include "arith.hpp"
#include "quadforms.hpp"
#include "classgroup.hpp"
#include "lfunctions.hpp"
#include "coverage.hpp"
#include "moments.hpp"

#endif
