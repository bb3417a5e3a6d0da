#pragma once

#include "cadlag/dyadic.hpp"
#include "cadlag/time_domain.hpp"
#include "cadlag/grid.hpp"
#include "cadlag/rate_matrix.hpp"
#include "cadlag/fdd.hpp"
#include "cadlag/jumps.hpp"
#include "cadlag/report.hpp"
#include "cadlag/events.hpp"
#include "cadlag/regularity.hpp"
#include "cadlag/path.hpp"
#include "cadlag/sampling.hpp"
