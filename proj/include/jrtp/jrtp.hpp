#pragma once

#include "jrtp/column.hpp"
#include "jrtp/colgen.hpp"
#include "jrtp/generator.hpp"
#include "jrtp/geo.hpp"
#include "jrtp/graph.hpp"
#include "jrtp/instance.hpp"
#include "jrtp/lp.hpp"
#include "jrtp/master.hpp"
#include "jrtp/oracle.hpp"
#include "jrtp/pricing.hpp"
#include "jrtp/reduction.hpp"
#include "jrtp/shifts.hpp"
#include "jrtp/solution_io.hpp"
#include "jrtp/validate.hpp"
