#pragma once

#include "gwi/error.hpp"
#include "gwi/expression.hpp"
#include "gwi/lhv.hpp"
#include "gwi/observables.hpp"
#include "gwi/optimize.hpp"
#include "gwi/qstate.hpp"
#include "gwi/rational.hpp"
#include "gwi/reduced.hpp"
#include "gwi/tolerance.hpp"
