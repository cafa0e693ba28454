#pragma once

#include "nccyl/bimodule.hpp"
#include "nccyl/connection.hpp"
#include "nccyl/cylinder.hpp"
#include "nccyl/error.hpp"
#include "nccyl/expr_parser.hpp"
#include "nccyl/field_expr.hpp"
#include "nccyl/projections.hpp"
#include "nccyl/quadrature.hpp"
#include "nccyl/random.hpp"
#include "nccyl/riemannian.hpp"
#include "nccyl/serialize.hpp"
#include "nccyl/suites.hpp"
