#pragma once

#include "tauberlab/errors.hpp"
#include "tauberlab/quadrature.hpp"
#include "tauberlab/arith.hpp"
#include "tauberlab/special.hpp"
#include "tauberlab/transform.hpp"
#include "tauberlab/operator.hpp"
#include "tauberlab/tauber.hpp"
#include "tauberlab/config.hpp"
