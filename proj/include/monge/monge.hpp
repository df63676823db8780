#pragma once

#include "monge/analytic.hpp"
#include "monge/distance.hpp"
#include "monge/error.hpp"
#include "monge/grid.hpp"
#include "monge/lamcheck.hpp"
#include "monge/onedim.hpp"
#include "monge/quadrature.hpp"
#include "monge/states.hpp"
#include "monge/transport.hpp"
