#pragma once

#include <bitflip/analytic.hpp>
#include <bitflip/format.hpp>
#include <bitflip/inject.hpp>
#include <bitflip/injector.hpp>
#include <bitflip/montecarlo.hpp>
#include <bitflip/rational.hpp>
#include <bitflip/relerr.hpp>
