#pragma once

#include "scqed/fock.hpp"
#include "scqed/bessel.hpp"
#include "scqed/spin.hpp"
#include "scqed/model.hpp"
#include "scqed/cat.hpp"
#include "scqed/rwa.hpp"
#include "scqed/propagator.hpp"
#include "scqed/config.hpp"
