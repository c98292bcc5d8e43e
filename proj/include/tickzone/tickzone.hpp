#pragma once

#include <tickzone/domain.hpp>
#include <tickzone/equilibrium.hpp>
#include <tickzone/errors.hpp>
#include <tickzone/estimators.hpp>
#include <tickzone/price.hpp>
#include <tickzone/regression.hpp>
#include <tickzone/simulator.hpp>
#include <tickzone/tick_policy.hpp>
