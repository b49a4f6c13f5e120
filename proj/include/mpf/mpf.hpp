// SPDX-License-Identifier: MIT
#pragma once

#include "jet.hpp"
#include "expression.hpp"
#include "velocity.hpp"
#include "catalog.hpp"
#include "conditions.hpp"
#include "vanishing.hpp"
#include "polynomial.hpp"
#include "nonexistence.hpp"
