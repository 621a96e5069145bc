#pragma once

#include "kinetic/errors.hpp"
#include "kinetic/euler.hpp"
#include "kinetic/flow.hpp"
#include "kinetic/kernels.hpp"
#include "kinetic/measure.hpp"
#include "kinetic/model.hpp"
#include "kinetic/particle_rate.hpp"
#include "kinetic/rng.hpp"
#include "kinetic/validate.hpp"
#include "kinetic/wasserstein.hpp"
#include "kinetic/weakform.hpp"
