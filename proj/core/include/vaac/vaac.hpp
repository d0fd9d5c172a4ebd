#pragma once

#include "vaac/actor.hpp"
#include "vaac/critic.hpp"
#include "vaac/errors.hpp"
#include "vaac/features.hpp"
#include "vaac/harness.hpp"
#include "vaac/mdp.hpp"
#include "vaac/model_io.hpp"
#include "vaac/oracle.hpp"
#include "vaac/policy.hpp"
#include "vaac/simulate.hpp"
