#pragma once

#include "sorites/error.hpp"
#include "sorites/scalar.hpp"
#include "sorites/probability.hpp"
#include "sorites/joint_distribution.hpp"
#include "sorites/chain.hpp"
#include "sorites/models.hpp"
#include "sorites/assumptions.hpp"
#include "sorites/sorites_engine.hpp"
#include "sorites/theorems.hpp"
#include "sorites/local_strategies.hpp"
#include "sorites/ghz.hpp"
#include "sorites/montecarlo.hpp"
#include "sorites/io.hpp"
