#pragma once

#include "sptent/abelian_group.hpp"
#include "sptent/chain.hpp"
#include "sptent/io.hpp"
#include "sptent/locc.hpp"
#include "sptent/rep_theory.hpp"
#include "sptent/runner.hpp"
#include "sptent/spt_core.hpp"
#include "sptent/string_order.hpp"
