#pragma once

#include "tmunfold/error.hpp"
#include "tmunfold/expr.hpp"
#include "tmunfold/domain.hpp"
#include "tmunfold/sampling.hpp"
#include "tmunfold/report.hpp"
#include "tmunfold/space.hpp"
#include "tmunfold/unfolding.hpp"
#include "tmunfold/candidate.hpp"
#include "tmunfold/collar.hpp"
#include "tmunfold/lifting.hpp"
#include "tmunfold/tm_lifting.hpp"
#include "tmunfold/config.hpp"
#include "tmunfold/cli.hpp"
