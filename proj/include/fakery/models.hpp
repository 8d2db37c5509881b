#pragma once

#include "fakery/models/common.hpp"
#include "fakery/models/forest.hpp"
#include "fakery/models/gbdt.hpp"
#include "fakery/models/logistic.hpp"
#include "fakery/models/model_io.hpp"
#include "fakery/models/rank.hpp"
#include "fakery/models/standardizer.hpp"
#include "fakery/models/tree.hpp"
#include "fakery/models/voting.hpp"
