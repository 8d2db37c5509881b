#pragma once

#include "fakery/eval/metrics.hpp"
#include "fakery/eval/threshold.hpp"
