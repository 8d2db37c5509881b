#pragma once

#include "fakery/pipeline/checksum.hpp"
#include "fakery/pipeline/commands.hpp"
#include "fakery/pipeline/config.hpp"
#include "fakery/pipeline/fixture.hpp"
#include "fakery/pipeline/report.hpp"
