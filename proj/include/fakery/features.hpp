#pragma once

#include "fakery/features/color.hpp"
#include "fakery/features/dct.hpp"
#include "fakery/features/glcm.hpp"
#include "fakery/features/gray.hpp"
#include "fakery/features/hog.hpp"
#include "fakery/features/lbp.hpp"
#include "fakery/features/spec.hpp"
#include "fakery/features/wavelet.hpp"
