#pragma once

#include "celforge/blur.hpp"
#include "celforge/chamfer.hpp"
#include "celforge/color.hpp"
#include "celforge/config.hpp"
#include "celforge/distance.hpp"
#include "celforge/errors.hpp"
#include "celforge/flo_io.hpp"
#include "celforge/flow.hpp"
#include "celforge/image.hpp"
#include "celforge/manifest.hpp"
#include "celforge/metrics.hpp"
#include "celforge/mining.hpp"
#include "celforge/morphology.hpp"
#include "celforge/parallel.hpp"
#include "celforge/png_io.hpp"
#include "celforge/report.hpp"
#include "celforge/sketch.hpp"
#include "celforge/warp.hpp"
