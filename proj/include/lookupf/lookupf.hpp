#pragma once

#include "lookupf/augment.hpp"
#include "lookupf/core.hpp"
#include "lookupf/datagen.hpp"
#include "lookupf/descriptor.hpp"
#include "lookupf/detect.hpp"
#include "lookupf/error.hpp"
#include "lookupf/eval.hpp"
#include "lookupf/image_io.hpp"
#include "lookupf/imgproc.hpp"
#include "lookupf/index.hpp"
#include "lookupf/maskops.hpp"
#include "lookupf/parallel.hpp"
#include "lookupf/pipeline.hpp"
#include "lookupf/rng.hpp"
#include "lookupf/store.hpp"
