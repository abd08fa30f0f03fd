// Convenience umbrella: the whole library.
#pragma once

#include "firecheck/box_verify.hpp"
#include "firecheck/eval.hpp"
#include "firecheck/fmt.hpp"
#include "firecheck/global_consistency.hpp"
#include "firecheck/ibp.hpp"
#include "firecheck/interval.hpp"
#include "firecheck/model_io.hpp"
#include "firecheck/network.hpp"
#include "firecheck/planting.hpp"
#include "firecheck/propagate.hpp"
#include "firecheck/pwl.hpp"
#include "firecheck/query.hpp"
#include "firecheck/query_text.hpp"
#include "firecheck/ray_consistency.hpp"
#include "firecheck/rng.hpp"
#include "firecheck/tensor.hpp"
