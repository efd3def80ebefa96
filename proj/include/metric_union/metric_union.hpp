#pragma once

#include "metric_union/error.hpp"
#include "metric_union/random.hpp"
#include "metric_union/parallel.hpp"
#include "metric_union/linalg.hpp"
#include "metric_union/metric.hpp"
#include "metric_union/mds.hpp"
#include "metric_union/audit.hpp"
#include "metric_union/cover.hpp"
#include "metric_union/kirszbraun.hpp"
#include "metric_union/union_embed.hpp"
#include "metric_union/testgen.hpp"
#include "metric_union/lower_bound.hpp"
#include "metric_union/glue.hpp"
#include "metric_union/io.hpp"
#include "metric_union/acceptance.hpp"
