#pragma once

#include "jsk/ams.hpp"
#include "jsk/bench.hpp"
#include "jsk/convolution.hpp"
#include "jsk/error.hpp"
#include "jsk/estimator.hpp"
#include "jsk/exact.hpp"
#include "jsk/hashing.hpp"
#include "jsk/ingestion.hpp"
#include "jsk/join_graph.hpp"
#include "jsk/sketch.hpp"
#include "jsk/sketch_file.hpp"
