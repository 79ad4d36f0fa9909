#pragma once

#include "behavior.hpp"
#include "causal_graph.hpp"
#include "error.hpp"
#include "event_log.hpp"
#include "granger.hpp"
#include "lag_selector.hpp"
#include "ols.hpp"
#include "pipeline.hpp"
#include "stationarity.hpp"
#include "synth.hpp"
#include "timeseries.hpp"
