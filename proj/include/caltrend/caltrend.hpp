#pragma once

#include "caltrend/api.hpp"
#include "caltrend/dataset.hpp"
#include "caltrend/deidentify.hpp"
#include "caltrend/error.hpp"
#include "caltrend/features.hpp"
#include "caltrend/ingestion.hpp"
#include "caltrend/lifemode.hpp"
#include "caltrend/model.hpp"
#include "caltrend/projection.hpp"
#include "caltrend/random.hpp"
#include "caltrend/synth.hpp"
#include "caltrend/temporal.hpp"
#include "caltrend/text.hpp"
#include "caltrend/time.hpp"
#include "caltrend/topics.hpp"
