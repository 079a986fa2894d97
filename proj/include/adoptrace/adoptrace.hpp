#pragma once

#include "adoptrace/annotate/campaign.hpp"
#include "adoptrace/annotate/service.hpp"
#include "adoptrace/aspects.hpp"
#include "adoptrace/corpus.hpp"
#include "adoptrace/error.hpp"
#include "adoptrace/evalkit.hpp"
#include "adoptrace/period.hpp"
#include "adoptrace/pipeline.hpp"
#include "adoptrace/polarity.hpp"
#include "adoptrace/report.hpp"
#include "adoptrace/synth.hpp"
#include "adoptrace/textprep.hpp"
#include "adoptrace/trend.hpp"
#include "adoptrace/valence.hpp"
