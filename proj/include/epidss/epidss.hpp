#pragma once

#include "epidss/admiralty.hpp"
#include "epidss/bayes/compiled.hpp"
#include "epidss/bayes/exact.hpp"
#include "epidss/bayes/io.hpp"
#include "epidss/bayes/network.hpp"
#include "epidss/bayes/sampling.hpp"
#include "epidss/bayes/soft_evidence.hpp"
#include "epidss/consensus.hpp"
#include "epidss/epi/ensemble.hpp"
#include "epidss/epi/sir.hpp"
#include "epidss/error.hpp"
#include "epidss/preparedness.hpp"
#include "epidss/risk_bias.hpp"
#include "epidss/service/api.hpp"
#include "epidss/service/store.hpp"
