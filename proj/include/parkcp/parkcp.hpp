#ifndef PARKCP_PARKCP_HPP
#define PARKCP_PARKCP_HPP

#include "parkcp/error.hpp"
#include "parkcp/model.hpp"
#include "parkcp/rng.hpp"
#include "parkcp/scenario.hpp"
#include "parkcp/channel.hpp"
#include "parkcp/policy.hpp"
#include "parkcp/localize.hpp"
#include "parkcp/coverage.hpp"
#include "parkcp/harness.hpp"
#include "parkcp/config.hpp"

#endif
