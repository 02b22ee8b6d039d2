#pragma once

#if defined(WEPADIM_VENDORED_JSON)
#include "json.hpp"
#else
#include <nlohmann/json.hpp>
#endif
