#pragma once

namespace crossflow::detail {

// Applies CROSSFLOW_LOG_LEVEL (trace, debug, info, warn, error, off) once per
// process. The default level is warn.
void init_logging();

}  // namespace crossflow::detail
