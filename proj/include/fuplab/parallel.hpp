#pragma once

namespace fuplab {

/// Worker count for OpenMP kernels: min(FUPLAB_THREADS, hardware threads),
/// or the hardware count when the env var is unset.
int worker_count();

/// True when the serial reference kernels should be used (worker_count()==1
/// or FUPLAB_SERIAL=1). Parallel kernels must agree with their serial
/// references at each module's reporting tolerance.
bool force_serial();

}  // namespace fuplab
