#ifndef DTMI_PARALLEL_HPP_
#define DTMI_PARALLEL_HPP_

namespace dtmi {

// Worker-thread cap for the internal parallel loops (Monte Carlo trials and
// neighbor scans). Results are identical for every setting; the knob exists
// for benchmarking and for tests that verify that invariant.
int max_worker_threads();
void set_max_worker_threads(int workers);

}  // namespace dtmi

#endif  // DTMI_PARALLEL_HPP_
