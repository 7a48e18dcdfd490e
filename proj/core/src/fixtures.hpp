#pragma once

namespace scc::fixtures {

extern const char* const kStatesAdjacencyCsv;
extern const char* const kPartitionDisjointCsv;
extern const char* const kPartitionContiguousCsv;

}  // namespace scc::fixtures
