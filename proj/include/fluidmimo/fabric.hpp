// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "fluidmimo/common.hpp"

namespace fluidmimo {

enum class SchedulerKind { kSequential, kParallel };
enum class Direction { kCuToDu, kDuToCu };

struct MessageRecord {
  std::string phase;
  std::string tag;
  Direction direction = Direction::kDuToCu;
  int rows = 0;
  int cols = 0;
  std::uint64_t bytes = 0;
  int du_id = 0;  // receiver for CU->DU, sender for DU->CU
};

// Ledger of everything that crossed the CU/DU boundary. Byte and message
// totals are always exact; individual records are kept only while
// `record_messages` is on, so long runs can cap their memory.
struct Transcript {
  bool record_messages = true;
  std::vector<MessageRecord> messages;
  std::uint64_t total_bytes = 0;
  std::uint64_t total_messages = 0;
  std::map<std::string, double> phase_ms;

  void log(const std::string& phase, const std::string& tag, Direction dir, int rows, int cols,
           std::uint64_t bytes, int du_id);
  void clear();
  // One JSON object per line: {phase, direction, tag, rows, cols, bytes, du_id}.
  void export_jsonl(std::ostream& os) const;
};

void export_messages_jsonl(const std::vector<MessageRecord>& messages, std::ostream& os);

struct FabricTopology {
  int clusters = 1;
  int total_rows = 1;  // transmit antennas, split evenly across clusters
  // Dimensions a CU->DU payload may have. Populated with array-size
  // independent quantities (1, d, N, K, path counts); anything else is
  // rejected at send time.
  std::vector<int> allowed_dims;

  int rows_per_cluster() const { return total_rows / clusters; }
};

namespace detail {

// One long-lived worker per cluster; run() executes body(c) on worker c for
// every c and blocks until all are done.
class DuPool {
 public:
  explicit DuPool(int workers);
  ~DuPool();
  void run(const std::function<void(int)>& body);

 private:
  void worker_loop(int id);

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_work_, cv_done_;
  const std::function<void(int)>* body_ = nullptr;
  std::uint64_t generation_ = 0;
  int remaining_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace detail

// Bulk-synchronous CU/DU message fabric. Executes per-cluster work either
// sequentially or on a pool with one worker per cluster; aggregation
// always folds in ascending cluster order so both schedulers produce
// bitwise identical numbers.
class Fabric {
 public:
  Fabric(FabricTopology topo, SchedulerKind kind);

  const FabricTopology& topology() const { return topo_; }
  SchedulerKind scheduler() const { return kind_; }
  Transcript& transcript() { return transcript_; }
  const Transcript& transcript() const { return transcript_; }
  int clusters() const { return topo_.clusters; }

  // Runs body(c) for every cluster and waits for all of them (one
  // bulk-synchronous phase). Wall time is accumulated per phase name.
  void du_phase(const std::string& phase, const std::function<void(int)>& body);

  // Central-unit-only work, timed under the same phase accounting.
  void cu_phase(const std::string& phase, const std::function<void()>& body);

  // Aggregated local products: local(c) returns `blocks` matrices, the
  // fabric ships each to the CU and sums them in ascending cluster order.
  // Throws if a cluster returns the wrong count or mismatched shapes.
  std::vector<arma::cx_mat> mul_round(const std::string& phase, const std::string& tag,
                                      int blocks,
                                      const std::function<std::vector<arma::cx_mat>(int)>& local);

  // CU -> all DUs. Only dimension bookkeeping crosses here (state delivery
  // is by shared memory); every dimension must be on the allowed list.
  void broadcast(const std::string& phase, const std::string& tag, int rows, int cols,
                 bool complex_payload);
  void broadcast_mat(const std::string& phase, const std::string& tag, const arma::cx_mat& m);
  void broadcast_vec(const std::string& phase, const std::string& tag, const arma::vec& v);
  void broadcast_scalar(const std::string& phase, const std::string& tag);

  // Scalar folds over per-cluster contributions, ascending cluster order.
  double reduce_sum(const std::string& phase, const std::string& tag,
                    const std::function<double(int)>& local);
  double reduce_max(const std::string& phase, const std::string& tag,
                    const std::function<double(int)>& local);
  // Elementwise sum of per-cluster real vectors of length `len`.
  arma::vec reduce_vec_sum(const std::string& phase, const std::string& tag, int len,
                           const std::function<arma::vec(int)>& local);

 private:
  void check_allowed(int rows, int cols) const;

  FabricTopology topo_;
  SchedulerKind kind_;
  Transcript transcript_;
  std::unique_ptr<detail::DuPool> pool_;
};

}  // namespace fluidmimo
