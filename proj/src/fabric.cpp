// SPDX-License-Identifier: Apache-2.0
#include "fluidmimo/fabric.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <stdexcept>

namespace fluidmimo {

namespace {
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}
}  // namespace

void Transcript::log(const std::string& phase, const std::string& tag, Direction dir, int rows,
                     int cols, std::uint64_t bytes, int du_id) {
  total_bytes += bytes;
  ++total_messages;
  if (record_messages)
    messages.push_back({phase, tag, dir, rows, cols, bytes, du_id});
}

void Transcript::clear() {
  messages.clear();
  total_bytes = 0;
  total_messages = 0;
  phase_ms.clear();
}

void export_messages_jsonl(const std::vector<MessageRecord>& messages, std::ostream& os) {
  for (const auto& m : messages) {
    os << "{\"phase\":\"" << m.phase << "\",\"direction\":\""
       << (m.direction == Direction::kCuToDu ? "cu_to_du" : "du_to_cu") << "\",\"tag\":\""
       << m.tag << "\",\"rows\":" << m.rows << ",\"cols\":" << m.cols << ",\"bytes\":" << m.bytes
       << ",\"du_id\":" << m.du_id << "}\n";
  }
}

void Transcript::export_jsonl(std::ostream& os) const { export_messages_jsonl(messages, os); }

namespace detail {

DuPool::DuPool(int workers) {
  threads_.reserve(static_cast<size_t>(workers));
  for (int i = 0; i < workers; ++i) threads_.emplace_back([this, i] { worker_loop(i); });
}

DuPool::~DuPool() {
  {
    std::lock_guard<std::mutex> lk(mu_);
    stop_ = true;
  }
  cv_work_.notify_all();
  for (auto& t : threads_) t.join();
}

void DuPool::worker_loop(int id) {
  std::uint64_t seen = 0;
  for (;;) {
    const std::function<void(int)>* body = nullptr;
    {
      std::unique_lock<std::mutex> lk(mu_);
      cv_work_.wait(lk, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      body = body_;
    }
    try {
      (*body)(id);
    } catch (...) {
      std::lock_guard<std::mutex> lk(mu_);
      if (!error_) error_ = std::current_exception();
    }
    {
      std::lock_guard<std::mutex> lk(mu_);
      if (--remaining_ == 0) cv_done_.notify_all();
    }
  }
}

void DuPool::run(const std::function<void(int)>& body) {
  {
    std::lock_guard<std::mutex> lk(mu_);
    body_ = &body;
    error_ = nullptr;
    remaining_ = static_cast<int>(threads_.size());
    ++generation_;
  }
  cv_work_.notify_all();
  std::unique_lock<std::mutex> lk(mu_);
  cv_done_.wait(lk, [&] { return remaining_ == 0; });
  body_ = nullptr;
  if (error_) {
    auto err = error_;
    error_ = nullptr;
    lk.unlock();
    std::rethrow_exception(err);
  }
}

}  // namespace detail

Fabric::Fabric(FabricTopology topo, SchedulerKind kind) : topo_(topo), kind_(kind) {
  if (topo_.clusters < 1) throw std::invalid_argument("cluster count must be positive");
  if (topo_.total_rows % topo_.clusters != 0)
    throw std::invalid_argument("clusters must divide the row count");
  if (kind_ == SchedulerKind::kParallel && topo_.clusters > 1)
    pool_ = std::make_unique<detail::DuPool>(topo_.clusters);
}

void Fabric::du_phase(const std::string& phase, const std::function<void(int)>& body) {
  const auto t0 = Clock::now();
  if (pool_) {
    pool_->run(body);
  } else {
    for (int c = 0; c < topo_.clusters; ++c) body(c);
  }
  transcript_.phase_ms[phase] += ms_since(t0);
}

void Fabric::cu_phase(const std::string& phase, const std::function<void()>& body) {
  const auto t0 = Clock::now();
  body();
  transcript_.phase_ms[phase] += ms_since(t0);
}

std::vector<arma::cx_mat> Fabric::mul_round(const std::string& phase, const std::string& tag,
                                            int blocks,
                                            const std::function<std::vector<arma::cx_mat>(int)>& local) {
  const int C = topo_.clusters;
  std::vector<std::vector<arma::cx_mat>> slot(static_cast<size_t>(C));
  du_phase(phase, [&](int c) { slot[static_cast<size_t>(c)] = local(c); });

  for (int c = 0; c < C; ++c)
    if (static_cast<int>(slot[static_cast<size_t>(c)].size()) != blocks)
      throw std::runtime_error("aggregation round: cluster returned wrong block count");

  std::vector<arma::cx_mat> out(static_cast<size_t>(blocks));
  for (int c = 0; c < C; ++c) {
    for (int b = 0; b < blocks; ++b) {
      const arma::cx_mat& part = slot[static_cast<size_t>(c)][static_cast<size_t>(b)];
      transcript_.log(phase, tag, Direction::kDuToCu, static_cast<int>(part.n_rows),
                      static_cast<int>(part.n_cols), 16ull * part.n_elem, c);
      arma::cx_mat& acc = out[static_cast<size_t>(b)];
      if (c == 0) {
        acc = part;
      } else {
        if (acc.n_rows != part.n_rows || acc.n_cols != part.n_cols)
          throw std::runtime_error("aggregation round: block shape differs across clusters");
        acc += part;
      }
    }
  }
  return out;
}

void Fabric::check_allowed(int rows, int cols) const {
  const auto& ok = topo_.allowed_dims;
  const bool r = std::find(ok.begin(), ok.end(), rows) != ok.end();
  const bool c = std::find(ok.begin(), ok.end(), cols) != ok.end();
  if (!r || !c)
    throw std::invalid_argument("broadcast payload of " + std::to_string(rows) + "x" +
                                std::to_string(cols) +
                                " is not array-size independent (dimension not on allowed list)");
}

void Fabric::broadcast(const std::string& phase, const std::string& tag, int rows, int cols,
                       bool complex_payload) {
  check_allowed(rows, cols);
  const std::uint64_t bytes =
      static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols) * (complex_payload ? 16 : 8);
  for (int c = 0; c < topo_.clusters; ++c)
    transcript_.log(phase, tag, Direction::kCuToDu, rows, cols, bytes, c);
}

void Fabric::broadcast_mat(const std::string& phase, const std::string& tag, const arma::cx_mat& m) {
  broadcast(phase, tag, static_cast<int>(m.n_rows), static_cast<int>(m.n_cols), true);
}

void Fabric::broadcast_vec(const std::string& phase, const std::string& tag, const arma::vec& v) {
  broadcast(phase, tag, static_cast<int>(v.n_elem), 1, false);
}

void Fabric::broadcast_scalar(const std::string& phase, const std::string& tag) {
  broadcast(phase, tag, 1, 1, false);
}

double Fabric::reduce_sum(const std::string& phase, const std::string& tag,
                          const std::function<double(int)>& local) {
  std::vector<double> vals(static_cast<size_t>(topo_.clusters), 0.0);
  du_phase(phase, [&](int c) { vals[static_cast<size_t>(c)] = local(c); });
  double acc = 0.0;
  for (int c = 0; c < topo_.clusters; ++c) {
    transcript_.log(phase, tag, Direction::kDuToCu, 1, 1, 8, c);
    acc += vals[static_cast<size_t>(c)];
  }
  return acc;
}

double Fabric::reduce_max(const std::string& phase, const std::string& tag,
                          const std::function<double(int)>& local) {
  std::vector<double> vals(static_cast<size_t>(topo_.clusters), 0.0);
  du_phase(phase, [&](int c) { vals[static_cast<size_t>(c)] = local(c); });
  double acc = vals[0];
  transcript_.log(phase, tag, Direction::kDuToCu, 1, 1, 8, 0);
  for (int c = 1; c < topo_.clusters; ++c) {
    transcript_.log(phase, tag, Direction::kDuToCu, 1, 1, 8, c);
    acc = std::max(acc, vals[static_cast<size_t>(c)]);
  }
  return acc;
}

arma::vec Fabric::reduce_vec_sum(const std::string& phase, const std::string& tag, int len,
                                 const std::function<arma::vec(int)>& local) {
  std::vector<arma::vec> vals(static_cast<size_t>(topo_.clusters));
  du_phase(phase, [&](int c) { vals[static_cast<size_t>(c)] = local(c); });
  arma::vec acc(static_cast<arma::uword>(len), arma::fill::zeros);
  for (int c = 0; c < topo_.clusters; ++c) {
    const arma::vec& v = vals[static_cast<size_t>(c)];
    if (static_cast<int>(v.n_elem) != len)
      throw std::runtime_error("vector reduce: length differs across clusters");
    transcript_.log(phase, tag, Direction::kDuToCu, len, 1, 8ull * static_cast<std::uint64_t>(len), c);
    acc += v;
  }
  return acc;
}

}  // namespace fluidmimo
