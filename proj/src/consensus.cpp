#include "dcmu/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

#include "dcmu/robot_model.hpp"

namespace dcmu {

namespace {

double draw_component(std::uint64_t seed, std::size_t id, std::uint32_t restarts) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id), restarts, 0x66696564u};
  Rng rng(seq);
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

double initial_shift(std::size_t team_size, double margin) {
  // Weights are at most 1, so 2 (n - 1) bounds the Laplacian spectrum.
  return 2.0 * static_cast<double>(team_size > 0 ? team_size - 1 : 0) + margin;
}

bool message_finite(const NeighborMessage& m) {
  if (!std::isfinite(m.x_tilde) || !std::isfinite(m.e2_component)) return false;
  return std::all_of(m.table.begin(), m.table.end(), [](const FloodEntry& e) {
    return !e.present ||
           (std::isfinite(e.x) && std::isfinite(e.x_lx) && std::isfinite(e.degree));
  });
}

}  // namespace

ConsensusState make_consensus_state(std::size_t id, std::size_t team_size,
                                    const ConsensusParams& params) {
  if (team_size == 0 || id >= team_size) {
    throw std::invalid_argument("make_consensus_state: id out of range");
  }
  ConsensusState s;
  s.id = id;
  s.team_size = team_size;
  s.x_tilde = draw_component(params.seed, id, 0);
  s.shift = initial_shift(team_size, params.shift_margin);
  s.table.assign(team_size, FloodEntry{});
  return s;
}

NeighborMessage make_message(const ConsensusState& state) {
  return {state.id, state.x_tilde, state.e2_component, state.block, state.table};
}

void consensus_round_into(const ConsensusState& self, std::span<const InboxEntry> inbox,
                          const ConsensusParams& params, ConsensusDiagnostics* diag,
                          ConsensusState& next) {
  next.id = self.id;
  next.team_size = self.team_size;
  next.x_tilde = self.x_tilde;
  next.lambda2_tilde = self.lambda2_tilde;
  next.e2_component = self.e2_component;
  next.estimate_complete = self.estimate_complete;
  next.shift = self.shift;
  next.round = self.round;
  next.block = self.block;
  next.table.assign(self.table.begin(), self.table.end());
  next.restarts = self.restarts;
  const std::uint64_t block_len = self.team_size;
  const std::uint64_t phase = self.round % block_len;
  const std::uint64_t block = self.round / block_len;

  double lx = 0.0;
  double degree = 0.0;
  for (const InboxEntry& in : inbox) {
    if (in.message == nullptr || in.weight <= 0.0) continue;
    if (!message_finite(*in.message) || !std::isfinite(in.weight)) {
      if (diag != nullptr) ++diag->dropped_messages;
      continue;
    }
    lx += in.weight * (self.x_tilde - in.message->x_tilde);
    degree += in.weight;
  }

  if (phase == 0) {
    std::fill(next.table.begin(), next.table.end(), FloodEntry{});
    next.table[self.id] = {true, self.x_tilde, self.x_tilde * lx, degree};
    next.block = block;
  } else {
    for (const InboxEntry& in : inbox) {
      if (in.message == nullptr || in.weight <= 0.0) continue;
      const NeighborMessage& m = *in.message;
      if (m.block != block || m.table.size() != next.table.size() || !message_finite(m)) continue;
      for (std::size_t k = 0; k < next.table.size(); ++k) {
        if (!next.table[k].present && m.table[k].present) next.table[k] = m.table[k];
      }
    }
  }

  next.x_tilde = self.x_tilde - lx / self.shift;
  next.round = self.round + 1;

  if (phase + 1 == block_len) {
    std::size_t count = 0;
    double sum_x = 0.0;
    double sum_xlx = 0.0;
    double sum_x2 = 0.0;
    double max_degree = 0.0;
    for (const FloodEntry& e : next.table) {
      if (!e.present) continue;
      ++count;
      sum_x += e.x;
      sum_xlx += e.x_lx;
      sum_x2 += e.x * e.x;
      max_degree = std::max(max_degree, e.degree);
    }
    const bool complete = count == self.team_size;
    if (count < 2) {
      // Isolated: nothing to estimate.
      next.lambda2_tilde = 0.0;
      next.e2_component = 0.0;
      next.estimate_complete = false;
    } else {
      const double mean = sum_x / static_cast<double>(count);
      const double spread = sum_x2 - static_cast<double>(count) * mean * mean;
      if (!(spread > 1e-24 * std::max(sum_x2, 1e-300))) {
        // Component aligned with the ones vector: every robot of the
        // component sees the same table and restarts together.
        ++next.restarts;
        next.x_tilde = draw_component(params.seed, self.id, next.restarts);
        next.lambda2_tilde = 0.0;
        next.e2_component = 0.0;
        next.estimate_complete = false;
        if (diag != nullptr) ++diag->restarts;
      } else {
        const double norm = std::sqrt(spread);
        next.lambda2_tilde = complete ? std::max(0.0, sum_xlx / spread) : 0.0;
        next.e2_component = complete ? (next.table[self.id].x - mean) / norm : 0.0;
        next.estimate_complete = complete;
        next.x_tilde = (next.x_tilde - mean) / norm;
      }
      next.shift = 2.0 * max_degree + params.shift_margin;
    }
  }
}

ConsensusState consensus_round(const ConsensusState& self, std::span<const InboxEntry> inbox,
                               const ConsensusParams& params, ConsensusDiagnostics* diag) {
  ConsensusState next;
  consensus_round_into(self, inbox, params, diag, next);
  return next;
}

ConsensusDiagnostics run_consensus_epoch(std::span<ConsensusState> states,
                                         const SquareMatrix& weights, int rounds,
                                         const ConsensusParams& params, ExecPolicy policy) {
  const std::size_t n = states.size();
  if (weights.size() != n) throw std::invalid_argument("run_consensus_epoch: size mismatch");
  if (rounds < 1) throw std::invalid_argument("run_consensus_epoch: rounds must be >= 1");

  std::vector<ConsensusState> current(states.begin(), states.end());
  std::vector<ConsensusState> next = current;
  std::vector<NeighborMessage> outbox(n);
  std::vector<std::vector<InboxEntry>> inboxes(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && weights(i, j) > 0.0) inboxes[i].push_back({&outbox[j], weights(i, j)});
    }
  }

  std::vector<ConsensusDiagnostics> per_robot(n);
  const long long count = static_cast<long long>(n);
  for (int r = 0; r < rounds; ++r) {
    for (std::size_t i = 0; i < n; ++i) outbox[i] = make_message(current[i]);
#pragma omp parallel for schedule(static) if (policy == ExecPolicy::parallel)
    for (long long i = 0; i < count; ++i) {
      const auto k = static_cast<std::size_t>(i);
      consensus_round_into(current[k], inboxes[k], params, &per_robot[k], next[k]);
    }
    std::swap(current, next);
  }
  std::copy(current.begin(), current.end(), states.begin());

  ConsensusDiagnostics total;
  for (const auto& d : per_robot) {
    total.dropped_messages += d.dropped_messages;
    total.restarts += d.restarts;
  }
  return total;
}

}  // namespace dcmu
