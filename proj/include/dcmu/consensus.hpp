#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dcmu/linalg.hpp"

namespace dcmu {

// Decentralized estimate of the weighted graph's algebraic connectivity and
// of each robot's Fiedler-vector component.
//
// Every round a robot exchanges one message with each neighbor (a_ij > 0) and
// takes one shifted power-iteration step on its own component,
//     x_i <- x_i - (1/c) * sum_j a_ij (x_i - x_j),
// which preserves the network mean of x for any common shift c. Rounds are
// grouped into blocks of `team_size` rounds. At a block's first round each
// robot records a snapshot (x_i, x_i * (Lx)_i, degree) and the snapshots are
// flooded hop by hop inside the messages; after team_size - 1 hops every robot
// of a connected component holds the same complete table. From it all robots
// compute the same mean, deflated norm and Rayleigh quotient, so deflation,
// normalization and the shift update are applied identically everywhere
// without any robot seeing more than its neighbors' messages.

/// One robot's flooded snapshot for the current block.
struct FloodEntry {
  bool present{false};
  double x{0.0};
  double x_lx{0.0};    // x_i * (L x)_i
  double degree{0.0};  // sum_j a_ij
};

struct ConsensusParams {
  int rounds_per_step{200};       // 1000 Hz messaging inside a 0.2 s control step
  double shift_margin{1.0};       // c = 2 * max degree + margin
  std::uint64_t seed{0};          // initialization / restart stream
};

struct ConsensusState {
  std::size_t id{0};
  std::size_t team_size{1};
  double x_tilde{0.0};        // power-iteration component
  double lambda2_tilde{0.0};  // latest estimate, >= 0
  double e2_component{0.0};   // unit-norm Fiedler component from the last complete block
  bool estimate_complete{false};
  double shift{1.0};
  std::uint64_t round{0};
  std::uint64_t block{0};
  std::vector<FloodEntry> table;
  std::uint32_t restarts{0};
};

/// What a robot broadcasts to its neighbors at the start of a round.
struct NeighborMessage {
  std::size_t sender{0};
  double x_tilde{0.0};
  double e2_component{0.0};
  std::uint64_t block{0};
  std::span<const FloodEntry> table;
};

struct InboxEntry {
  const NeighborMessage* message{nullptr};
  double weight{0.0};  // a_ij as computed by the receiver
};

struct ConsensusDiagnostics {
  std::size_t dropped_messages{0};
  std::size_t restarts{0};
};

/// Fresh estimator state; x_tilde drawn from N(0, 1) on a stream keyed by
/// (seed, id).
ConsensusState make_consensus_state(std::size_t id, std::size_t team_size,
                                    const ConsensusParams& params);

NeighborMessage make_message(const ConsensusState& state);

/// One synchronous round for a single robot. Reads only its own state and the
/// inbox. Messages with non-finite fields are dropped and counted.
ConsensusState consensus_round(const ConsensusState& self, std::span<const InboxEntry> inbox,
                               const ConsensusParams& params,
                               ConsensusDiagnostics* diag = nullptr);

/// consensus_round writing into `out`, reusing its storage.
void consensus_round_into(const ConsensusState& self, std::span<const InboxEntry> inbox,
                          const ConsensusParams& params, ConsensusDiagnostics* diag,
                          ConsensusState& out);

enum class ExecPolicy { serial, parallel };

/// `rounds` lockstep rounds over all robots; robot i hears robot j iff
/// weights(i, j) > 0. All messages read in round k were written in round k-1,
/// so the parallel policy gives bitwise the same result as the serial one.
ConsensusDiagnostics run_consensus_epoch(std::span<ConsensusState> states,
                                         const SquareMatrix& weights, int rounds,
                                         const ConsensusParams& params,
                                         ExecPolicy policy = ExecPolicy::serial);

}  // namespace dcmu
