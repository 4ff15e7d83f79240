#pragma once

#include <array>
#include <string>
#include <vector>

#include "grex/expand.hpp"
#include "grex/graph.hpp"
#include "grex/nn.hpp"
#include "grex/spectra.hpp"
#include "grex/tape.hpp"

namespace grex {

// Directed message-passing view of a graph: one state row per node self-loop
// (first n entries) and one per orientation of every undirected edge
// (entries n + 2*edge and n + 2*edge + 1 for (u,v) and (v,u)).
struct DirectedView {
    int n = 0;
    int m = 0;
    std::vector<int> entry_src, entry_dst;
    // message triples (destination entry, left source, right source), in
    // deterministic order: k = i, k = j, then common neighbors ascending
    std::vector<std::array<int, 3>> messages;
    std::vector<int> message_count;  // per entry
    Eigen::VectorXd inv_sqrt_count;

    int entries() const { return n + 2 * m; }
    int selfloop(int i) const { return i; }
    int orientation(int edge, int dir) const { return n + 2 * edge + dir; }
    // entry holding the directed pair (a, b) for an existing edge
    int entry_of(const Graph& g, int a, int b) const;

    static DirectedView build(const Graph& g);
};

struct PpgnDims {
    int d_hidden = 256;
    int d_ppgn = 128;
};

void local_ppgn_init(ParamStore& store, const std::string& prefix, const PpgnDims& dims,
                     Rng& rng);

// One Local PPGN pass over the edge-state table (entries x d_hidden):
// messages phi(x, y) = MLP1(x) * MLP2(y) aggregated per entry, normalized by
// sqrt(message count), combined by gamma(x, y) = MLP3(x || y).
Var local_ppgn_layer(Tape& tape, ParamBinder& params, const std::string& prefix,
                     const PpgnDims& dims, const DirectedView& view, Var states);

// Dense PPGN layer over a full n x n state tensor, flattened row-major to
// (n*n) x d rows. Shares parameter layout with local_ppgn_layer so both can
// run with identical weights. `normalize` divides the k-sum by sqrt(n); the
// raw form implements the layer formula verbatim.
Eigen::MatrixXd ppgn_layer_dense(ParamStore& store, const std::string& prefix,
                                 const PpgnDims& dims, const Eigen::MatrixXd& states, int n,
                                 bool normalize);

struct SignNetSpec {
    int k = 2;             // number of eigenpairs consumed
    int d_signnet = 128;   // hidden width
    int gin_layers = 5;
    int d_emb = 32;        // output embedding width
    double dropout = 0.1;
};

void signnet_init(ParamStore& store, const std::string& prefix, const SignNetSpec& spec,
                  Rng& rng);

// Sign-invariant spectral node embeddings: a GIN is run on +u and -u for each
// eigenpair (eigenvalue appended per node), the two embeddings are averaged,
// results are concatenated over eigenpairs and projected to d_emb.
// Invariance to per-vector sign flips is exact.
Var signnet_embed(Tape& tape, ParamBinder& params, const std::string& prefix,
                  const SignNetSpec& spec, const Graph& g, const EigPairs& eig,
                  bool train_mode, Rng* dropout_rng);

struct DenoiserSpec {
    int d_hidden = 256;
    int d_ppgn = 128;
    int d_emb = 32;
    int layers = 10;
    SignNetSpec signnet;  // signnet.d_emb is kept in sync with d_emb
    double dropout = 0.1;
};

void denoiser_init(ParamStore& store, const DenoiserSpec& spec, Rng& rng);

struct DenoiserInput {
    const ExpansionState* es = nullptr;
    const DirectedView* view = nullptr;  // built over es->expanded
    Eigen::VectorXd v_noisy;             // per expanded node, pre-scaled by c_in
    Eigen::VectorXd e_noisy;             // per expanded edge, pre-scaled by c_in
    Eigen::VectorXd v_self;              // self-conditioning, pre-scaled by c_self
    Eigen::VectorXd e_self;
    double t = 1.0;                      // noise level
    double rho_hat = 0.0;                // reduction fraction conditioning
    double target_n = 1.0;               // final graph size
    bool train_mode = false;
};

struct DenoiserOutput {
    Var v_out;  // n x 1
    Var e_out;  // m x 1, orientation-averaged
};

// Full network F_theta: feature embeddings, `layers` Local PPGN passes, and
// linear readouts over the concatenation of all intermediate states. Node
// quantities live on the self-loop entries.
DenoiserOutput denoiser_forward(Tape& tape, ParamBinder& params, const DenoiserSpec& spec,
                                const DenoiserInput& input, Var node_emb, Rng* dropout_rng);

}  // namespace grex
