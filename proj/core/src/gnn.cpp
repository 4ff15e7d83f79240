#include "grex/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grex {

DirectedView DirectedView::build(const Graph& g) {
    DirectedView view;
    view.n = g.num_nodes();
    view.m = g.num_edges();
    const int entries = view.entries();
    view.entry_src.resize(entries);
    view.entry_dst.resize(entries);
    for (int i = 0; i < view.n; ++i) view.entry_src[i] = view.entry_dst[i] = i;
    for (int e = 0; e < view.m; ++e) {
        const Edge& edge = g.edge(e);
        view.entry_src[view.orientation(e, 0)] = edge.u;
        view.entry_dst[view.orientation(e, 0)] = edge.v;
        view.entry_src[view.orientation(e, 1)] = edge.v;
        view.entry_dst[view.orientation(e, 1)] = edge.u;
    }

    auto directed_entry = [&](int a, int b) {
        if (a == b) return view.selfloop(a);
        const int e = g.edge_index(a, b);
        return view.orientation(e, a < b ? 0 : 1);
    };

    view.message_count.assign(entries, 0);
    for (int i = 0; i < view.n; ++i) {
        view.messages.push_back({i, i, i});
        for (int j : g.neighbors(i))
            view.messages.push_back({i, directed_entry(i, j), directed_entry(j, i)});
        view.message_count[i] = 1 + static_cast<int>(g.neighbors(i).size());
    }
    for (int e = 0; e < view.m; ++e) {
        for (int dir = 0; dir < 2; ++dir) {
            const int entry = view.orientation(e, dir);
            const int i = view.entry_src[entry];
            const int j = view.entry_dst[entry];
            view.messages.push_back({entry, view.selfloop(i), entry});
            view.messages.push_back({entry, entry, view.selfloop(j)});
            int count = 2;
            // common neighbors, ascending (triangles through k)
            const auto& ni = g.neighbors(i);
            const auto& nj = g.neighbors(j);
            std::size_t a = 0, b = 0;
            while (a < ni.size() && b < nj.size()) {
                if (ni[a] < nj[b]) {
                    ++a;
                } else if (ni[a] > nj[b]) {
                    ++b;
                } else {
                    const int k = ni[a];
                    view.messages.push_back({entry, directed_entry(i, k), directed_entry(k, j)});
                    ++count;
                    ++a;
                    ++b;
                }
            }
            view.message_count[entry] = count;
        }
    }
    view.inv_sqrt_count.resize(entries);
    for (int i = 0; i < entries; ++i)
        view.inv_sqrt_count[i] =
            view.message_count[i] > 0 ? 1.0 / std::sqrt(static_cast<double>(view.message_count[i]))
                                      : 0.0;
    return view;
}

int DirectedView::entry_of(const Graph& g, int a, int b) const {
    if (a == b) return selfloop(a);
    const int e = g.edge_index(a, b);
    if (e < 0) throw std::invalid_argument("entry_of: no such edge");
    return orientation(e, a < b ? 0 : 1);
}

void local_ppgn_init(ParamStore& store, const std::string& prefix, const PpgnDims& dims,
                     Rng& rng) {
    mlp_init(store, prefix + ".phi1", {dims.d_hidden, dims.d_hidden, dims.d_ppgn}, rng);
    mlp_init(store, prefix + ".phi2", {dims.d_hidden, dims.d_hidden, dims.d_ppgn}, rng);
    mlp_init(store, prefix + ".gamma",
             {dims.d_hidden + dims.d_ppgn, dims.d_hidden, dims.d_hidden}, rng);
}

Var local_ppgn_layer(Tape& tape, ParamBinder& params, const std::string& prefix,
                     const PpgnDims& dims, const DirectedView& view, Var states) {
    if (tape.value(states).rows() != view.entries())
        throw std::invalid_argument("local_ppgn_layer: state table misaligned with view");
    const MlpSpec phi_spec{dims.d_hidden, dims.d_hidden, dims.d_ppgn};
    Var m1 = mlp_forward(tape, params, prefix + ".phi1", phi_spec, states);
    Var m2 = mlp_forward(tape, params, prefix + ".phi2", phi_spec, states);

    std::vector<int> dst(view.messages.size()), left(view.messages.size()),
        right(view.messages.size());
    for (std::size_t i = 0; i < view.messages.size(); ++i) {
        dst[i] = view.messages[i][0];
        left[i] = view.messages[i][1];
        right[i] = view.messages[i][2];
    }
    Var msg = tape.hadamard(tape.gather_rows(m1, std::move(left)),
                            tape.gather_rows(m2, std::move(right)));
    Var agg = tape.scatter_sum_rows(msg, std::move(dst), view.entries());
    agg = tape.scale_rows(agg, view.inv_sqrt_count);

    const MlpSpec gamma_spec{dims.d_hidden + dims.d_ppgn, dims.d_hidden, dims.d_hidden};
    return mlp_forward(tape, params, prefix + ".gamma", gamma_spec, tape.concat_cols({states, agg}));
}

Eigen::MatrixXd ppgn_layer_dense(ParamStore& store, const std::string& prefix,
                                 const PpgnDims& dims, const Eigen::MatrixXd& states, int n,
                                 bool normalize) {
    if (states.rows() != static_cast<long>(n) * n)
        throw std::invalid_argument("ppgn_layer_dense: expected n*n rows");
    const MlpSpec phi_spec{dims.d_hidden, dims.d_hidden, dims.d_ppgn};
    Eigen::MatrixXd m1 = mlp_forward(store, prefix + ".phi1", phi_spec, states);
    Eigen::MatrixXd m2 = mlp_forward(store, prefix + ".phi2", phi_spec, states);

    Eigen::MatrixXd mixed(states.rows(), dims.d_ppgn);
    const double scale = normalize ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(dims.d_ppgn);
            for (int k = 0; k < n; ++k)
                acc += m1.row(i * n + k).cwiseProduct(m2.row(k * n + j));
            mixed.row(i * n + j) = acc * scale;
        }
    }
    Eigen::MatrixXd cat(states.rows(), states.cols() + dims.d_ppgn);
    cat << states, mixed;
    const MlpSpec gamma_spec{dims.d_hidden + dims.d_ppgn, dims.d_hidden, dims.d_hidden};
    return mlp_forward(store, prefix + ".gamma", gamma_spec, cat);
}

void signnet_init(ParamStore& store, const std::string& prefix, const SignNetSpec& spec,
                  Rng& rng) {
    linear_init(store, prefix + ".in", 2, spec.d_signnet, rng);
    for (int l = 0; l < spec.gin_layers; ++l)
        mlp_init(store, prefix + ".gin" + std::to_string(l),
                 {spec.d_signnet, spec.d_signnet, spec.d_signnet}, rng);
    linear_init(store, prefix + ".collect", (spec.gin_layers + 1) * spec.d_signnet,
                spec.d_signnet, rng);
    mlp_init(store, prefix + ".head", {spec.k * spec.d_signnet, spec.d_signnet, spec.d_emb},
             rng);
}

namespace {

// One GIN stack pass over node features; returns the per-eigenvector
// embedding of width d_signnet.
Var gin_tower(Tape& tape, ParamBinder& params, const std::string& prefix,
              const SignNetSpec& spec, const Graph& g, Var h,
              const Eigen::MatrixXd* drop) {
    std::vector<int> src, dst;
    src.reserve(2 * g.num_edges());
    dst.reserve(2 * g.num_edges());
    for (const Edge& e : g.edges()) {
        src.push_back(e.u);
        dst.push_back(e.v);
        src.push_back(e.v);
        dst.push_back(e.u);
    }
    std::vector<Var> collected{h};
    const MlpSpec gin_spec{spec.d_signnet, spec.d_signnet, spec.d_signnet};
    for (int l = 0; l < spec.gin_layers; ++l) {
        Var neigh = src.empty()
                        ? tape.input(Eigen::MatrixXd::Zero(g.num_nodes(), spec.d_signnet))
                        : tape.scatter_sum_rows(tape.gather_rows(h, src), dst, g.num_nodes());
        h = mlp_forward(tape, params, prefix + ".gin" + std::to_string(l), gin_spec, neigh);
        collected.push_back(h);
    }
    Var cat = tape.concat_cols(collected);
    if (drop) cat = tape.dropout_mask(cat, *drop);
    return linear(tape, params, prefix + ".collect", cat);
}

}  // namespace

Var signnet_embed(Tape& tape, ParamBinder& params, const std::string& prefix,
                  const SignNetSpec& spec, const Graph& g, const EigPairs& eig,
                  bool train_mode, Rng* dropout_rng) {
    if (eig.values.size() != spec.k)
        throw std::invalid_argument("signnet_embed: expected exactly k eigenpairs (zero-padded)");
    if (eig.vectors.rows() != g.num_nodes())
        throw std::invalid_argument("signnet_embed: eigenvector length mismatch");
    const int n = g.num_nodes();
    std::vector<Var> per_eig;
    for (int i = 0; i < spec.k; ++i) {
        Eigen::MatrixXd pos(n, 2), neg(n, 2);
        pos.col(0) = eig.vectors.col(i);
        neg.col(0) = -eig.vectors.col(i);
        pos.col(1).setConstant(eig.values[i]);
        neg.col(1) = pos.col(1);
        // one shared dropout mask per eigenpair keeps the +/- branches
        // exactly symmetric under sign flips
        Eigen::MatrixXd drop;
        if (train_mode && dropout_rng)
            drop = dropout_mask(n, (spec.gin_layers + 1) * spec.d_signnet, spec.dropout,
                                *dropout_rng);
        const Eigen::MatrixXd* drop_ptr = drop.size() ? &drop : nullptr;
        Var hp = gin_tower(tape, params, prefix, spec, g,
                           linear(tape, params, prefix + ".in", tape.input(pos)), drop_ptr);
        Var hn = gin_tower(tape, params, prefix, spec, g,
                           linear(tape, params, prefix + ".in", tape.input(neg)), drop_ptr);
        per_eig.push_back(tape.scale(tape.add(hp, hn), 0.5));
    }
    const MlpSpec head_spec{spec.k * spec.d_signnet, spec.d_signnet, spec.d_emb};
    return mlp_forward(tape, params, prefix + ".head", head_spec, tape.concat_cols(per_eig));
}

void denoiser_init(ParamStore& store, const DenoiserSpec& spec, Rng& rng) {
    linear_init(store, "emb.v", 1, spec.d_emb, rng);
    linear_init(store, "emb.v_self", 1, spec.d_emb, rng);
    linear_init(store, "emb.e", 1, spec.d_emb, rng);
    linear_init(store, "emb.e_self", 1, spec.d_emb, rng);
    linear_init(store, "emb.t", 1, spec.d_emb, rng);
    linear_init(store, "emb.rho", 1, spec.d_emb, rng);
    linear_init(store, "in.node", 6 * spec.d_emb, spec.d_hidden, rng);
    linear_init(store, "in.edge", 7 * spec.d_emb, spec.d_hidden, rng);
    const PpgnDims dims{spec.d_hidden, spec.d_ppgn};
    for (int l = 0; l < spec.layers; ++l)
        local_ppgn_init(store, "layer" + std::to_string(l), dims, rng);
    linear_init(store, "out.node", (spec.layers + 1) * spec.d_hidden, 1, rng);
    linear_init(store, "out.edge", (spec.layers + 1) * spec.d_hidden, 1, rng);
    SignNetSpec sn = spec.signnet;
    sn.d_emb = spec.d_emb;
    signnet_init(store, "signnet", sn, rng);
}

DenoiserOutput denoiser_forward(Tape& tape, ParamBinder& params, const DenoiserSpec& spec,
                                const DenoiserInput& input, Var node_emb, Rng* dropout_rng) {
    const ExpansionState& es = *input.es;
    const DirectedView& view = *input.view;
    const Graph& gx = es.expanded;
    const int n = gx.num_nodes();
    const int m = gx.num_edges();
    if (input.v_noisy.size() != n || input.v_self.size() != n ||
        input.e_noisy.size() != m || input.e_self.size() != m)
        throw std::invalid_argument("denoiser_forward: channel length mismatch");
    if (tape.value(node_emb).rows() != es.base.num_nodes() ||
        tape.value(node_emb).cols() != spec.d_emb)
        throw std::invalid_argument("denoiser_forward: node embedding shape mismatch");

    // replicate base-node embeddings across each expansion cluster
    Var emb = tape.gather_rows(node_emb, es.node_cluster);

    auto project_scalar = [&](const Eigen::VectorXd& x, const std::string& name) {
        return linear(tape, params, name, tape.input(x));
    };
    Var glob_t = project_scalar(Eigen::VectorXd::Constant(1, std::log(input.t) / 4.0), "emb.t");
    Var glob_rho = project_scalar(Eigen::VectorXd::Constant(1, input.rho_hat), "emb.rho");
    Var glob_n = tape.input(sinusoidal_encoding(input.target_n, spec.d_emb).transpose());
    Var glob = tape.concat_cols({glob_t, glob_rho, glob_n});

    const std::vector<int> zero_n(n, 0);
    Var node_in = tape.concat_cols({project_scalar(input.v_noisy, "emb.v"),
                                    project_scalar(input.v_self, "emb.v_self"), emb,
                                    tape.gather_rows(glob, zero_n)});

    // per-orientation edge features; endpoint embeddings joined in (src, dst) order
    Eigen::VectorXd e_noisy2(2 * m), e_self2(2 * m);
    std::vector<int> src2(2 * m), dst2(2 * m);
    for (int e = 0; e < m; ++e) {
        for (int dir = 0; dir < 2; ++dir) {
            const int row = 2 * e + dir;
            e_noisy2[row] = input.e_noisy[e];
            e_self2[row] = input.e_self[e];
            src2[row] = view.entry_src[view.orientation(e, dir)];
            dst2[row] = view.entry_dst[view.orientation(e, dir)];
        }
    }
    const std::vector<int> zero_2m(2 * m, 0);
    Var edge_in = tape.concat_cols({project_scalar(e_noisy2, "emb.e"),
                                    project_scalar(e_self2, "emb.e_self"),
                                    tape.gather_rows(emb, src2), tape.gather_rows(emb, dst2),
                                    tape.gather_rows(glob, zero_2m)});

    if (input.train_mode && dropout_rng) {
        node_in = tape.dropout_mask(
            node_in, dropout_mask(n, 6 * spec.d_emb, spec.dropout, *dropout_rng));
        edge_in = tape.dropout_mask(
            edge_in, dropout_mask(2 * m, 7 * spec.d_emb, spec.dropout, *dropout_rng));
    }

    Var node_states = linear(tape, params, "in.node", node_in);
    Var edge_states = linear(tape, params, "in.edge", edge_in);

    std::vector<int> node_entries(n), edge_entries(2 * m);
    for (int i = 0; i < n; ++i) node_entries[i] = view.selfloop(i);
    for (int e = 0; e < m; ++e)
        for (int dir = 0; dir < 2; ++dir)
            edge_entries[2 * e + dir] = view.orientation(e, dir);
    Var states = tape.scatter_sum_rows(node_states, node_entries, view.entries());
    if (m > 0)
        states = tape.add(states, tape.scatter_sum_rows(edge_states, edge_entries, view.entries()));

    const PpgnDims dims{spec.d_hidden, spec.d_ppgn};
    std::vector<Var> trace{states};
    for (int l = 0; l < spec.layers; ++l) {
        states = local_ppgn_layer(tape, params, "layer" + std::to_string(l), dims, view, states);
        trace.push_back(states);
    }
    Var readout = tape.concat_cols(trace);
    if (input.train_mode && dropout_rng)
        readout = tape.dropout_mask(readout,
                                    dropout_mask(view.entries(), (spec.layers + 1) * spec.d_hidden,
                                                 spec.dropout, *dropout_rng));

    DenoiserOutput out;
    out.v_out = linear(tape, params, "out.node", tape.gather_rows(readout, node_entries));
    if (m > 0) {
        Var edge_scores = linear(tape, params, "out.edge", tape.gather_rows(readout, edge_entries));
        std::vector<int> dir0(m), dir1(m);
        for (int e = 0; e < m; ++e) {
            dir0[e] = 2 * e;
            dir1[e] = 2 * e + 1;
        }
        out.e_out = tape.scale(tape.add(tape.gather_rows(edge_scores, dir0),
                                        tape.gather_rows(edge_scores, dir1)),
                               0.5);
    } else {
        out.e_out = tape.input(Eigen::MatrixXd::Zero(0, 1));
    }
    return out;
}

}  // namespace grex
