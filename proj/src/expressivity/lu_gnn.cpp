#include "sbdd/expressivity/lu_gnn.hpp"

#include <array>
#include <cmath>

#include "sbdd/error.hpp"

namespace sbdd::expressivity {

namespace {

Eigen::VectorXd token_vector(std::uint64_t seed, char kind, const std::string& token, int dim) {
  Rng r = Rng(seed).split(stable_hash(std::string(1, kind) + token));
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = r.normal();
  return v;
}

}  // namespace

LuGnn make_lu_gnn(Rng& rng, int layers, int hidden, Mode mode) {
  if (layers < 0 || hidden < 1) throw ValidationError("make_lu_gnn: bad sizes");
  LuGnn net;
  net.mode = mode;
  net.hidden = hidden;
  net.token_seed = rng();
  const int msg_in = 2 * hidden + (mode == Mode::LU3D ? 1 : 0);
  const std::array<nn::Activation, 2> acts{nn::Activation::SiLU, nn::Activation::Identity};
  for (int l = 0; l < layers; ++l) {
    const std::array<int, 3> phi_dims{msg_in, hidden, hidden};
    const std::array<int, 3> comb_dims{2 * hidden, hidden, hidden};
    net.phi.push_back(nn::make_mlp<double>(phi_dims, acts, rng));
    net.combine.push_back(nn::make_mlp<double>(comb_dims, acts, rng));
  }
  return net;
}

std::vector<Eigen::MatrixXd> lu_gnn_embeddings(const LuGnn& net, const FeaturedGraph& g) {
  if (net.mode == Mode::LU3D && !g.coords()) throw ValidationError("LU3D network needs coordinates");
  const int n = g.n_nodes(), d = net.hidden;
  Eigen::MatrixXd h(d, n);
  for (int v = 0; v < n; ++v) h.col(v) = token_vector(net.token_seed, 'n', g.nodes()[static_cast<std::size_t>(v)], d);
  const int m = 2 * g.n_edges();
  const int msg_in = 2 * d + (net.mode == Mode::LU3D ? 1 : 0);
  // per directed edge: receiving node, sending node, static part of the input
  std::vector<int> dst, src;
  Eigen::MatrixXd edge_part(msg_in - d, m);
  for (int e = 0; e < g.n_edges(); ++e) {
    const auto& x = g.edges()[static_cast<std::size_t>(e)];
    Eigen::VectorXd part(msg_in - d);
    part.head(d) = token_vector(net.token_seed, 'e', x.feature, d);
    if (net.mode == Mode::LU3D) {
      part[d] = std::llround((g.coords()->col(x.u) - g.coords()->col(x.v)).norm() * 1e6) * 1e-6;
    }
    for (int k = 0; k < 2; ++k) {
      edge_part.col(2 * e + k) = part;
      dst.push_back(k ? x.u : x.v);
      src.push_back(k ? x.v : x.u);
    }
  }
  std::vector<Eigen::MatrixXd> out{h};
  for (std::size_t l = 0; l < net.phi.size(); ++l) {
    Eigen::MatrixXd in(msg_in, m);
    for (int k = 0; k < m; ++k) {
      in.col(k).head(d) = h.col(src[static_cast<std::size_t>(k)]);
      in.col(k).tail(msg_in - d) = edge_part.col(k);
    }
    const Eigen::MatrixXd msg = m ? nn::mlp_forward(net.phi[l], in) : Eigen::MatrixXd(d, 0);
    Eigen::MatrixXd agg = Eigen::MatrixXd::Zero(d, n);
    for (int k = 0; k < m; ++k) agg.col(dst[static_cast<std::size_t>(k)]) += msg.col(k);
    Eigen::MatrixXd cat(2 * d, n);
    cat << h, agg;
    h = nn::mlp_forward(net.combine[l], cat);
    out.push_back(h);
  }
  return out;
}

std::vector<double> paired_deviation(const LuGnn& net, const FeaturedGraph& g1, const FeaturedGraph& g2,
                                     const std::vector<std::pair<int, int>>& pairing) {
  const auto a = lu_gnn_embeddings(net, g1);
  const auto b = lu_gnn_embeddings(net, g2);
  std::vector<double> dev;
  for (std::size_t l = 0; l < a.size(); ++l) {
    double worst = 0.0;
    for (const auto& [u, v] : pairing) worst = std::max(worst, (a[l].col(u) - b[l].col(v)).cwiseAbs().maxCoeff());
    dev.push_back(worst);
  }
  return dev;
}

}  // namespace sbdd::expressivity
