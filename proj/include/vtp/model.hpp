#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vtp/autodiff.hpp"
#include "vtp/dataset.hpp"
#include "vtp/domain.hpp"
#include "vtp/gradcheck.hpp"

namespace vtp::model {

struct ModelConfig {
  int hidden = 6;
  int input = 2;
  int t_obs = 5;
  int t_pred = 5;
  domain::BinSpec bins;
  bool use_spatial = true;
  bool use_temporal = true;
  bool normalize_pool = true;   // divide the pooled state by the weight sum
  double domain_init_nmi = 0.5;
};

// vanilla | temporal | spatial | full
std::string variant_name(const ModelConfig& cfg);
void apply_variant(ModelConfig& cfg, const std::string& name);
std::vector<std::string> variant_names();

struct LstmParams {
  ad::Tensor wx_i, wh_i, b_i;
  ad::Tensor wx_f, wh_f, b_f;
  ad::Tensor wx_o, wh_o, b_o;
  ad::Tensor wx_g, wh_g, b_g;
};

struct ModelParams {
  ModelConfig cfg;
  LstmParams enc;
  LstmParams dec;
  ad::Tensor domain_table;  // {n_bearing, n_heading}, nmi after relu
  ad::Tensor w_att, b_att;  // {H, 2H}, {H}
  ad::Tensor w_out, b_out;  // {input, H}, {input}

  // Gate matrices uniform in [-1/sqrt(H), 1/sqrt(H)], forget bias +1,
  // other biases 0, domain table filled with domain_init_nmi.
  static ModelParams init(const ModelConfig& cfg, std::uint64_t seed);

  std::vector<ad::NamedParam> named_params();  // stable order
  void zero_grad();
  bool finite() const;
};

// Per-tape leases of the trainable tensors.
struct LstmRefs {
  ad::Ref wx_i, wh_i, b_i, wx_f, wh_f, b_f, wx_o, wh_o, b_o, wx_g, wh_g, b_g;
};
struct ParamRefs {
  LstmRefs enc, dec;
  ad::Ref domain_table, w_att, b_att, w_out, b_out;
};
ParamRefs lease(ad::Tape& tape, ModelParams& params);

// Standard gated update; h_in receives the spatially weighted state while
// the cell state passes through unweighted.
std::pair<ad::Ref, ad::Ref> lstm_cell(ad::Tape& tape, const LstmRefs& p, ad::Ref x, ad::Ref h_in,
                                      ad::Ref c_in);

// Vessel geometry of one frame in normalized coordinates.
struct FrameGeometry {
  std::vector<double> x, y;           // nmi
  std::vector<double> heading_deg;    // compass
  int n() const { return static_cast<int>(x.size()); }
};

// w[j*n+i] = influence of vessel j on vessel i = relu(S(theta,phi) - d).
// Self weights are fixed constants of 1. Coincident vessels use bearing 0.
std::vector<ad::Ref> spatial_weights(ad::Tape& tape, ad::Ref domain_table,
                                     const domain::BinSpec& bins, const FrameGeometry& geom);

// pooled_i = sum_j w[j][i] h_j, divided by sum_j w[j][i] when normalize is
// set (the denominator is >= 1 because the self weight is 1).
std::vector<ad::Ref> spatial_pool(ad::Tape& tape, std::span<const ad::Ref> weights,
                                  std::span<const ad::Ref> hidden, bool normalize);

// Luong dot attention over the encoder's pooled states followed by the
// 2H -> H combination tanh(Wc [C; query] + b).
ad::Ref temporal_attend(ad::Tape& tape, ad::Ref query, std::span<const ad::Ref> keys,
                        ad::Ref w_att, ad::Ref b_att, std::vector<double>* alpha_out = nullptr);

struct ForwardTrace {
  // alignment vectors per (decode step, vessel), row-major
  std::vector<std::vector<double>> alignments;
};

struct Prediction {
  int n = 0;
  int t_pred = 0;
  std::vector<ad::Ref> refs;  // [k*n+v], 2-vectors on the tape
  std::vector<double> xy;     // [ (k*n+v)*2 + {0,1} ]

  double x(int k, int v) const { return xy[(k * n + v) * 2 + 0]; }
  double y(int k, int v) const { return xy[(k * n + v) * 2 + 1]; }
  ad::Ref ref(int k, int v) const { return refs[static_cast<std::size_t>(k) * n + v]; }
};

// Joint encode/decode over all vessels of one sample. The decoder consumes
// ground-truth previous positions under teacher forcing and its own
// previous predictions otherwise; positions are decoded as deltas added to
// the previous position.
Prediction forward(ad::Tape& tape, ModelParams& params, const dataset::Sample& sample,
                   bool teacher_forcing, ForwardTrace* trace = nullptr);

// Headings per (t, v) derived from consecutive positions (lookahead at the
// first step, carry across stationary gaps).
std::vector<double> derive_headings(const dataset::Sample& sample);

// Count of (ordered vessel pair, pooling step) observations per domain
// cell over the ground-truth geometry the trainer sees; cells that stay at
// zero provably receive no gradient.
std::vector<std::int64_t> bin_exposure(const std::vector<dataset::Sample>& samples,
                                       const ModelConfig& cfg);

}  // namespace vtp::model
