#include "vtp/model.hpp"

#include <cmath>

#include "vtp/geo.hpp"
#include "vtp/rng.hpp"

namespace vtp::model {

namespace {

double compass_deg(double dx_east, double dy_north) {
  return geo::normalize_deg(std::atan2(dx_east, dy_north) * geo::kRadToDeg);
}

void init_matrix(ad::Tensor& t, const ad::Shape& shape, Rng& rng, double bound) {
  t = ad::Tensor::zeros(shape);
  for (double& x : t.v) x = rng.uniform(-bound, bound);
}

void init_lstm(LstmParams& p, int hidden, int input, Rng& rng) {
  const double k = 1.0 / std::sqrt(static_cast<double>(hidden));
  init_matrix(p.wx_i, {hidden, input}, rng, k);
  init_matrix(p.wh_i, {hidden, hidden}, rng, k);
  p.b_i = ad::Tensor::zeros({hidden});
  init_matrix(p.wx_f, {hidden, input}, rng, k);
  init_matrix(p.wh_f, {hidden, hidden}, rng, k);
  p.b_f = ad::Tensor::full({hidden}, 1.0);  // standard forget-gate bias
  init_matrix(p.wx_o, {hidden, input}, rng, k);
  init_matrix(p.wh_o, {hidden, hidden}, rng, k);
  p.b_o = ad::Tensor::zeros({hidden});
  init_matrix(p.wx_g, {hidden, input}, rng, k);
  init_matrix(p.wh_g, {hidden, hidden}, rng, k);
  p.b_g = ad::Tensor::zeros({hidden});
}

}  // namespace

std::string variant_name(const ModelConfig& cfg) {
  if (cfg.use_spatial && cfg.use_temporal) return "full";
  if (cfg.use_spatial) return "spatial";
  if (cfg.use_temporal) return "temporal";
  return "vanilla";
}

void apply_variant(ModelConfig& cfg, const std::string& name) {
  if (name == "full") {
    cfg.use_spatial = true;
    cfg.use_temporal = true;
  } else if (name == "spatial") {
    cfg.use_spatial = true;
    cfg.use_temporal = false;
  } else if (name == "temporal") {
    cfg.use_spatial = false;
    cfg.use_temporal = true;
  } else if (name == "vanilla") {
    cfg.use_spatial = false;
    cfg.use_temporal = false;
  } else {
    throw VariantError("unknown variant: " + name);
  }
}

std::vector<std::string> variant_names() { return {"vanilla", "temporal", "spatial", "full"}; }

ModelParams ModelParams::init(const ModelConfig& cfg, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0));
  ModelParams p;
  p.cfg = cfg;
  init_lstm(p.enc, cfg.hidden, cfg.input, rng);
  init_lstm(p.dec, cfg.hidden, cfg.input, rng);
  p.domain_table = ad::Tensor::full({cfg.bins.n_bearing, cfg.bins.n_heading}, cfg.domain_init_nmi);
  const double k = 1.0 / std::sqrt(static_cast<double>(cfg.hidden));
  init_matrix(p.w_att, {cfg.hidden, 2 * cfg.hidden}, rng, k);
  p.b_att = ad::Tensor::zeros({cfg.hidden});
  init_matrix(p.w_out, {cfg.input, cfg.hidden}, rng, k);
  p.b_out = ad::Tensor::zeros({cfg.input});
  return p;
}

std::vector<ad::NamedParam> ModelParams::named_params() {
  std::vector<ad::NamedParam> out;
  auto push_lstm = [&](const std::string& prefix, LstmParams& p) {
    out.push_back({prefix + ".wx_i", &p.wx_i});
    out.push_back({prefix + ".wh_i", &p.wh_i});
    out.push_back({prefix + ".b_i", &p.b_i});
    out.push_back({prefix + ".wx_f", &p.wx_f});
    out.push_back({prefix + ".wh_f", &p.wh_f});
    out.push_back({prefix + ".b_f", &p.b_f});
    out.push_back({prefix + ".wx_o", &p.wx_o});
    out.push_back({prefix + ".wh_o", &p.wh_o});
    out.push_back({prefix + ".b_o", &p.b_o});
    out.push_back({prefix + ".wx_g", &p.wx_g});
    out.push_back({prefix + ".wh_g", &p.wh_g});
    out.push_back({prefix + ".b_g", &p.b_g});
  };
  push_lstm("enc", enc);
  push_lstm("dec", dec);
  out.push_back({"domain_table", &domain_table});
  out.push_back({"att.w", &w_att});
  out.push_back({"att.b", &b_att});
  out.push_back({"out.w", &w_out});
  out.push_back({"out.b", &b_out});
  return out;
}

void ModelParams::zero_grad() {
  for (auto& p : named_params()) p.tensor->zero_grad();
}

bool ModelParams::finite() const {
  for (auto& p : const_cast<ModelParams*>(this)->named_params()) {
    if (!p.tensor->finite()) return false;
  }
  return true;
}

ParamRefs lease(ad::Tape& tape, ModelParams& params) {
  auto lease_lstm = [&](LstmParams& p) {
    LstmRefs r;
    r.wx_i = tape.param(p.wx_i);
    r.wh_i = tape.param(p.wh_i);
    r.b_i = tape.param(p.b_i);
    r.wx_f = tape.param(p.wx_f);
    r.wh_f = tape.param(p.wh_f);
    r.b_f = tape.param(p.b_f);
    r.wx_o = tape.param(p.wx_o);
    r.wh_o = tape.param(p.wh_o);
    r.b_o = tape.param(p.b_o);
    r.wx_g = tape.param(p.wx_g);
    r.wh_g = tape.param(p.wh_g);
    r.b_g = tape.param(p.b_g);
    return r;
  };
  ParamRefs refs;
  refs.enc = lease_lstm(params.enc);
  refs.dec = lease_lstm(params.dec);
  refs.domain_table = tape.param(params.domain_table);
  refs.w_att = tape.param(params.w_att);
  refs.b_att = tape.param(params.b_att);
  refs.w_out = tape.param(params.w_out);
  refs.b_out = tape.param(params.b_out);
  return refs;
}

std::pair<ad::Ref, ad::Ref> lstm_cell(ad::Tape& t, const LstmRefs& p, ad::Ref x, ad::Ref h_in,
                                      ad::Ref c_in) {
  auto gate = [&](ad::Ref wx, ad::Ref wh, ad::Ref b) {
    return t.add(t.add(t.matmul(wx, x), t.matmul(wh, h_in)), b);
  };
  const ad::Ref i = t.sigmoid(gate(p.wx_i, p.wh_i, p.b_i));
  const ad::Ref f = t.sigmoid(gate(p.wx_f, p.wh_f, p.b_f));
  const ad::Ref o = t.sigmoid(gate(p.wx_o, p.wh_o, p.b_o));
  const ad::Ref g = t.tanh(gate(p.wx_g, p.wh_g, p.b_g));
  const ad::Ref c_out = t.add(t.mul(f, c_in), t.mul(i, g));
  const ad::Ref h_out = t.mul(o, t.tanh(c_out));
  return {h_out, c_out};
}

std::vector<ad::Ref> spatial_weights(ad::Tape& tape, ad::Ref domain_table,
                                     const domain::BinSpec& bins, const FrameGeometry& geom) {
  const int n = geom.n();
  std::vector<ad::Ref> w(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) {
        w[static_cast<std::size_t>(j) * n + i] = tape.scalar(1.0);
        continue;
      }
      const double dx = geom.x[j] - geom.x[i];
      const double dy = geom.y[j] - geom.y[i];
      const double d = std::sqrt(dx * dx + dy * dy);
      // coincident vessels: bearing is degenerate, use dead ahead
      const double theta =
          d < geo::kStationaryNmi
              ? 0.0
              : geo::normalize_deg(compass_deg(dx, dy) - geom.heading_deg[i]);
      const double phi = geo::relative_heading_deg(geo::AngleDeg(geom.heading_deg[j]),
                                                   geo::AngleDeg(geom.heading_deg[i]));
      const int cell = bins.cell(theta, phi);
      w[static_cast<std::size_t>(j) * n + i] =
          tape.relu(tape.sub(tape.index(domain_table, cell), tape.scalar(d)));
    }
  }
  return w;
}

std::vector<ad::Ref> spatial_pool(ad::Tape& tape, std::span<const ad::Ref> weights,
                                  std::span<const ad::Ref> hidden, bool normalize) {
  const int n = static_cast<int>(hidden.size());
  std::vector<ad::Ref> pooled(hidden.size());
  for (int i = 0; i < n; ++i) {
    ad::Ref num = tape.scale(hidden[0], weights[static_cast<std::size_t>(0) * n + i]);
    ad::Ref den = weights[static_cast<std::size_t>(0) * n + i];
    for (int j = 1; j < n; ++j) {
      const ad::Ref wji = weights[static_cast<std::size_t>(j) * n + i];
      num = tape.add(num, tape.scale(hidden[j], wji));
      den = tape.add(den, wji);
    }
    pooled[static_cast<std::size_t>(i)] = normalize ? tape.scale(num, tape.recip(den)) : num;
  }
  return pooled;
}

ad::Ref temporal_attend(ad::Tape& tape, ad::Ref query, std::span<const ad::Ref> keys,
                        ad::Ref w_att, ad::Ref b_att, std::vector<double>* alpha_out) {
  if (keys.empty()) throw DimensionError("temporal_attend: no keys");

  ad::Ref scores = tape.dot(keys[0], query);
  for (std::size_t s = 1; s < keys.size(); ++s) {
    scores = tape.concat(scores, tape.dot(keys[s], query));
  }
  const ad::Ref alpha = tape.softmax(scores);

  const auto av = tape.values(alpha);
  double sum = 0.0;
  for (const double a : av) sum += a;
  if (std::abs(sum - 1.0) > 1e-12) {
    throw NumericalError("temporal_attend: alignment sum " + std::to_string(sum));
  }
  if (alpha_out) alpha_out->assign(av.begin(), av.end());

  ad::Ref context = tape.scale(keys[0], tape.index(alpha, 0));
  for (std::size_t s = 1; s < keys.size(); ++s) {
    context = tape.add(context, tape.scale(keys[s], tape.index(alpha, static_cast<int>(s))));
  }
  return tape.tanh(tape.add(tape.matmul(w_att, tape.concat(context, query)), b_att));
}

std::vector<double> derive_headings(const dataset::Sample& s) {
  const int n = s.n();
  const int t_total = s.t_total();
  std::vector<double> headings(static_cast<std::size_t>(t_total) * n, 0.0);
  for (int v = 0; v < n; ++v) {
    std::vector<std::optional<double>> raw(t_total);
    for (int t = 1; t < t_total; ++t) {
      const double dx = s.x(t, v) - s.x(t - 1, v);
      const double dy = s.y(t, v) - s.y(t - 1, v);
      if (std::sqrt(dx * dx + dy * dy) >= geo::kStationaryNmi) raw[t] = compass_deg(dx, dy);
    }
    if (t_total >= 2 && raw[1]) raw[0] = raw[1];
    std::optional<double> first;
    for (const auto& h : raw) {
      if (h) {
        first = h;
        break;
      }
    }
    std::optional<double> last = first;
    for (int t = 0; t < t_total; ++t) {
      if (raw[t]) last = raw[t];
      headings[static_cast<std::size_t>(t) * n + v] = last.value_or(0.0);
    }
  }
  return headings;
}

Prediction forward(ad::Tape& tape, ModelParams& params, const dataset::Sample& sample,
                   bool teacher_forcing, ForwardTrace* trace) {
  const ModelConfig& cfg = params.cfg;
  const int n = sample.n();
  const int hidden = cfg.hidden;
  if (sample.t_total() != cfg.t_obs + cfg.t_pred) {
    throw DimensionError("forward: sample has " + std::to_string(sample.t_total()) +
                         " frames, model expects " + std::to_string(cfg.t_obs + cfg.t_pred));
  }
  if (n < 1) throw DimensionError("forward: sample has no vessels");

  const ParamRefs refs = lease(tape, params);
  const std::vector<double> gt_heading =
      cfg.use_spatial ? derive_headings(sample) : std::vector<double>{};

  auto check_finite = [&](ad::Ref r, const char* stage, int step, int v) {
    for (const double x : tape.values(r)) {
      if (!std::isfinite(x)) {
        throw NumericalError(std::string("forward: non-finite value at ") + stage + " step " +
                             std::to_string(step) + " vessel " + std::to_string(v));
      }
    }
  };

  auto pool_step = [&](const std::vector<ad::Ref>& h, const FrameGeometry& geom) {
    const auto w = spatial_weights(tape, refs.domain_table, cfg.bins, geom);
    return spatial_pool(tape, w, h, cfg.normalize_pool);
  };

  const ad::Ref zero_state = tape.constant({hidden}, std::vector<double>(hidden, 0.0));
  std::vector<ad::Ref> carried(n, zero_state);  // pooled/attentional state fed to the cell
  std::vector<ad::Ref> cell(n, zero_state);
  std::vector<std::vector<ad::Ref>> memory(n);  // encoder pooled states per vessel

  // ----- encode -----
  for (int t = 0; t < cfg.t_obs; ++t) {
    std::vector<ad::Ref> h_raw(n);
    for (int v = 0; v < n; ++v) {
      const ad::Ref x = tape.constant({2}, {sample.x(t, v), sample.y(t, v)});
      auto [h, c] = lstm_cell(tape, refs.enc, x, carried[v], cell[v]);
      h_raw[v] = h;
      cell[v] = c;
      check_finite(h, "encode", t, v);
    }
    std::vector<ad::Ref> pooled;
    if (cfg.use_spatial) {
      FrameGeometry geom;
      geom.x.resize(n);
      geom.y.resize(n);
      geom.heading_deg.resize(n);
      for (int v = 0; v < n; ++v) {
        geom.x[v] = sample.x(t, v);
        geom.y[v] = sample.y(t, v);
        geom.heading_deg[v] = gt_heading[static_cast<std::size_t>(t) * n + v];
      }
      pooled = pool_step(h_raw, geom);
    } else {
      pooled = h_raw;
    }
    for (int v = 0; v < n; ++v) {
      carried[v] = pooled[v];
      memory[v].push_back(pooled[v]);
    }
  }

  // ----- decode -----
  Prediction pred;
  pred.n = n;
  pred.t_pred = cfg.t_pred;
  pred.refs.resize(static_cast<std::size_t>(cfg.t_pred) * n);
  pred.xy.resize(static_cast<std::size_t>(cfg.t_pred) * n * 2);

  // the latest known positions drive the decode-time geometry; tracked as
  // plain values (the bin lookup is non-differentiable)
  std::vector<double> cur_x(n), cur_y(n), cur_heading(n, 0.0);
  std::vector<ad::Ref> input_ref(n);
  for (int v = 0; v < n; ++v) {
    cur_x[v] = sample.x(cfg.t_obs - 1, v);
    cur_y[v] = sample.y(cfg.t_obs - 1, v);
    if (cfg.use_spatial) {
      cur_heading[v] = gt_heading[static_cast<std::size_t>(cfg.t_obs - 1) * n + v];
    }
    input_ref[v] = tape.constant({2}, {cur_x[v], cur_y[v]});
  }

  for (int k = 1; k <= cfg.t_pred; ++k) {
    if (k > 1) {
      // advance the decoder inputs to the previous step's position
      for (int v = 0; v < n; ++v) {
        double nx, ny;
        if (teacher_forcing) {
          nx = sample.x(cfg.t_obs + k - 2, v);
          ny = sample.y(cfg.t_obs + k - 2, v);
          input_ref[v] = tape.constant({2}, {nx, ny});
        } else {
          nx = pred.x(k - 2, v);
          ny = pred.y(k - 2, v);
          input_ref[v] = pred.ref(k - 2, v);
        }
        if (cfg.use_spatial) {
          const double dx = nx - cur_x[v];
          const double dy = ny - cur_y[v];
          if (std::sqrt(dx * dx + dy * dy) >= geo::kStationaryNmi) {
            cur_heading[v] = compass_deg(dx, dy);
          }
        }
        cur_x[v] = nx;
        cur_y[v] = ny;
      }
    }

    std::vector<ad::Ref> h_raw(n);
    for (int v = 0; v < n; ++v) {
      auto [h, c] = lstm_cell(tape, refs.dec, input_ref[v], carried[v], cell[v]);
      h_raw[v] = h;
      cell[v] = c;
      check_finite(h, "decode", k, v);

      // position delta head on the raw hidden state
      const ad::Ref delta = tape.add(tape.matmul(refs.w_out, h), refs.b_out);
      const ad::Ref p = tape.add(input_ref[v], delta);
      check_finite(p, "decode", k, v);
      pred.refs[static_cast<std::size_t>(k - 1) * n + v] = p;
      const auto pv = tape.values(p);
      pred.xy[((k - 1) * n + v) * 2 + 0] = pv[0];
      pred.xy[((k - 1) * n + v) * 2 + 1] = pv[1];
    }

    std::vector<ad::Ref> pooled;
    if (cfg.use_spatial) {
      FrameGeometry geom;
      geom.x.assign(cur_x.begin(), cur_x.end());
      geom.y.assign(cur_y.begin(), cur_y.end());
      geom.heading_deg.assign(cur_heading.begin(), cur_heading.end());
      pooled = pool_step(h_raw, geom);
    } else {
      pooled = h_raw;
    }

    for (int v = 0; v < n; ++v) {
      if (cfg.use_temporal) {
        std::vector<double> alpha;
        carried[v] = temporal_attend(tape, pooled[v], memory[v], refs.w_att, refs.b_att,
                                     trace ? &alpha : nullptr);
        if (trace) trace->alignments.push_back(std::move(alpha));
      } else {
        carried[v] = pooled[v];
      }
    }
  }
  return pred;
}

std::vector<std::int64_t> bin_exposure(const std::vector<dataset::Sample>& samples,
                                       const ModelConfig& cfg) {
  std::vector<std::int64_t> counts(cfg.bins.cells(), 0);
  for (const dataset::Sample& s : samples) {
    const int n = s.n();
    const auto headings = derive_headings(s);
    // pooling happens at encode steps 0..t_obs-1 and at the decoder input
    // positions t_obs-1..t_obs+t_pred-2
    std::vector<int> steps;
    for (int t = 0; t < cfg.t_obs; ++t) steps.push_back(t);
    for (int k = 1; k <= cfg.t_pred; ++k) steps.push_back(cfg.t_obs + k - 2);
    for (const int t : steps) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          const double dx = s.x(t, j) - s.x(t, i);
          const double dy = s.y(t, j) - s.y(t, i);
          const double d = std::sqrt(dx * dx + dy * dy);
          const double theta =
              d < geo::kStationaryNmi
                  ? 0.0
                  : geo::normalize_deg(compass_deg(dx, dy) -
                                       headings[static_cast<std::size_t>(t) * n + i]);
          const double phi = geo::relative_heading_deg(
              geo::AngleDeg(headings[static_cast<std::size_t>(t) * n + j]),
              geo::AngleDeg(headings[static_cast<std::size_t>(t) * n + i]));
          ++counts[static_cast<std::size_t>(cfg.bins.cell(theta, phi))];
        }
      }
    }
  }
  return counts;
}

}  // namespace vtp::model
