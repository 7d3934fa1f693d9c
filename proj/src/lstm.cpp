#include "finsent/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "finsent/error.hpp"
#include "finsent/kernels.hpp"

namespace finsent::lstm {

namespace {

inline double sigmoid(double z) noexcept { return 1.0 / (1.0 + std::exp(-z)); }

void require(bool ok, ErrorCode code, const char* what) {
  if (!ok) throw Error(code, what);
}

// Modified Gram-Schmidt on the rows of an n x n block.
void orthogonalize_rows(double* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double* ri = a + i * n;
    for (std::size_t j = 0; j < i; ++j) {
      const double* rj = a + j * n;
      double proj = 0.0;
      for (std::size_t k = 0; k < n; ++k) proj += ri[k] * rj[k];
      for (std::size_t k = 0; k < n; ++k) ri[k] -= proj * rj[k];
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) norm += ri[k] * ri[k];
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      // Degenerate draw (only possible for n = 1 with a zero sample).
      std::fill(ri, ri + n, 0.0);
      ri[i] = 1.0;
      continue;
    }
    for (std::size_t k = 0; k < n; ++k) ri[k] /= norm;
  }
}

// Backward through one timestep. dh is the total gradient reaching h'; dc
// carries the cell-state gradient in and out. dx (optional) is accumulated,
// dh_prev is overwritten.
void cell_backward(const CellWeights& p, const CellStep& s, std::span<const double> dh,
                   std::span<double> dc, double* gw, double* gu, double* gb, double* dx,
                   std::span<double> dh_prev, std::vector<double>& dz) {
  const auto& k = kernels::active();
  const std::size_t H = p.units;
  dz.resize(4 * H);
  const double* gi = s.gates.data();
  const double* gf = gi + H;
  const double* gg = gf + H;
  const double* go = gg + H;
  for (std::size_t j = 0; j < H; ++j) {
    const double tc = s.tanh_c[j];
    const double dcj = dc[j] + dh[j] * go[j] * (1.0 - tc * tc);
    const double d_o = dh[j] * tc;
    dz[j] = dcj * gg[j] * gi[j] * (1.0 - gi[j]);
    dz[H + j] = dcj * s.c_prev[j] * gf[j] * (1.0 - gf[j]);
    dz[2 * H + j] = dcj * gi[j] * (1.0 - gg[j] * gg[j]);
    dz[3 * H + j] = d_o * go[j] * (1.0 - go[j]);
    dc[j] = dcj * gf[j];
  }
  k.ger(gw, 4 * H, p.input_dim, dz.data(), s.x.data());
  k.ger(gu, 4 * H, H, dz.data(), s.h_prev.data());
  k.axpy(1.0, dz.data(), gb, 4 * H);
  if (dx) k.gemv_t(p.w, 4 * H, p.input_dim, dz.data(), dx);
  std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
  k.gemv_t(p.u, 4 * H, H, dz.data(), dh_prev.data());
}

}  // namespace

void LstmArchitecture::validate() const {
  require(input_dim >= 1 && layer1_units >= 1 && layer2_units >= 1 && dense_units >= 1,
          ErrorCode::InvalidArgument, "all layer sizes must be >= 1");
}

ParameterLayout::ParameterLayout(const LstmArchitecture& a) {
  a.validate();
  auto add = [&](const char* name, std::size_t rows, std::size_t cols) {
    blocks.push_back({name, total, rows, cols});
    total += rows * cols;
  };
  add("layer1.W", 4 * a.layer1_units, a.input_dim);
  add("layer1.U", 4 * a.layer1_units, a.layer1_units);
  add("layer1.b", 4 * a.layer1_units, 1);
  add("layer2.W", 4 * a.layer2_units, a.layer1_units);
  add("layer2.U", 4 * a.layer2_units, a.layer2_units);
  add("layer2.b", 4 * a.layer2_units, 1);
  add("dense1.W", a.dense_units, a.layer2_units);
  add("dense1.b", a.dense_units, 1);
  add("dense2.W", LstmArchitecture::output_dim, a.dense_units);
  add("dense2.b", LstmArchitecture::output_dim, 1);
}

LstmModel::LstmModel(const LstmArchitecture& arch)
    : arch_(arch), layout_(arch), params_(layout_.total, 0.0) {}

std::span<const double> LstmModel::block(ParameterLayout::Index i) const noexcept {
  const Block& b = layout_[i];
  return std::span<const double>(params_).subspan(b.offset, b.size());
}

std::span<double> LstmModel::mutable_block(ParameterLayout::Index i) noexcept {
  ++revision_;
  const Block& b = layout_[i];
  return std::span<double>(params_).subspan(b.offset, b.size());
}

CellWeights LstmModel::cell(std::size_t layer) const noexcept {
  using L = ParameterLayout;
  const double* base = params_.data();
  if (layer == 0) {
    return {base + layout_[L::L1W].offset, base + layout_[L::L1U].offset, base + layout_[L::L1B].offset,
            arch_.input_dim, arch_.layer1_units};
  }
  return {base + layout_[L::L2W].offset, base + layout_[L::L2U].offset, base + layout_[L::L2B].offset,
          arch_.layer1_units, arch_.layer2_units};
}

bool LstmModel::all_finite() const noexcept {
  return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

void Gradients::zero() noexcept { std::fill(values.begin(), values.end(), 0.0); }

CellStep cell_forward(const CellWeights& p, std::span<const double> x, std::span<const double> h,
                      std::span<const double> c) {
  const std::size_t H = p.units;
  if (x.size() != p.input_dim || h.size() != H || c.size() != H) {
    throw Error(ErrorCode::DimensionMismatch, "cell_forward input sizes");
  }
  const auto& k = kernels::active();
  CellStep s;
  s.x.assign(x.begin(), x.end());
  s.h_prev.assign(h.begin(), h.end());
  s.c_prev.assign(c.begin(), c.end());
  s.gates.assign(p.b, p.b + 4 * H);
  k.gemv(p.w, 4 * H, p.input_dim, x.data(), s.gates.data());
  k.gemv(p.u, 4 * H, H, h.data(), s.gates.data());
  for (std::size_t j = 0; j < H; ++j) {
    s.gates[j] = sigmoid(s.gates[j]);
    s.gates[H + j] = sigmoid(s.gates[H + j]);
    s.gates[2 * H + j] = std::tanh(s.gates[2 * H + j]);
    s.gates[3 * H + j] = sigmoid(s.gates[3 * H + j]);
  }
  s.c.resize(H);
  s.tanh_c.resize(H);
  s.h.resize(H);
  for (std::size_t j = 0; j < H; ++j) {
    s.c[j] = s.gates[H + j] * c[j] + s.gates[j] * s.gates[2 * H + j];
    s.tanh_c[j] = std::tanh(s.c[j]);
    s.h[j] = s.gates[3 * H + j] * s.tanh_c[j];
  }
  return s;
}

LstmModel init_model(const LstmArchitecture& arch, std::uint64_t seed) {
  using L = ParameterLayout;
  LstmModel model(arch);
  std::mt19937_64 rng(seed);
  auto glorot = [&](L::Index idx, std::size_t fan_in, std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& v : model.mutable_block(idx)) v = dist(rng);
  };
  auto orthogonal = [&](L::Index idx, std::size_t units) {
    std::normal_distribution<double> dist(0.0, 1.0);
    auto blk = model.mutable_block(idx);
    for (double& v : blk) v = dist(rng);
    for (std::size_t gate = 0; gate < 4; ++gate) orthogonalize_rows(blk.data() + gate * units * units, units);
  };
  auto lstm_bias = [&](L::Index idx, std::size_t units) {
    auto blk = model.mutable_block(idx);
    std::fill(blk.begin(), blk.end(), 0.0);
    std::fill(blk.begin() + static_cast<std::ptrdiff_t>(units),
              blk.begin() + static_cast<std::ptrdiff_t>(2 * units), 1.0);
  };

  glorot(L::L1W, arch.input_dim, 4 * arch.layer1_units);
  orthogonal(L::L1U, arch.layer1_units);
  lstm_bias(L::L1B, arch.layer1_units);
  glorot(L::L2W, arch.layer1_units, 4 * arch.layer2_units);
  orthogonal(L::L2U, arch.layer2_units);
  lstm_bias(L::L2B, arch.layer2_units);
  glorot(L::D1W, arch.layer2_units, arch.dense_units);
  glorot(L::D2W, arch.dense_units, LstmArchitecture::output_dim);
  return model;
}

double forward(const LstmModel& model, std::span<const double> window, ForwardCache& cache) {
  using L = ParameterLayout;
  const auto& a = model.arch();
  if (window.empty() || window.size() % a.input_dim != 0) {
    throw Error(ErrorCode::DimensionMismatch, "window size " + std::to_string(window.size()) +
                                                  " is not a multiple of input_dim " +
                                                  std::to_string(a.input_dim));
  }
  const std::size_t steps = window.size() / a.input_dim;
  const auto& k = kernels::active();

  cache.params = model.params().data();
  cache.revision = model.revision();
  cache.layer1.clear();
  cache.layer2.clear();
  cache.layer1.reserve(steps);
  cache.layer2.reserve(steps);

  const CellWeights c1 = model.cell(0);
  std::vector<double> h(a.layer1_units, 0.0), c(a.layer1_units, 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    cache.layer1.push_back(cell_forward(c1, window.subspan(t * a.input_dim, a.input_dim), h, c));
    h = cache.layer1.back().h;
    c = cache.layer1.back().c;
  }
  const CellWeights c2 = model.cell(1);
  h.assign(a.layer2_units, 0.0);
  c.assign(a.layer2_units, 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    cache.layer2.push_back(cell_forward(c2, cache.layer1[t].h, h, c));
    h = cache.layer2.back().h;
    c = cache.layer2.back().c;
  }

  auto d1b = model.block(L::D1B);
  cache.dense_pre.assign(d1b.begin(), d1b.end());
  k.gemv(model.block(L::D1W).data(), a.dense_units, a.layer2_units, h.data(), cache.dense_pre.data());
  cache.dense_out = cache.dense_pre;
  if (a.dense_activation == DenseActivation::Relu) {
    for (double& v : cache.dense_out) v = std::max(v, 0.0);
  }
  cache.prediction = model.block(L::D2B)[0] +
                     k.dot(model.block(L::D2W).data(), cache.dense_out.data(), a.dense_units);
  return cache.prediction;
}

double forward(const LstmModel& model, std::span<const double> window) {
  ForwardCache cache;
  return forward(model, window, cache);
}

double forward(const LstmModel& model, const features::Window& window) {
  return forward(model, std::span<const double>(window.inputs));
}

void backward(const LstmModel& model, const ForwardCache& cache, double d_loss, Gradients& grads) {
  using L = ParameterLayout;
  if (cache.params != model.params().data() || cache.revision != model.revision() ||
      cache.layer2.empty()) {
    throw Error(ErrorCode::StaleCache, "forward cache does not belong to the current parameters");
  }
  if (grads.values.size() != model.layout().total) {
    throw Error(ErrorCode::DimensionMismatch, "gradient buffer size");
  }
  if (d_loss == 0.0) return;

  const auto& a = model.arch();
  const auto& lay = model.layout();
  const auto& k = kernels::active();
  double* g = grads.values.data();
  const std::size_t steps = cache.layer2.size();

  // Linear head.
  k.axpy(d_loss, cache.dense_out.data(), g + lay[L::D2W].offset, a.dense_units);
  g[lay[L::D2B].offset] += d_loss;
  std::vector<double> dz1(a.dense_units);
  const double* w_head = model.block(L::D2W).data();
  for (std::size_t j = 0; j < a.dense_units; ++j) {
    double d = d_loss * w_head[j];
    if (a.dense_activation == DenseActivation::Relu && cache.dense_pre[j] <= 0.0) d = 0.0;
    dz1[j] = d;
  }
  const std::vector<double>& h2_last = cache.layer2.back().h;
  k.ger(g + lay[L::D1W].offset, a.dense_units, a.layer2_units, dz1.data(), h2_last.data());
  k.axpy(1.0, dz1.data(), g + lay[L::D1B].offset, a.dense_units);

  std::vector<double> dh(a.layer2_units, 0.0);
  k.gemv_t(model.block(L::D1W).data(), a.dense_units, a.layer2_units, dz1.data(), dh.data());

  std::vector<double> dz;
  // Layer 2: only its final hidden state leaves the layer.
  std::vector<double> dc(a.layer2_units, 0.0), dh_prev(a.layer2_units);
  std::vector<double> dh1_above(steps * a.layer1_units, 0.0);
  const CellWeights c2 = model.cell(1);
  for (std::size_t t = steps; t-- > 0;) {
    cell_backward(c2, cache.layer2[t], dh, dc, g + lay[L::L2W].offset, g + lay[L::L2U].offset,
                  g + lay[L::L2B].offset, dh1_above.data() + t * a.layer1_units, dh_prev, dz);
    dh.swap(dh_prev);
  }

  // Layer 1: every hidden state feeds layer 2 and the next timestep.
  const CellWeights c1 = model.cell(0);
  std::vector<double> dh1(a.layer1_units, 0.0), dc1(a.layer1_units, 0.0), dh1_prev(a.layer1_units);
  for (std::size_t t = steps; t-- > 0;) {
    k.axpy(1.0, dh1_above.data() + t * a.layer1_units, dh1.data(), a.layer1_units);
    cell_backward(c1, cache.layer1[t], dh1, dc1, g + lay[L::L1W].offset, g + lay[L::L1U].offset,
                  g + lay[L::L1B].offset, nullptr, dh1_prev, dz);
    dh1.swap(dh1_prev);
  }
}

Gradients backward(const LstmModel& model, const ForwardCache& cache, double d_loss) {
  Gradients g(model);
  backward(model, cache, d_loss, g);
  return g;
}

MseResult mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw Error(ErrorCode::LengthMismatch, "pred vs target length");
  if (pred.empty()) throw Error(ErrorCode::EmptyBatch, "mse_loss on empty batch");
  const double n = static_cast<double>(pred.size());
  MseResult r{0.0, std::vector<double>(pred.size())};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - target[i];
    r.loss += e * e;
    r.d_pred[i] = 2.0 * e / n;
  }
  r.loss /= n;
  return r;
}

void TrainConfig::validate() const {
  require(learning_rate > 0.0, ErrorCode::InvalidArgument, "learning_rate must be > 0");
  require(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0, ErrorCode::InvalidArgument,
          "Adam betas must lie in (0, 1)");
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be > 0");
  require(batch_size >= 1, ErrorCode::InvalidArgument, "batch_size must be >= 1");
}

void adam_step(LstmModel& model, const Gradients& grads, AdamState& state, const TrainConfig& cfg) {
  const std::size_t n = model.layout().total;
  if (grads.values.size() != n || state.m.size() != n || state.v.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "adam buffer sizes");
  }
  if (!std::all_of(grads.values.begin(), grads.values.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorCode::NonFiniteGradient, "gradient contains NaN or Inf");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const kernels::AdamCoefficients c{cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon,
                                    1.0 - std::pow(cfg.beta1, t), 1.0 - std::pow(cfg.beta2, t)};
  auto p = model.mutable_params();
  kernels::active().adam(p.data(), state.m.data(), state.v.data(), grads.values.data(), n, c);
}

double evaluate_mse(const LstmModel& model, std::span<const features::Window* const> windows) {
  if (windows.empty()) throw Error(ErrorCode::EmptyInput, "no windows to evaluate");
  ForwardCache cache;
  double sum = 0.0;
  for (const auto* w : windows) {
    const double e = forward(model, w->inputs, cache) - w->target;
    sum += e * e;
  }
  return sum / static_cast<double>(windows.size());
}

TrainResult train(LstmModel model, const features::WindowSet& windows, const TrainConfig& cfg) {
  cfg.validate();
  if (windows.feature_count() != model.arch().input_dim) {
    throw Error(ErrorCode::DimensionMismatch, "window feature count does not match input_dim");
  }
  const auto train_set = windows.select(features::Split::Train);
  const auto val_set = windows.select(features::Split::Val);
  if (train_set.empty()) throw Error(ErrorCode::EmptyTrainSplit, "no train windows");

  TrainResult result{model, {}, 0, false};
  if (cfg.epochs == 0) return result;

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  Gradients grads(model);
  AdamState adam(model.layout().total);
  std::vector<ForwardCache> caches(std::min(cfg.batch_size, train_set.size()));
  std::vector<double> preds, targets;
  double best_val = INFINITY;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double sq_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      preds.clear();
      targets.clear();
      for (std::size_t i = start; i < end; ++i) {
        const auto* w = train_set[order[i]];
        preds.push_back(forward(model, w->inputs, caches[i - start]));
        targets.push_back(w->target);
      }
      const MseResult loss = mse_loss(preds, targets);
      sq_sum += loss.loss * static_cast<double>(end - start);
      grads.zero();
      for (std::size_t i = start; i < end; ++i) {
        backward(model, caches[i - start], loss.d_pred[i - start], grads);
      }
      adam_step(model, grads, adam, cfg);
    }

    EpochStats stats{epoch, sq_sum / static_cast<double>(order.size()), std::nullopt};
    if (!val_set.empty()) stats.val_mse = evaluate_mse(model, val_set);
    result.history.push_back(stats);

    if (!stats.val_mse) {
      result.model = model;
      result.best_epoch = epoch;
      continue;
    }
    if (*stats.val_mse < best_val) {
      best_val = *stats.val_mse;
      result.model = model;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

std::vector<Prediction> predict_series(const LstmModel& model,
                                       std::span<const features::Window* const> windows,
                                       const features::ScalerParams& scaler, const std::string& target) {
  const bool scaled = features::is_scaled_feature(target);
  const std::size_t idx = scaled ? scaler.index_of(target) : 0;
  std::vector<Prediction> out;
  out.reserve(windows.size());
  ForwardCache cache;
  for (const auto* w : windows) {
    const double y = forward(model, w->inputs, cache);
    out.push_back({w->target_date, y, scaled ? scaler.unscale(idx, y) : y});
  }
  return out;
}

}  // namespace finsent::lstm
