#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finsent/date.hpp"
#include "finsent/features.hpp"

namespace finsent::lstm {

enum class DenseActivation : std::uint8_t { Identity = 0, Relu = 1 };

/// Two stacked LSTM layers (the first returns its full sequence, the second
/// only its last step), a hidden dense layer and a scalar linear head.
struct LstmArchitecture {
  std::size_t input_dim = 2;
  std::size_t layer1_units = 100;
  std::size_t layer2_units = 100;
  std::size_t dense_units = 25;
  DenseActivation dense_activation = DenseActivation::Identity;
  static constexpr std::size_t output_dim = 1;

  void validate() const;
  bool operator==(const LstmArchitecture&) const = default;
};

/// Location of one parameter tensor inside the flat parameter vector.
struct Block {
  std::string name;
  std::size_t offset;
  std::size_t rows;
  std::size_t cols;
  std::size_t size() const noexcept { return rows * cols; }
};

/// Flat layout, in checkpoint order:
///   layer1.W (4*H1 x F), layer1.U (4*H1 x H1), layer1.b (4*H1),
///   layer2.W (4*H2 x H1), layer2.U (4*H2 x H2), layer2.b (4*H2),
///   dense1.W (D x H2), dense1.b (D), dense2.W (1 x D), dense2.b (1).
/// Gate rows inside every LSTM block are ordered input, forget, cell, output.
struct ParameterLayout {
  explicit ParameterLayout(const LstmArchitecture& arch);

  enum Index { L1W, L1U, L1B, L2W, L2U, L2B, D1W, D1B, D2W, D2B, kBlockCount };
  std::vector<Block> blocks;
  std::size_t total = 0;

  const Block& operator[](Index i) const noexcept { return blocks[i]; }
};

/// Read-only view of one LSTM layer's weights.
struct CellWeights {
  const double* w;  // 4H x input_dim
  const double* u;  // 4H x H
  const double* b;  // 4H
  std::size_t input_dim;
  std::size_t units;
};

/// Everything one timestep needs for its backward pass.
struct CellStep {
  std::vector<double> x;
  std::vector<double> h_prev;
  std::vector<double> c_prev;
  std::vector<double> gates;  // activated i, f, g, o (4H)
  std::vector<double> c;
  std::vector<double> tanh_c;
  std::vector<double> h;
};

/// i, f, o = sigmoid, g = tanh, c' = f*c + i*g, h' = o*tanh(c').
CellStep cell_forward(const CellWeights& p, std::span<const double> x, std::span<const double> h,
                      std::span<const double> c);

class LstmModel {
 public:
  explicit LstmModel(const LstmArchitecture& arch);

  const LstmArchitecture& arch() const noexcept { return arch_; }
  const ParameterLayout& layout() const noexcept { return layout_; }

  std::span<const double> params() const noexcept { return params_; }
  /// Any write access invalidates outstanding forward caches.
  std::span<double> mutable_params() noexcept {
    ++revision_;
    return params_;
  }
  std::span<const double> block(ParameterLayout::Index i) const noexcept;
  std::span<double> mutable_block(ParameterLayout::Index i) noexcept;

  std::uint64_t revision() const noexcept { return revision_; }
  CellWeights cell(std::size_t layer) const noexcept;
  bool all_finite() const noexcept;

 private:
  LstmArchitecture arch_;
  ParameterLayout layout_;
  std::vector<double> params_;
  std::uint64_t revision_ = 0;
};

/// Same flat layout as the model's parameters.
struct Gradients {
  explicit Gradients(const LstmModel& model) : values(model.layout().total, 0.0) {}
  std::vector<double> values;

  void zero() noexcept;
};

struct ForwardCache {
  const double* params = nullptr;
  std::uint64_t revision = 0;
  std::vector<CellStep> layer1;
  std::vector<CellStep> layer2;
  std::vector<double> dense_pre;
  std::vector<double> dense_out;
  double prediction = 0.0;
};

LstmModel init_model(const LstmArchitecture& arch, std::uint64_t seed);

/// `window` holds lookback x input_dim values, timestep-major.
double forward(const LstmModel& model, std::span<const double> window, ForwardCache& cache);
double forward(const LstmModel& model, std::span<const double> window);
double forward(const LstmModel& model, const features::Window& window);

/// Adds d_loss * d(prediction)/d(params) into `grads`.
void backward(const LstmModel& model, const ForwardCache& cache, double d_loss, Gradients& grads);
Gradients backward(const LstmModel& model, const ForwardCache& cache, double d_loss);

struct MseResult {
  double loss;
  std::vector<double> d_pred;
};

MseResult mse_loss(std::span<const double> pred, std::span<const double> target);

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 42;
  /// Epochs without a validation improvement before stopping; 0 disables.
  std::size_t patience = 10;
  bool shuffle = true;

  void validate() const;
};

struct AdamState {
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
};

void adam_step(LstmModel& model, const Gradients& grads, AdamState& state, const TrainConfig& cfg);

struct EpochStats {
  std::size_t epoch;
  /// Mean squared error of the epoch's mini-batches, in update order.
  double train_mse;
  std::optional<double> val_mse;
};

struct TrainResult {
  LstmModel model;
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;
  bool early_stopped = false;
};

/// Seeded mini-batch Adam on the train split; keeps the parameters of the
/// epoch with the lowest validation MSE when a validation split exists.
TrainResult train(LstmModel model, const features::WindowSet& windows, const TrainConfig& cfg);

double evaluate_mse(const LstmModel& model, std::span<const features::Window* const> windows);

struct Prediction {
  Date date;
  double scaled;
  double price;
};

/// Forward each window, then map the output back to price units through the
/// target channel of `scaler`.
std::vector<Prediction> predict_series(const LstmModel& model,
                                       std::span<const features::Window* const> windows,
                                       const features::ScalerParams& scaler, const std::string& target);

// Checkpoint: see docs/formats.md.
std::string serialize(const LstmModel& model);
LstmModel deserialize_model(std::string data);
void save_checkpoint(const LstmModel& model, const std::filesystem::path& path);
LstmModel load_checkpoint(const std::filesystem::path& path);

std::string history_csv(const std::vector<EpochStats>& history);

}  // namespace finsent::lstm
