#include <cstring>
#include <sstream>

#include "finsent/csv.hpp"
#include "finsent/error.hpp"
#include "finsent/io.hpp"
#include "finsent/lstm.hpp"

namespace finsent::lstm {

namespace {

constexpr char kMagic[4] = {'F', 'S', 'L', 'M'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

std::string serialize(const LstmModel& model) {
  const auto& a = model.arch();
  io::BinaryWriter w;
  w.bytes(std::string_view(kMagic, 4));
  w.u32(kVersion);
  w.u64(a.input_dim);
  w.u64(a.layer1_units);
  w.u64(a.layer2_units);
  w.u64(a.dense_units);
  w.u64(LstmArchitecture::output_dim);
  w.u8(static_cast<std::uint8_t>(a.dense_activation));
  for (const Block& b : model.layout().blocks) {
    w.u64(b.size());
    w.f64s(model.params().subspan(b.offset, b.size()));
  }
  return w.buffer();
}

LstmModel deserialize_model(std::string data) {
  io::BinaryReader r(std::move(data));
  if (r.bytes(4) != std::string_view(kMagic, 4)) throw Error(ErrorCode::BadFormat, "not a model checkpoint");
  if (auto v = r.u32(); v != kVersion) {
    throw Error(ErrorCode::BadFormat, "unsupported checkpoint version " + std::to_string(v));
  }
  LstmArchitecture a;
  a.input_dim = r.u64();
  a.layer1_units = r.u64();
  a.layer2_units = r.u64();
  a.dense_units = r.u64();
  if (r.u64() != LstmArchitecture::output_dim) throw Error(ErrorCode::BadFormat, "output_dim must be 1");
  const auto act = r.u8();
  if (act > 1) throw Error(ErrorCode::BadFormat, "unknown dense activation");
  a.dense_activation = static_cast<DenseActivation>(act);

  LstmModel model(a);
  auto params = model.mutable_params();
  for (const Block& b : model.layout().blocks) {
    if (r.u64() != b.size()) throw Error(ErrorCode::BadFormat, "block " + b.name + " has wrong size");
    r.f64s(params.subspan(b.offset, b.size()));
  }
  if (!r.at_end()) throw Error(ErrorCode::BadFormat, "trailing bytes in checkpoint");
  if (!model.all_finite()) throw Error(ErrorCode::BadFormat, "checkpoint holds non-finite parameters");
  return model;
}

void save_checkpoint(const LstmModel& model, const std::filesystem::path& path) {
  io::write_file_atomic(path, serialize(model));
}

LstmModel load_checkpoint(const std::filesystem::path& path) { return deserialize_model(io::read_file(path)); }

std::string history_csv(const std::vector<EpochStats>& history) {
  std::ostringstream out;
  out << "epoch,train_mse,val_mse\n";
  for (const auto& e : history) {
    out << e.epoch << ',' << csv::format_double(e.train_mse) << ','
        << (e.val_mse ? csv::format_double(*e.val_mse) : std::string()) << '\n';
  }
  return out.str();
}

}  // namespace finsent::lstm
