#include "isaccoop/frame_io.hpp"

#include <fstream>
#include <vector>

#include "json.hpp"

namespace isaccoop {

void dump_frame(const EchoFrame& frame, const std::string& path) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw IoError("cannot open '" + path + "' for writing");

  // Row-major: subcarrier index varies slowest.
  std::vector<float> buf;
  buf.reserve(static_cast<size_t>(frame.y.size()) * 2);
  for (int n = 0; n < frame.y.rows(); ++n) {
    for (int m = 0; m < frame.y.cols(); ++m) {
      buf.push_back(static_cast<float>(frame.y(n, m).real()));
      buf.push_back(static_cast<float>(frame.y(n, m).imag()));
    }
  }
  bin.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!bin) throw IoError("short write to '" + path + "'");

  nlohmann::json header = {
      {"version", 1},
      {"n_subcarriers", frame.config.n_subcarriers},
      {"n_symbols", frame.config.n_symbols},
      {"subcarrier_spacing_hz", frame.config.subcarrier_spacing},
      {"symbol_duration_s", frame.config.symbol_time()},
      {"carrier_frequency_hz", frame.config.carrier_frequency},
      {"rx_station", frame.rx_station},
      {"noise_variance", frame.noise_variance},
  };
  std::ofstream side(path + ".json");
  if (!side) throw IoError("cannot open '" + path + ".json' for writing");
  side << header.dump(2) << "\n";
}

EchoFrame load_frame(const std::string& path) {
  std::ifstream side(path + ".json");
  if (!side) throw IoError("cannot open '" + path + ".json'");
  nlohmann::json header;
  side >> header;

  EchoFrame frame;
  frame.config.n_subcarriers = header.at("n_subcarriers").get<int>();
  frame.config.n_symbols = header.at("n_symbols").get<int>();
  frame.config.subcarrier_spacing = header.at("subcarrier_spacing_hz").get<double>();
  frame.config.symbol_duration = header.at("symbol_duration_s").get<double>();
  frame.config.carrier_frequency = header.at("carrier_frequency_hz").get<double>();
  frame.rx_station = header.at("rx_station").get<std::string>();
  frame.noise_variance = header.at("noise_variance").get<double>();

  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw IoError("cannot open '" + path + "'");
  const size_t count = static_cast<size_t>(frame.config.n_subcarriers) *
                       static_cast<size_t>(frame.config.n_symbols) * 2;
  std::vector<float> buf(count);
  bin.read(reinterpret_cast<char*>(buf.data()),
           static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<size_t>(bin.gcount()) != count * sizeof(float)) {
    throw IoError("truncated frame dump '" + path + "'");
  }

  frame.y.resize(frame.config.n_subcarriers, frame.config.n_symbols);
  frame.x_ref = Eigen::MatrixXcd::Zero(frame.config.n_subcarriers, frame.config.n_symbols);
  size_t i = 0;
  for (int n = 0; n < frame.y.rows(); ++n) {
    for (int m = 0; m < frame.y.cols(); ++m) {
      frame.y(n, m) = cdouble(buf[i], buf[i + 1]);
      i += 2;
    }
  }
  return frame;
}

}  // namespace isaccoop
