#include <sstream>

#include "hints/deeponet.hpp"
#include "hints/error.hpp"
#include "hints/io.hpp"

namespace hints::deeponet {

namespace {

std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(static_cast<std::size_t>(std::stoull(item)));
    } catch (const std::exception&) {
      fail(ErrorCode::CorruptChecksum, "bad integer list in model metadata: " + text);
    }
  }
  return out;
}

}  // namespace

void save_model(const DeepOnetModel& model, const std::filesystem::path& path) {
  io::write_file(path, io::encode_container(kModelMagic, kModelVersion, model.metadata(), model.parameters()));
}

DeepOnetModel load_model(const std::filesystem::path& path) {
  const auto c = io::decode_container(io::read_file(path), kModelMagic, kModelVersion);
  const auto md = io::parse_metadata(c.metadata);
  Architecture arch;
  if (io::metadata_value(md, "architecture") == "conv") {
    arch.conv_channels = parse_list(io::metadata_value(md, "conv_channels"));
    const auto sides = parse_list(io::metadata_value(md, "conv_sides"));
    require(!sides.empty(), ErrorCode::CorruptChecksum, "model metadata lacks convolution sides");
    arch.image_side = sides.front();
  }
  arch.branch_widths = parse_list(io::metadata_value(md, "branch_widths"));
  arch.trunk_widths = parse_list(io::metadata_value(md, "trunk_widths"));
  DeepOnetModel model(arch, Grid::parse(io::metadata_value(md, "grid")), parse_mask(io::metadata_value(md, "mask")),
                      io::parse_double(io::metadata_value(md, "alpha")),
                      io::parse_double(io::metadata_value(md, "loss_eps")), 0);
  require(c.values.size() == model.parameter_count(), ErrorCode::CorruptChecksum,
          "parameter count does not match the declared architecture");
  require(model.metadata() == c.metadata, ErrorCode::FormatVersionMismatch,
          "model metadata does not match this build's layout");
  std::copy(c.values.begin(), c.values.end(), model.parameters().begin());
  return model;
}

}  // namespace hints::deeponet
