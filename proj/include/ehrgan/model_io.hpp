#pragma once

// Versioned text format for trained networks.
//
//   EHRGANMODEL 1
//   kind <autoencoder|generator|discriminator>
//   noise_dim <n>
//   layers <count>
//   layer <fan_out> <fan_in> <activation>
//   <fan_out lines of fan_in weights, row-major>
//   <one line of fan_out biases>
//   ...
//   best_epoch <e>
//   training_log <rows>
//   <train_loss> <validation_loss>
//   ...
//   end
//
// Numbers are written in shortest round-trip form, so a reload is bit-exact.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ehrgan/acgan.hpp"
#include "ehrgan/impute.hpp"

namespace ehrgan {

enum class ModelKind { autoencoder, generator, discriminator };

std::string to_string(ModelKind kind);

struct StoredModel {
  ModelKind kind = ModelKind::autoencoder;
  NetParams net;
  int noise_dim = 0;
  int best_epoch = -1;
  std::vector<EpochLoss> training_log;
};

void write_model(std::ostream& out, const StoredModel& model);
StoredModel read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const StoredModel& model);
StoredModel load_model(const std::filesystem::path& path);

// Typed wrappers: the load side rejects a file of the wrong kind with SchemaError.
void save_autoencoder(const std::filesystem::path& path, const AutoencoderModel& model);
AutoencoderModel load_autoencoder(const std::filesystem::path& path);
void save_generator(const std::filesystem::path& path, const GeneratorModel& model);
GeneratorModel load_generator(const std::filesystem::path& path);
void save_discriminator(const std::filesystem::path& path, const DiscriminatorModel& model);
DiscriminatorModel load_discriminator(const std::filesystem::path& path);

}  // namespace ehrgan
