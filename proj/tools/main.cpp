// texshuffle: standard vs patch-and-shuffle texture classification runs.
//
//   texshuffle compare --synthetic --epochs 5 --seed 7 --out runs/desk
//   texshuffle standard --data-dir data/ --labels-csv data/labels.csv --epochs 30
//   texshuffle synth --n-per-class 100 --image-size 64 --out data/synthetic
//
// Every flag can also be set through an environment variable named
// TEXSHUFFLE_<FLAG> (upper case, dashes as underscores), e.g. TEXSHUFFLE_EPOCHS=5.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "texshuffle/error.hpp"
#include "texshuffle/experiment.hpp"

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct Flags {
  std::string data_dir;
  std::string labels_csv;
  bool synthetic = false;
  int n_per_class = 100;
  int image_size = 64;

  int epochs = 30;
  double lr = 5e-5;
  double weight_decay = 1e-3;
  std::optional<int> patch_size;
  double split = 0.8;
  int batch_size = 32;
  std::uint64_t seed = 0;
  std::optional<int> input_size;
  bool static_expansion = false;
  bool no_augment = false;
  double max_rotation = 15.0;
  double zoom_min = 0.9;
  double zoom_max = 1.1;
  double illumination_min = 0.8;
  double illumination_max = 1.2;
  int expansion_factor = 16;
  double dropout = 0.5;
  std::string pretrained_weights;
  bool no_pretrained = false;
  bool save_model = false;
  std::string out = "runs";
  std::string manifest;
};

std::string env_name(const std::string& flag) {
  std::string name = "TEXSHUFFLE_";
  for (const char c : flag) name += c == '-' ? '_' : static_cast<char>(std::toupper(c));
  return name;
}

template <typename T>
CLI::Option* add(CLI::App& app, const std::string& flag, T& target, const std::string& help) {
  return app.add_option("--" + flag, target, help)->envname(env_name(flag));
}

void add_common_options(CLI::App& app, Flags& f) {
  add(app, "data-dir", f.data_dir, "Directory containing the texture window images");
  add(app, "labels-csv", f.labels_csv, "CSV with filename,label columns (default <data-dir>/labels.csv)");
  app.add_flag("--synthetic", f.synthetic, "Use the built-in synthetic texture dataset")
      ->envname(env_name("synthetic"));
  add(app, "n-per-class", f.n_per_class, "Synthetic samples per class")->check(CLI::PositiveNumber);
  add(app, "image-size", f.image_size, "Synthetic image side length")->check(CLI::Range(16, 4096));
  add(app, "seed", f.seed, "Base seed for split, model, augmentation and shuffling");
  add(app, "out", f.out, "Output directory");
  add(app, "manifest", f.manifest, "Re-run a manifest.json written by a previous run");
}

void add_training_options(CLI::App& app, Flags& f) {
  add(app, "epochs", f.epochs, "Number of epochs")->check(CLI::PositiveNumber);
  add(app, "lr", f.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  add(app, "weight-decay", f.weight_decay, "L2 weight decay (coupled)")->check(CLI::NonNegativeNumber);
  add(app, "patch-size", f.patch_size, "Patch side in pixels (default input size / 4)")
      ->check(CLI::PositiveNumber);
  add(app, "split", f.split, "Training fraction in (0, 1]")->check(CLI::Range(0.0, 1.0));
  add(app, "batch-size", f.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
  add(app, "input-size", f.input_size,
      "Backbone input side (default 224; synthetic data defaults to its image size)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--static-expansion", f.static_expansion,
               "Materialize the augmented dataset up front instead of augmenting on the fly")
      ->envname(env_name("static-expansion"));
  app.add_flag("--no-augment", f.no_augment, "Disable rotation/zoom/illumination augmentation")
      ->envname(env_name("no-augment"));
  add(app, "max-rotation", f.max_rotation, "Maximum rotation in degrees")->check(CLI::NonNegativeNumber);
  add(app, "zoom-min", f.zoom_min, "Lower zoom factor");
  add(app, "zoom-max", f.zoom_max, "Upper zoom factor");
  add(app, "illumination-min", f.illumination_min, "Lower brightness factor");
  add(app, "illumination-max", f.illumination_max, "Upper brightness factor");
  add(app, "expansion-factor", f.expansion_factor, "Static expansion factor")->check(CLI::PositiveNumber);
  add(app, "dropout", f.dropout, "Dropout before the linear head")->check(CLI::Range(0.0, 0.999999));
  add(app, "pretrained-weights", f.pretrained_weights,
      "ResNet-18 state dict exported by tools/export_resnet18_weights.py");
  app.add_flag("--no-pretrained", f.no_pretrained, "Train the backbone from random initialization")
      ->envname(env_name("no-pretrained"));
  app.add_flag("--save-model", f.save_model, "Write model checkpoints next to the reports")
      ->envname(env_name("save-model"));
}

texshuffle::ExperimentManifest to_manifest(const Flags& f, texshuffle::ExperimentMode mode) {
  texshuffle::ExperimentManifest m;
  m.mode = mode;
  m.out_dir = f.out;
  m.save_model = f.save_model;
  m.data.synthetic = f.synthetic;
  m.data.data_dir = f.data_dir;
  m.data.labels_csv = f.labels_csv;
  m.data.n_per_class = f.n_per_class;
  m.data.image_size = f.image_size;

  auto& t = m.train;
  t.epochs = f.epochs;
  t.learning_rate = f.lr;
  t.weight_decay = f.weight_decay;
  t.train_fraction = f.split;
  t.batch_size = f.batch_size;
  t.seed = f.seed;
  t.input_size = f.input_size.value_or(f.synthetic ? f.image_size : 224);
  t.patch_size = f.patch_size.value_or(std::max(1, t.input_size / 4));
  t.static_expansion = f.static_expansion;
  t.augment_enabled = !f.no_augment;
  t.augment.max_rotation_deg = f.max_rotation;
  t.augment.zoom_min = f.zoom_min;
  t.augment.zoom_max = f.zoom_max;
  t.augment.illumination_min = f.illumination_min;
  t.augment.illumination_max = f.illumination_max;
  t.augment.expansion_factor = f.expansion_factor;
  t.model.dropout_p = f.dropout;
  t.model.pretrained_weights = f.pretrained_weights;
  // Real data defaults to a pretrained backbone; synthetic data only when weights are given.
  t.model.pretrained =
      !f.no_pretrained && (!f.pretrained_weights.empty() || !f.synthetic);
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Standard vs patch-and-shuffle texture classification experiments"};
  app.require_subcommand(1);

  Flags flags;
  std::optional<texshuffle::ExperimentMode> mode;
  for (const auto candidate :
       {texshuffle::ExperimentMode::standard, texshuffle::ExperimentMode::patch_shuffle,
        texshuffle::ExperimentMode::compare, texshuffle::ExperimentMode::synth}) {
    const char* help = "";
    switch (candidate) {
      case texshuffle::ExperimentMode::standard: help = "Train the standard (control) pipeline"; break;
      case texshuffle::ExperimentMode::patch_shuffle: help = "Train the patch-and-shuffle pipeline"; break;
      case texshuffle::ExperimentMode::compare: help = "Train both pipelines on one split and compare"; break;
      case texshuffle::ExperimentMode::synth: help = "Write the synthetic dataset as images + labels.csv"; break;
    }
    CLI::App* sub = app.add_subcommand(texshuffle::mode_name(candidate), help);
    add_common_options(*sub, flags);
    if (candidate != texshuffle::ExperimentMode::synth) add_training_options(*sub, flags);
    sub->callback([&mode, candidate] { mode = candidate; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  texshuffle::ExperimentManifest manifest;
  try {
    if (!flags.manifest.empty()) {
      manifest = texshuffle::read_json(flags.manifest).get<texshuffle::ExperimentManifest>();
      manifest.out_dir = flags.out;
    } else {
      if (*mode == texshuffle::ExperimentMode::synth) flags.synthetic = true;
      if (!flags.synthetic && flags.data_dir.empty()) {
        std::cerr << "error: give --data-dir or --synthetic\n";
        return kExitUsage;
      }
      manifest = to_manifest(flags, *mode);
    }
    manifest.train.validate();
  } catch (const texshuffle::IngestionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    texshuffle::run_experiment(manifest, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
