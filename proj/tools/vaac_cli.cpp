// Command line front end: train, evaluate, or cross-check a model described
// by an experiment config. Paths inside the config resolve relative to the
// config file so invocations work from any directory.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "vaac/vaac.hpp"

namespace fs = std::filesystem;

namespace {

std::string resolve(const std::string& path, const fs::path& base) {
  fs::path p(path);
  return (p.is_absolute() ? p : base / p).string();
}

int cmd_run(const vaac::MdpModel& model, const vaac::ExperimentConfig& config,
            const fs::path& base) {
  vaac::TrainingHistory history = vaac::run_training(model, config);
  std::printf("%10s %12s %12s %12s %12s %12s %8s\n", "episode", "eta", "J_oracle", "V_oracle",
              "|grad|", "critic_gap", "clamped");
  for (const vaac::TrainingRecord& record : history.records)
    std::printf("%10lld %12.6f %12.6f %12.6f %12.6f %12.6f %8lld\n", record.episode, record.eta,
                record.j_oracle, record.v_oracle, record.grad_norm, record.critic_gap,
                record.clamp_events);
  std::printf("final theta:");
  for (int k = 0; k < history.final_theta.size(); ++k)
    std::printf(" %.6f", history.final_theta[k]);
  if (history.final_theta.size() == 0) std::printf(" (no parameters)");
  std::printf("\n");
  if (!config.output_path.empty()) {
    const std::string out = resolve(config.output_path, base);
    vaac::export_history(history, out);
    std::printf("history written to %s\n", out.c_str());
  }
  return 0;
}

int cmd_eval(const vaac::MdpModel& model, const vaac::ExperimentConfig& config) {
  std::cout << vaac::eval_report(model, config).dump(2) << "\n";
  return 0;
}

int cmd_grad_check(const vaac::MdpModel& model, const vaac::ExperimentConfig& config) {
  vaac::GradCheckReport report = vaac::grad_check(model, config);
  for (const vaac::GradCheckItem& item : report.items)
    std::printf("[%s] %s: %.3g (threshold %.3g)%s%s\n", item.pass ? "PASS" : "FAIL",
                item.name.c_str(), item.value, item.threshold, item.detail.empty() ? "" : " - ",
                item.detail.c_str());
  std::printf("%s\n", report.all_pass ? "all checks passed" : "some checks FAILED");
  return report.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variance-penalized episodic actor-critic"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "train a policy and export the training history");
  CLI::App* eval = app.add_subcommand("eval", "print the oracle summary for the configured policy");
  CLI::App* check = app.add_subcommand("grad-check", "cross-validate the gradient pipeline");
  for (CLI::App* cmd : {run, eval, check})
    cmd->add_option("-c,--config", config_path, "experiment config JSON")
        ->required()
        ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    const vaac::ExperimentConfig config = vaac::load_config(config_path);
    const fs::path base = fs::absolute(fs::path(config_path)).parent_path();
    const vaac::MdpModel model = vaac::load_model(resolve(config.model_path, base));
    if (run->parsed()) return cmd_run(model, config, base);
    if (eval->parsed()) return cmd_eval(model, config);
    return cmd_grad_check(model, config);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  }
}
