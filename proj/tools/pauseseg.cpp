// pauseseg — mine word boundaries from speech pauses, encode them as
// partial annotations, and train/evaluate a CRF word segmenter.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pauseseg/alignment.hpp"
#include "pauseseg/corpus.hpp"
#include "pauseseg/evalkit.hpp"
#include "pauseseg/mining.hpp"
#include "pauseseg/normalize.hpp"
#include "pauseseg/synth.hpp"
#include "pauseseg/tagger.hpp"

namespace {

using namespace pauseseg;

struct MineArgs {
  std::string alignments, out, rejects;
  double min_ms = 50.0;
  double alpha = 0.30;
  double frame_offset = kDefaultFrameOffsetMs;
  bool keep_negative_gaps = false;
};

int cmd_mine(const MineArgs& a) {
  AlignmentParseOptions opts;
  opts.default_frame_offset_ms = a.frame_offset;
  opts.allow_negative_gaps = a.keep_negative_gaps;
  const AlignmentParseResult parsed = parse_alignment_file(a.alignments, opts);
  const MiningResult mined = mine_corpus(parsed.sentences, {a.min_ms, a.alpha});
  write_partial_file(a.out, mined.annotations);
  if (!parsed.rejections.empty()) {
    const std::string sidecar = a.rejects.empty() ? a.out + ".rejects" : a.rejects;
    write_rejection_report(sidecar, parsed.rejections);
  }
  std::cout << "sentences\t" << mined.stats.sentences << "\n"
            << "boundaries\t" << mined.stats.boundaries << "\n"
            << "rejected\t" << parsed.rejections.size() << "\n";
  return 0;
}

struct SweepArgs {
  std::string alignments, gold, out;
  std::vector<double> min_grid;
  std::vector<double> alpha_grid;
  double frame_offset = kDefaultFrameOffsetMs;
};

int cmd_sweep(const SweepArgs& a) {
  AlignmentParseOptions opts;
  opts.default_frame_offset_ms = a.frame_offset;
  const AlignmentParseResult parsed = parse_alignment_file(a.alignments, opts);
  const auto gold = read_segmented_file(a.gold);
  const auto& mins = a.min_grid.empty() ? default_min_grid() : a.min_grid;
  const auto& alphas = a.alpha_grid.empty() ? default_alpha_grid() : a.alpha_grid;
  const auto rows = sweep_thresholds(parsed.sentences, gold, mins, alphas);
  std::ofstream out(a.out);
  if (!out) throw DataError("cannot write sweep table: " + a.out);
  write_sweep_tsv(out, rows);
  std::cout << "rows\t" << rows.size() << "\n";
  return 0;
}

struct SynthArgs {
  std::string out_dir;
  SynthSpec spec;
};

int cmd_synth(const SynthArgs& a) {
  const SynthCorpus corpus = synthesize(a.spec);
  const SynthPaths paths = write_synth_corpus(corpus, a.out_dir);
  std::cout << "src_train\t" << paths.src_train << "\n"
            << "tgt_dev\t" << paths.tgt_dev << "\n"
            << "tgt_test\t" << paths.tgt_test << "\n"
            << "speech\t" << paths.speech << "\n"
            << "speech_gold\t" << paths.speech_gold << "\n";
  return 0;
}

struct TrainArgs {
  std::string train, dev, out, strategy = "base-only";
  std::string partial, completed_out, base_model_out;
  TrainConfig cfg;
};

int cmd_train(const TrainArgs& a) {
  const Strategy strategy = parse_strategy(a.strategy);
  std::vector<LabeledSentence> base;
  for (const auto& s : read_segmented_file(a.train)) base.push_back(labeled_from_segmented(s));
  const auto dev = read_segmented_file(a.dev);

  if (strategy == Strategy::BaseOnly && !a.partial.empty()) {
    throw DataError("strategy base-only does not take --partial");
  }
  if (strategy != Strategy::BaseOnly && a.partial.empty()) {
    throw DataError("strategy " + a.strategy + " requires --partial");
  }

  CrfModel model;
  TrainStats stats;
  if (strategy == Strategy::BaseOnly) {
    model = train(base, dev, a.cfg, &stats);
  } else if (strategy == Strategy::DirectlyTrain) {
    const auto partial = read_partial_file(a.partial);
    model = train(base, partial, dev, a.cfg, &stats);
  } else {
    const auto partial = read_partial_file(a.partial);
    const bool constrained = strategy == Strategy::CompleteThenTrain;
    const CompleteThenTrainResult r = complete_then_train(base, partial, dev, a.cfg, constrained);
    model = r.final_model;
    stats = r.final_stats;
    if (!a.completed_out.empty()) {
      std::vector<SegmentedSentence> completed;
      completed.reserve(r.completed.size());
      for (const auto& s : r.completed) completed.push_back(segmented_from_labeled(s));
      write_segmented_file(a.completed_out, completed);
    }
    if (!a.base_model_out.empty()) save_model(r.base_model, a.base_model_out);
    std::cout << "base_dev_f1\t" << format_percent(r.base_stats.best_dev_f1) << "\n";
  }
  save_model(model, a.out);
  std::cout << "strategy\t" << strategy_name(strategy) << "\n"
            << "epochs\t" << stats.epochs_run << "\n"
            << "best_epoch\t" << stats.best_epoch << "\n"
            << "dev_f1\t" << format_percent(stats.best_dev_f1) << "\n";
  return 0;
}

struct CompleteArgs {
  std::string model, partial, out;
  bool no_constraint = false;
};

int cmd_complete(const CompleteArgs& a) {
  const CrfModel model = load_model(a.model);
  const auto partial = read_partial_file(a.partial);
  const auto completed = complete(model, partial, !a.no_constraint);
  std::vector<SegmentedSentence> segmented;
  segmented.reserve(completed.size());
  for (const auto& s : completed) segmented.push_back(segmented_from_labeled(s));
  write_segmented_file(a.out, segmented);
  std::cout << "sentences\t" << segmented.size() << "\n";
  return 0;
}

struct TagArgs {
  std::string model, input, out;
};

int cmd_tag(const TagArgs& a) {
  const CrfModel model = load_model(a.model);
  const auto lines = read_raw_lines(a.input);
  std::ofstream out(a.out);
  if (!out) throw DataError("cannot write output file: " + a.out);
  for (const std::string& line : lines) {
    const auto words = tag(model, utf8::split_chars(line));
    for (std::size_t w = 0; w < words.size(); ++w) {
      if (w) out << ' ';
      out << words[w];
    }
    out << '\n';
  }
  std::cout << "sentences\t" << lines.size() << "\n";
  return 0;
}

struct EvalArgs {
  std::string gold, pred, train_vocab, json_out;
};

int cmd_eval(const EvalArgs& a) {
  const auto gold = read_segmented_file(a.gold);
  const auto pred = read_segmented_file(a.pred);
  EvalReport report;
  if (a.train_vocab.empty()) {
    report = evaluate(gold, pred);
  } else {
    const auto vocab = word_vocabulary(read_segmented_file(a.train_vocab));
    report = evaluate(gold, pred, &vocab);
  }
  std::cout << render_report(report);
  if (!a.json_out.empty()) {
    std::ofstream out(a.json_out);
    if (!out) throw DataError("cannot write report: " + a.json_out);
    out << report_to_json(report).dump() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mine word boundaries from speech pauses and train a CWS tagger"};
  app.require_subcommand(1);

  MineArgs mine_args;
  auto* mine = app.add_subcommand("mine", "extract partial annotations from alignments");
  mine->add_option("--alignments", mine_args.alignments, "alignment JSONL input")->required();
  mine->add_option("--out", mine_args.out, "partial-annotation JSONL output")->required();
  mine->add_option("--min", mine_args.min_ms, "minimum pause in ms (MIN)")->capture_default_str();
  mine->add_option("--alpha", mine_args.alpha, "minimum pause as a ratio of the mean char duration")
      ->capture_default_str();
  mine->add_option("--frame-offset", mine_args.frame_offset,
                   "frame offset in ms for records that omit it")
      ->capture_default_str();
  mine->add_option("--rejects", mine_args.rejects, "sidecar report path (default <out>.rejects)");
  mine->add_flag("--keep-negative-gaps", mine_args.keep_negative_gaps,
                 "keep records with overlapping neighbour spans");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "score mining thresholds over a grid");
  sweep->add_option("--alignments", sweep_args.alignments, "alignment JSONL input")->required();
  sweep->add_option("--gold", sweep_args.gold, "gold segmented corpus, line-aligned")->required();
  sweep->add_option("--out", sweep_args.out, "TSV output")->required();
  sweep->add_option("--min-grid", sweep_args.min_grid, "comma-separated MIN values")->delimiter(',');
  sweep->add_option("--alpha-grid", sweep_args.alpha_grid, "comma-separated alpha values")
      ->delimiter(',');
  sweep->add_option("--frame-offset", sweep_args.frame_offset,
                    "frame offset in ms for records that omit it")
      ->capture_default_str();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate a two-domain synthetic benchmark");
  synth->add_option("--out-dir", synth_args.out_dir, "output directory")->required();
  synth->add_option("--seed", synth_args.spec.seed, "generator seed")->capture_default_str();
  synth->add_option("--src-sentences", synth_args.spec.src_train_sentences, "source training size")
      ->capture_default_str();
  synth->add_option("--dev-sentences", synth_args.spec.tgt_dev_sentences, "target dev size")
      ->capture_default_str();
  synth->add_option("--test-sentences", synth_args.spec.tgt_test_sentences, "target test size")
      ->capture_default_str();
  synth->add_option("--speech-sentences", synth_args.spec.speech_sentences, "aligned speech size")
      ->capture_default_str();
  synth->add_option("--noise", synth_args.spec.noise, "probability of drawing a pause from the wrong side")
      ->capture_default_str();
  synth->add_option("--tail-fraction", synth_args.spec.tail_fraction,
                    "probability of a domain-tail word")
      ->capture_default_str();
  synth->add_option("--intra-mean", synth_args.spec.intra_ms_mean, "mean intra-word pause (ms)")
      ->capture_default_str();
  synth->add_option("--inter-mean", synth_args.spec.inter_ms_mean, "mean inter-word pause (ms)")
      ->capture_default_str();
  synth->add_option("--frame-offset", synth_args.spec.frame_offset_ms, "frame offset (ms)")
      ->capture_default_str();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train a segmenter");
  train_cmd->add_option("--train", train_args.train, "base segmented training corpus")->required();
  train_cmd->add_option("--dev", train_args.dev, "segmented dev corpus (early stopping)")->required();
  train_cmd->add_option("--out", train_args.out, "model output path")->required();
  train_cmd
      ->add_option("--strategy", train_args.strategy,
                   "base-only | directly-train | complete-then-train | no-constraint-ablation")
      ->capture_default_str();
  train_cmd->add_option("--partial", train_args.partial, "partial-annotation JSONL");
  train_cmd->add_option("--completed-out", train_args.completed_out,
                        "write the completed corpus here (complete-then-train)");
  train_cmd->add_option("--base-model-out", train_args.base_model_out,
                        "write the intermediate base model here");
  train_cmd->add_option("--seed", train_args.cfg.seed, "training seed")->capture_default_str();
  train_cmd->add_option("--lr", train_args.cfg.learning_rate, "learning rate")->capture_default_str();
  train_cmd->add_option("--batch-size", train_args.cfg.batch_size, "sentences per mini-batch")
      ->capture_default_str();
  train_cmd->add_option("--patience", train_args.cfg.patience, "early-stopping patience in epochs")
      ->capture_default_str();
  train_cmd->add_option("--max-epochs", train_args.cfg.max_epochs, "epoch cap")->capture_default_str();
  train_cmd->add_option("--l2", train_args.cfg.l2, "L2 strength")->capture_default_str();

  CompleteArgs complete_args;
  auto* complete_cmd = app.add_subcommand("complete", "complete partial annotations with a model");
  complete_cmd->add_option("--model", complete_args.model, "model file")->required();
  complete_cmd->add_option("--partial", complete_args.partial, "partial-annotation JSONL")->required();
  complete_cmd->add_option("--out", complete_args.out, "segmented output")->required();
  complete_cmd->add_flag("--no-constraint", complete_args.no_constraint,
                         "ignore mined boundaries (ablation)");

  TagArgs tag_args;
  auto* tag_cmd = app.add_subcommand("tag", "segment raw text");
  tag_cmd->add_option("--model", tag_args.model, "model file")->required();
  tag_cmd->add_option("--input", tag_args.input, "raw text, one sentence per line")->required();
  tag_cmd->add_option("--out", tag_args.out, "segmented output")->required();

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "score a segmentation against gold");
  eval_cmd->add_option("--gold", eval_args.gold, "gold segmented corpus")->required();
  eval_cmd->add_option("--pred", eval_args.pred, "predicted segmented corpus")->required();
  eval_cmd->add_option("--train-vocab", eval_args.train_vocab,
                       "segmented corpus whose words form the in-vocabulary set");
  eval_cmd->add_option("--json", eval_args.json_out, "also write the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(mine)) return cmd_mine(mine_args);
    if (app.got_subcommand(sweep)) return cmd_sweep(sweep_args);
    if (app.got_subcommand(synth)) return cmd_synth(synth_args);
    if (app.got_subcommand(train_cmd)) return cmd_train(train_args);
    if (app.got_subcommand(complete_cmd)) return cmd_complete(complete_args);
    if (app.got_subcommand(tag_cmd)) return cmd_tag(tag_args);
    if (app.got_subcommand(eval_cmd)) return cmd_eval(eval_args);
  } catch (const DataError& e) {
    std::cerr << "error: data: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
