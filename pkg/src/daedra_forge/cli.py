"""Command line front end.

One subcommand per pipeline stage: ingest, stats, split, train-tokenizer,
tokenize, compare, train, evaluate, predict, export, verify. Structured
JSON logs go to stderr, human-readable progress to stdout. Exit codes:
0 success, 1 operational failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path
from typing import Sequence

from . import baseline_model, manifest, selection, splitter, tokenizer
from .baseline_model import TrainConfig, desk_config
from .corpus_ingest import (
    IngestError,
    ParseStats,
    corpus_stats,
    filter_reports,
    parse_vaers_csv,
    read_reports_jsonl,
    report_to_dict,
    write_reports_jsonl,
)
from .evaluation import (
    classwise_report,
    metrics_to_dict,
    set_combination_table,
    write_classwise_csv,
    write_combination_csv,
)
from .labels import CLASS_NAMES, events_of
from .manifest import RunManifest, SCHEMA_VERSION, TOOL_VERSION, manifest_path_for
from .tokenizer import VocabularyError, encode, load_vocab, save_vocab, tokenize, train_wordpiece

PROG = "daedra-forge"


class CliError(RuntimeError):
    """Operational failure surfaced to the user; exits with code 1."""


def _log(event: str, **fields) -> None:
    record = {"ts": time.strftime("%Y-%m-%dT%H:%M:%S%z"), "event": event}
    record.update(fields)
    print(json.dumps(record, ensure_ascii=False), file=sys.stderr)


def _ensure_writable(path: Path, force: bool) -> None:
    if path.exists() and not force:
        raise CliError(f"refusing to overwrite {path}; pass --force to replace it")


def _ratio_triple(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated ratios")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return values  # range/sum checked by the splitter


def _load_reports(path: str) -> list:
    try:
        return list(read_reports_jsonl(path))
    except (OSError, ValueError) as exc:
        raise CliError(f"{path}: {exc}") from exc


def _load_vocab_or_die(path: str) -> tokenizer.Vocabulary:
    try:
        return load_vocab(path)
    except (OSError, VocabularyError) as exc:
        raise CliError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


_ENCODING_NAMES = {"latin1": "latin-1", "utf8": "utf-8"}


def cmd_ingest(args: argparse.Namespace) -> int:
    out_path = Path(args.output)
    _ensure_writable(out_path, args.force)
    encoding = _ENCODING_NAMES[args.encoding]
    run = RunManifest(
        stage="ingest",
        config={"encoding": encoding, "on_error": args.on_error},
    )
    total_rows = 0
    total_errors = 0
    kept = 0
    with open(out_path, "w", encoding="utf-8") as sink:
        for input_path in args.input:
            run.add_input(input_path)
            stats = ParseStats()
            try:
                with open(input_path, "rb") as stream:
                    raws = parse_vaers_csv(
                        stream,
                        on_error=args.on_error,
                        encoding=encoding,
                        stats=stats,
                    )
                    file_kept = 0
                    for report in filter_reports(raws):
                        sink.write(json.dumps(report_to_dict(report), ensure_ascii=False))
                        sink.write("\n")
                        file_kept += 1
            except (OSError, IngestError) as exc:
                raise CliError(f"{input_path}: {exc}") from exc
            total_rows += stats.rows
            total_errors += stats.errors
            kept += file_kept
            _log(
                "ingest.file",
                path=str(input_path),
                rows=stats.rows,
                malformed=stats.errors,
                kept=file_kept,
            )
            print(
                f"{input_path}: {stats.rows} rows, {stats.errors} malformed, "
                f"{file_kept} kept"
            )
    run.add_output(out_path)
    run.write(manifest_path_for(out_path))
    print(f"total: {total_rows} rows, {total_errors} malformed, {kept} kept -> {out_path}")
    _log("ingest.done", rows=total_rows, malformed=total_errors, kept=kept)
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    reports = _load_reports(args.input)
    stats = corpus_stats(reports)
    print(f"records: {stats.record_count}")
    print(f"words:   {stats.word_count}")
    print("class histogram:")
    for label, (count, fraction) in stats.class_histogram.items():
        print(f"  {label}  {CLASS_NAMES[label]:<45} {count:>10}  {100 * fraction:6.1f}%")
    if args.json:
        payload = {
            "records": stats.record_count,
            "words": stats.word_count,
            "classes": {
                str(label): {
                    "name": CLASS_NAMES[label],
                    "count": count,
                    "fraction": fraction,
                }
                for label, (count, fraction) in stats.class_histogram.items()
            },
        }
        json_path = Path(args.json)
        _ensure_writable(json_path, args.force)
        json_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    _log("stats.done", records=stats.record_count, words=stats.word_count)
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    partition_files = {
        splitter.Partition.TRAIN: out_dir / "train.jsonl",
        splitter.Partition.TEST: out_dir / "test.jsonl",
        splitter.Partition.VALIDATION: out_dir / "validation.jsonl",
    }
    for path in partition_files.values():
        _ensure_writable(path, args.force)

    reports = _load_reports(args.input)
    try:
        assignment = splitter.stratified_split(reports, ratios=args.ratios, seed=args.seed)
    except ValueError as exc:
        raise CliError(str(exc)) from exc

    run = RunManifest(
        stage="split",
        seed=args.seed,
        config={"ratios": list(assignment.ratios), "algorithm": assignment.algorithm},
    )
    run.add_input(args.input)

    by_partition = {p: [] for p in splitter.Partition}
    for report in reports:
        by_partition[assignment.partition_of[report.vaers_id]].append(report)
    for partition, path in partition_files.items():
        count = write_reports_jsonl(by_partition[partition], path)
        run.add_output(path)
        print(f"{partition.value}: {count} records -> {path}")
        _log("split.partition", partition=partition.value, count=count)

    split_manifest = {
        "algorithm": assignment.algorithm,
        "seed": assignment.seed,
        "ratios": list(assignment.ratios),
        "quintile_cuts": list(assignment.quintiles.cuts) if assignment.quintiles else None,
        "strata": assignment.per_stratum_counts,
        "totals": {p.value: len(by_partition[p]) for p in splitter.Partition},
    }
    split_manifest_path = out_dir / "split-manifest.json"
    split_manifest_path.write_text(
        json.dumps(split_manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    run.add_output(split_manifest_path)
    run.write(out_dir / manifest.MANIFEST_BASENAME)
    _log("split.done", seed=args.seed, records=len(reports))
    return 0


def cmd_train_tokenizer(args: argparse.Namespace) -> int:
    out_path = Path(args.output)
    _ensure_writable(out_path, args.force)
    run = RunManifest(
        stage="train-tokenizer",
        config={
            "vocab_size": args.vocab_size,
            "min_frequency": args.min_freq,
            "threads": args.threads,
        },
    )
    texts: list[str] = []
    for input_path in args.input:
        run.add_input(input_path)
        texts.extend(r.text for r in _load_reports(input_path))
    _log("train-tokenizer.corpus", documents=len(texts))
    started = time.perf_counter()
    try:
        vocab = train_wordpiece(
            texts,
            target_size=args.vocab_size,
            min_frequency=args.min_freq,
            threads=args.threads,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    elapsed = time.perf_counter() - started
    save_vocab(vocab, out_path)
    run.add_output(out_path)
    run.write(manifest_path_for(out_path))
    print(f"vocabulary: {vocab.size} entries in {elapsed:.1f}s -> {out_path}")
    _log("train-tokenizer.done", entries=vocab.size, seconds=round(elapsed, 3))
    return 0


def cmd_tokenize(args: argparse.Namespace) -> int:
    vocab = _load_vocab_or_die(args.vocab)
    if args.text is not None:
        lines = [args.text]
    else:
        with open(args.input, "r", encoding="utf-8") as handle:
            lines = [line.rstrip("\n") for line in handle]
    for line in lines:
        pieces = [
            piece
            for word in tokenizer.pretokenize(line)
            for piece in tokenize(word, vocab)
        ]
        encoded = encode(line, vocab, max_sequence_length=args.max_length)
        print("tokens: " + " ".join(pieces))
        print("ids:    " + " ".join(str(i) for i in encoded.ids))
        if encoded.truncated:
            print(f"(truncated to {args.max_length} ids)")
    return 0


def _read_candidates(path: str) -> list[selection.CandidateConfig]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"{path}: {exc}") from exc
    if not isinstance(raw, list):
        raise CliError(f"{path}: expected a JSON array of candidates")
    candidates = []
    for entry in raw:
        try:
            name = entry["name"]
            vocab_path = entry["vocab"]
        except (TypeError, KeyError) as exc:
            raise CliError(f"{path}: each candidate needs 'name' and 'vocab'") from exc
        candidates.append(
            selection.CandidateConfig(
                name=name,
                vocab=_load_vocab_or_die(vocab_path),
                overrides=entry.get("overrides", {}),
            )
        )
    return candidates


def cmd_compare(args: argparse.Namespace) -> int:
    out_path = Path(args.out)
    _ensure_writable(out_path, args.force)
    candidates = _read_candidates(args.candidates)
    train_set = _load_reports(args.train)
    test_set = _load_reports(args.test)
    if args.fraction < 1.0:
        train_set = splitter.subsample_reports(train_set, args.fraction, args.seed)
        test_set = splitter.subsample_reports(test_set, args.fraction, args.seed)
        _log(
            "compare.subsample",
            fraction=args.fraction,
            train=len(train_set),
            test=len(test_set),
        )
        if not train_set or not test_set:
            raise CliError(
                f"subsampling at fraction {args.fraction} left "
                f"{len(train_set)} train / {len(test_set)} test records; "
                f"use a larger --fraction"
            )
    base = _profile_config(args.profile, epochs=args.epochs, seed=args.seed)
    run = RunManifest(
        stage="compare",
        seed=args.seed,
        config={
            "fraction": args.fraction,
            "epsilon": args.epsilon,
            "profile": args.profile,
            "base_config": asdict(base),
        },
    )
    for path in (args.candidates, args.train, args.test):
        run.add_input(path)
    rows = selection.run_comparison(candidates, train_set, test_set, base_config=base)
    try:
        best = selection.select_best(rows, epsilon=args.epsilon)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    print(selection.render_table(rows, selected=best))
    print(f"selected: {best.name}")
    selection.write_comparison_json(
        out_path, rows, best, epsilon=args.epsilon, seed=args.seed, fraction=args.fraction
    )
    run.add_output(out_path)
    run.write(manifest_path_for(out_path))
    _log("compare.done", selected=best.name, candidates=len(rows))
    return 0


def _profile_config(profile: str, **overrides) -> TrainConfig:
    if profile == "desk":
        return desk_config(**overrides)
    return TrainConfig(**overrides)


def _read_config_file(path: str) -> dict:
    text = Path(path).read_bytes()
    if path.endswith(".json"):
        return json.loads(text)
    try:
        import tomllib  # Python 3.11+
    except ModuleNotFoundError:
        import tomli as tomllib
    return tomllib.loads(text.decode("utf-8"))


def cmd_train(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    config = _profile_config(args.profile)
    if args.config:
        try:
            overrides = _read_config_file(args.config)
            config = replace(config, **overrides)
        except (OSError, ValueError, TypeError) as exc:
            raise CliError(f"{args.config}: {exc}") from exc
    cli_overrides = {
        key: value
        for key, value in (
            ("seed", args.seed),
            ("epochs", args.epochs),
            ("batch_size", args.batch_size),
            ("learning_rate", args.learning_rate),
            ("eval_every_steps", args.eval_every),
        )
        if value is not None
    }
    if args.tfidf:
        cli_overrides["tfidf"] = True
    if args.class_weights:
        cli_overrides["class_weights"] = True
    try:
        config = replace(config, **cli_overrides)
    except TypeError as exc:
        raise CliError(str(exc)) from exc

    train_set = _load_reports(args.train)
    test_set = _load_reports(args.test)
    vocab = _load_vocab_or_die(args.vocab)
    run = RunManifest(stage="train", seed=config.seed, config=asdict(config))
    for path in (args.train, args.test, args.vocab):
        run.add_input(path)

    _log(
        "train.start",
        examples=len(train_set),
        test_examples=len(test_set),
        vocab=vocab.size,
        profile=args.profile,
    )
    started = time.perf_counter()
    try:
        best, history = baseline_model.train(train_set, test_set, vocab, config)
    except (ValueError, baseline_model.NonFiniteGradientError) as exc:
        raise CliError(str(exc)) from exc
    elapsed = time.perf_counter() - started

    checkpoint_path = out_dir / f"checkpoint-{best.step}.bin"
    _ensure_writable(checkpoint_path, args.force)
    baseline_model.save_checkpoint(checkpoint_path, best, config)
    run.add_output(checkpoint_path)

    history_path = out_dir / "history.jsonl"
    with open(history_path, "w", encoding="utf-8") as handle:
        for entry in history:
            handle.write(json.dumps(asdict(entry)) + "\n")
    run.add_output(history_path)

    best_path = out_dir / "best.json"
    best_path.write_text(
        json.dumps(
            {
                "checkpoint": checkpoint_path.name,
                "step": best.step,
                "micro_f1": best.test_metrics.micro.f1,
                "micro_precision": best.test_metrics.micro.precision,
                "micro_recall": best.test_metrics.micro.recall,
                "runtime_seconds": elapsed,
                "config": asdict(config),
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    run.add_output(best_path)
    run.write(out_dir / manifest.MANIFEST_BASENAME)

    for entry in history:
        _log("train.eval", step=entry.step, loss=entry.loss, f1=entry.f1)
    print(
        f"best checkpoint: step {best.step}, micro-F1 {best.test_metrics.micro.f1:.4f} "
        f"({elapsed:.1f}s) -> {checkpoint_path}"
    )
    return 0


def _load_checkpoint_or_die(path: str) -> baseline_model.LoadedCheckpoint:
    try:
        return baseline_model.load_checkpoint(path)
    except (OSError, ValueError) as exc:
        raise CliError(str(exc)) from exc


def _check_vocab_matches(loaded: baseline_model.LoadedCheckpoint, vocab) -> None:
    expected = loaded.params.weights.shape[1]
    if vocab.size != expected:
        raise CliError(
            f"vocabulary size {vocab.size} does not match checkpoint "
            f"(expects {expected})"
        )


def cmd_evaluate(args: argparse.Namespace) -> int:
    out_path = Path(args.out)
    _ensure_writable(out_path, args.force)
    loaded = _load_checkpoint_or_die(args.checkpoint)
    vocab = _load_vocab_or_die(args.vocab)
    _check_vocab_matches(loaded, vocab)
    reports = _load_reports(args.data)
    if not reports:
        raise CliError(f"{args.data}: no records to evaluate")

    max_len = int(loaded.config.get("max_sequence_length", tokenizer.DEFAULT_MAX_SEQUENCE_LENGTH))
    preds = []
    golds = []
    for report in reports:
        pred, _ = baseline_model.predict(
            loaded.params, vocab, report.text, max_sequence_length=max_len, idf=loaded.idf
        )
        preds.append(pred)
        golds.append(report.label)
    report_metrics = classwise_report(preds, golds)
    table = set_combination_table(preds, golds)

    run = RunManifest(stage="evaluate", config={"checkpoint_step": loaded.step})
    for path in (args.checkpoint, args.vocab, args.data):
        run.add_input(path)
    payload = metrics_to_dict(report_metrics, table)
    out_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    run.add_output(out_path)

    if args.csv:
        csv_dir = Path(args.csv)
        csv_dir.mkdir(parents=True, exist_ok=True)
        classwise_path = csv_dir / "classwise.csv"
        combos_path = csv_dir / "combinations.csv"
        for path in (classwise_path, combos_path):
            _ensure_writable(path, args.force)
        write_classwise_csv(report_metrics, classwise_path)
        write_combination_csv(table, combos_path)
        run.add_output(classwise_path)
        run.add_output(combos_path)
        print(f"csv -> {classwise_path}, {combos_path}")
    run.write(manifest_path_for(out_path))

    micro = report_metrics.micro
    macro = report_metrics.macro
    print(f"examples:  {report_metrics.n_examples}")
    print(f"micro:     P {micro.precision:.4f}  R {micro.recall:.4f}  F1 {micro.f1:.4f}")
    print(f"macro:     P {macro.precision:.4f}  R {macro.recall:.4f}  F1 {macro.f1:.4f}")
    _log("evaluate.done", examples=report_metrics.n_examples, micro_f1=micro.f1)
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    loaded = _load_checkpoint_or_die(args.checkpoint)
    vocab = _load_vocab_or_die(args.vocab)
    _check_vocab_matches(loaded, vocab)
    max_len = int(loaded.config.get("max_sequence_length", tokenizer.DEFAULT_MAX_SEQUENCE_LENGTH))
    label, probs = baseline_model.predict(
        loaded.params, vocab, args.text, max_sequence_length=max_len, idf=loaded.idf
    )
    events = sorted(kind.name for kind in events_of(label))
    print(f"class:    {label} ({CLASS_NAMES[label]})")
    print(f"events:   {', '.join(events) if events else 'none'}")
    print("probabilities:")
    for class_id, prob in enumerate(probs):
        print(f"  {class_id}  {CLASS_NAMES[class_id]:<45} {prob:.4f}")
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    out_path = Path(args.output)
    _ensure_writable(out_path, args.force)
    vocab = _load_vocab_or_die(args.vocab)
    reports = _load_reports(args.input)
    run = RunManifest(stage="export", config={"max_length": args.max_length})
    run.add_input(args.input)
    run.add_input(args.vocab)
    written = 0
    truncated = 0
    with open(out_path, "w", encoding="utf-8") as handle:
        for report in reports:
            encoded = encode(report.text, vocab, max_sequence_length=args.max_length)
            truncated += encoded.truncated
            handle.write(
                json.dumps(
                    {
                        "id": report.vaers_id,
                        "label": report.label,
                        "input_ids": list(encoded.ids),
                    }
                )
            )
            handle.write("\n")
            written += 1
    run.add_output(out_path)
    run.write(manifest_path_for(out_path))
    print(f"exported {written} records ({truncated} truncated) -> {out_path}")
    _log("export.done", records=written, truncated=truncated)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        problems = manifest.verify_manifest(args.manifest)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"{args.manifest}: {exc}") from exc
    if problems:
        for problem in problems:
            print(f"FAIL  {problem}")
        _log("verify.failed", manifest=args.manifest, problems=len(problems))
        return 1
    print(f"OK  {args.manifest}")
    _log("verify.ok", manifest=args.manifest)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Corpus engineering and evaluation pipeline for VAERS "
        "safety-report severity classification.",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"{PROG} {TOOL_VERSION} (schema {SCHEMA_VERSION})",
    )
    parser.add_argument(
        "--force", action="store_true", help="overwrite existing output files"
    )
    parser.add_argument(
        "--threads", type=int, default=1, help="worker processes for corpus counting"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse VAERS CSVs into a JSONL corpus")
    p.add_argument("--input", nargs="+", required=True, help="VAERS CSV file(s)")
    p.add_argument("--output", required=True, help="destination JSONL path")
    p.add_argument("--encoding", choices=["latin1", "utf8"], default="latin1")
    p.add_argument("--on-error", choices=["skip", "abort"], default="skip")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="corpus size and outcome-class histogram")
    p.add_argument("--input", required=True, help="JSONL corpus")
    p.add_argument("--json", help="also write the numbers to this JSON file")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("split", help="demographically stratified train/test/validation split")
    p.add_argument("--input", required=True, help="JSONL corpus")
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--ratios",
        type=_ratio_triple,
        default=(0.70, 0.15, 0.15),
        help="train,test,validation fractions (default 0.70,0.15,0.15)",
    )
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train-tokenizer", help="learn a WordPiece vocabulary")
    p.add_argument("--input", nargs="+", required=True, help="JSONL corpus file(s)")
    p.add_argument("--output", required=True, help="vocabulary file path")
    p.add_argument("--vocab-size", type=int, default=tokenizer.DEFAULT_TARGET_SIZE)
    p.add_argument("--min-freq", type=int, default=2)
    p.set_defaults(func=cmd_train_tokenizer)

    p = sub.add_parser("tokenize", help="tokenize text with a trained vocabulary")
    p.add_argument("--vocab", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--text", help="tokenize this string")
    group.add_argument("--input", help="tokenize each line of this file")
    p.add_argument("--max-length", type=int, default=tokenizer.DEFAULT_MAX_SEQUENCE_LENGTH)
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("compare", help="train candidate configurations and pick one")
    p.add_argument("--candidates", required=True, help="JSON array of candidates")
    p.add_argument("--train", required=True, help="training JSONL")
    p.add_argument("--test", required=True, help="evaluation JSONL")
    p.add_argument("--out", required=True, help="comparison JSON path")
    p.add_argument("--fraction", type=float, default=0.10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=selection.DEFAULT_EPSILON)
    p.add_argument("--epochs", type=int, default=selection.SELECTION_EPOCHS)
    p.add_argument("--profile", choices=["paper", "desk"], default="paper")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("train", help="train the bag-of-tokens classifier")
    p.add_argument("--train", required=True, help="training JSONL")
    p.add_argument("--test", required=True, help="checkpoint-selection JSONL")
    p.add_argument("--vocab", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--profile", choices=["paper", "desk"], default="paper")
    p.add_argument("--config", help="TOML or JSON file with TrainConfig overrides")
    p.add_argument("--seed", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--eval-every", type=int)
    p.add_argument("--tfidf", action="store_true")
    p.add_argument("--class-weights", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a checkpoint on a dataset")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--data", required=True, help="JSONL dataset")
    p.add_argument("--out", required=True, help="metrics JSON path")
    p.add_argument("--csv", help="also write classwise/combination CSVs to this directory")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="classify one narrative")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--text", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("export", help="write encoded id sequences as JSONL")
    p.add_argument("--input", required=True, help="JSONL corpus")
    p.add_argument("--vocab", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--max-length", type=int, default=tokenizer.DEFAULT_MAX_SEQUENCE_LENGTH)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("verify", help="re-hash files recorded in a run manifest")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        _log("error", detail=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (IngestError, VocabularyError) as exc:
        _log("error", detail=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 1
    except OSError as exc:
        _log("error", detail=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
