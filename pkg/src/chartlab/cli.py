"""Command-line entry point.

Subcommands: gen (synthesize a corpus), train (fine-tune a model), eval
(score a checkpoint), ablate (run the four training variants and tabulate
CIDEr), report (re-render stored results). Every artifact-producing run
writes a JSON manifest capturing the exact configuration, seeds and
sha256 of each produced file. Exit codes: 0 success, 1 runtime/input
error, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .chartgen import build_corpus, load_corpus, save_corpus
from .metrics import evaluate_model, render_delimited, render_text, report_from_json, report_to_json
from .model import ModelConfig, build_vocabulary, load_checkpoint, save_checkpoint
from .train import (
    AugmentConfig,
    TrainConfig,
    fit,
    history_to_table,
    parse_train_config,
    render_train_config,
)
from .train.sequences import VARIANTS

# reference ranking used for the directional (not gated) ablation readout
EXPECTED_VARIANT_RANKING = ("full", "no_curriculum", "no_aug", "no_vcot")


class CliError(Exception):
    """Runtime failure with a user-facing message (exit status 1)."""


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(path: Path, command: str, settings: dict, artifacts) -> None:
    manifest = {
        "tool": "chartlab",
        "version": __version__,
        "command": command,
        "settings": settings,
        "artifacts": {str(p): _sha256(Path(p)) for p in artifacts},
    }
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")


def _require_file(path: str, role: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise CliError(f"{role} file not found: {path}")
    return p


def _split_corpus(records):
    """Deterministic 80/10/10 split by record index (8 -> val, 9 -> test)."""
    train = [r for i, r in enumerate(records) if i % 10 < 8]
    val = [r for i, r in enumerate(records) if i % 10 == 8]
    test = [r for i, r in enumerate(records) if i % 10 == 9]
    return train, val, test


def _load_train_settings(args) -> tuple[TrainConfig, AugmentConfig]:
    if args.config:
        text = _require_file(args.config, "config").read_text(encoding="utf-8")
        config, aug = parse_train_config(text)
    else:
        config, aug = TrainConfig(), AugmentConfig()
    if getattr(args, "variant", None):
        config = TrainConfig(**{**config.__dict__, "variant": args.variant})
    return config, aug


def cmd_gen(args) -> int:
    records = build_corpus(args.n, args.seed)
    out = Path(args.out)
    save_corpus(records, out)
    _write_manifest(out.with_suffix(out.suffix + ".manifest.json"), "gen",
                    {"n": args.n, "seed": args.seed, "out": str(out)}, [out])
    print(f"wrote {len(records)} records to {out}")
    return 0


def cmd_train(args) -> int:
    corpus_path = _require_file(args.corpus, "corpus")
    records = load_corpus(corpus_path)
    config, aug = _load_train_settings(args)
    train, val, _ = _split_corpus(records)
    vocab = build_vocabulary(records)
    result = fit(config, train, val, model_config=ModelConfig(vocab_size=len(vocab)),
                 vocab=vocab, augment_config=aug)
    out = Path(args.out)
    save_checkpoint(result.params, vocab, out)
    history_path = out.with_suffix(out.suffix + ".history.tsv")
    history_path.write_text(history_to_table(result.history), encoding="utf-8")
    _write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"), "train",
        {"corpus": str(corpus_path), "corpus_sha256": _sha256(corpus_path),
         "config": render_train_config(config, aug), "variant": config.variant,
         "seed": config.seed, "out": str(out)},
        [out, history_path])
    last = result.history[-1]
    print(f"trained {config.variant} for {len(result.history)} epochs "
          f"({result.steps} steps); best val NLL "
          f"{min(h.val_nll for h in result.history):.4f}; "
          f"final train NLL {last.train_nll:.4f}")
    print(f"checkpoint: {out}")
    return 0


def cmd_eval(args) -> int:
    ckpt_path = _require_file(args.ckpt, "checkpoint")
    corpus_path = _require_file(args.corpus, "corpus")
    params, vocab = load_checkpoint(ckpt_path)
    records = load_corpus(corpus_path)
    _, _, test = _split_corpus(records)
    if not test:
        raise CliError(f"corpus {corpus_path} has no test split records")
    _, report = evaluate_model(params, vocab, test)
    report_dir = Path(args.report_dir)
    report_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "json": report_dir / "report.json",
        "txt": report_dir / "report.txt",
        "tsv": report_dir / "report.tsv",
    }
    paths["json"].write_text(report_to_json(report) + "\n", encoding="utf-8")
    paths["txt"].write_text(render_text(report), encoding="utf-8")
    paths["tsv"].write_text(render_delimited(report), encoding="utf-8")
    _write_manifest(report_dir / "manifest.json", "eval",
                    {"corpus": str(corpus_path), "corpus_sha256": _sha256(corpus_path),
                     "ckpt": str(ckpt_path), "ckpt_sha256": _sha256(ckpt_path),
                     "report_dir": str(report_dir)},
                    paths.values())
    sys.stdout.write(render_text(report))
    return 0


def cmd_ablate(args) -> int:
    corpus_path = _require_file(args.corpus, "corpus")
    records = load_corpus(corpus_path)
    config, aug = _load_train_settings(args)
    train, val, test = _split_corpus(records)
    if not test:
        raise CliError(f"corpus {corpus_path} has no test split records")
    vocab = build_vocabulary(records)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    cider_by_variant: dict = {}
    artifacts = []
    for variant in VARIANTS:
        variant_config = TrainConfig(**{**config.__dict__, "variant": variant})
        result = fit(variant_config, train, val,
                     model_config=ModelConfig(vocab_size=len(vocab)),
                     vocab=vocab, augment_config=aug)
        _, report = evaluate_model(result.params, vocab, test, variant=variant)
        cider_by_variant[variant] = report.overall["cider"]
        history_path = out_dir / f"{variant}.history.tsv"
        history_path.write_text(history_to_table(result.history), encoding="utf-8")
        artifacts.append(history_path)
        print(f"{variant}: CIDEr {report.overall['cider']:.4f} "
              f"({len(result.history)} epochs, {result.steps} steps)")

    table_path = out_dir / "ablation.tsv"
    lines = ["variant\tcider"]
    for variant in VARIANTS:
        lines.append(f"{variant}\t{cider_by_variant[variant]:.6f}")
    table_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    artifacts.append(table_path)

    ranked = sorted(cider_by_variant, key=cider_by_variant.get, reverse=True)
    agreement = sum(1 for a, b in zip(ranked, EXPECTED_VARIANT_RANKING) if a == b)
    print(f"observed ranking: {' > '.join(ranked)}")
    print(f"expected ranking: {' > '.join(EXPECTED_VARIANT_RANKING)} "
          f"(directional agreement {agreement}/{len(VARIANTS)}, reported, not gated)")

    _write_manifest(out_dir / "manifest.json", "ablate",
                    {"corpus": str(corpus_path), "corpus_sha256": _sha256(corpus_path),
                     "config": render_train_config(config, aug),
                     "out_dir": str(out_dir)},
                    artifacts)
    return 0


def cmd_report(args) -> int:
    path = _require_file(args.in_path, "report")
    report = report_from_json(path.read_text(encoding="utf-8"))
    if args.format == "text":
        sys.stdout.write(render_text(report))
    else:
        sys.stdout.write(render_delimited(report))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chartlab",
        description="Synthetic chart summarization lab: corpus, training, evaluation.")
    parser.add_argument("--version", action="version", version=f"chartlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="synthesize a chart-summary corpus")
    p.add_argument("--n", type=int, default=100, help="number of records")
    p.add_argument("--seed", type=int, default=0, help="corpus seed")
    p.add_argument("--out", required=True, help="output corpus file")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", help="fine-tune a model on a corpus")
    p.add_argument("--corpus", required=True, help="corpus file from gen")
    p.add_argument("--config", help="key = value training config file")
    p.add_argument("--out", required=True, help="output checkpoint file")
    p.add_argument("--variant", choices=VARIANTS, help="override config variant")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a checkpoint on the test split")
    p.add_argument("--corpus", required=True, help="corpus file from gen")
    p.add_argument("--ckpt", required=True, help="checkpoint from train")
    p.add_argument("--report-dir", required=True, help="directory for report files")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="run all four variants and tabulate CIDEr")
    p.add_argument("--corpus", required=True, help="corpus file from gen")
    p.add_argument("--config", help="key = value training config file")
    p.add_argument("--out-dir", required=True, help="directory for variant artifacts")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("report", help="render a stored report")
    p.add_argument("--in", dest="in_path", required=True, help="report.json from eval")
    p.add_argument("--format", choices=("text", "delimited"), default="text")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints usage itself
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
