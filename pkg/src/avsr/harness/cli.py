"""Command-line driver.

Every subcommand prints a tab-separated summary on stdout and writes its
artifacts (and figures, where there is something to plot) under --out-dir.
Exit status: 0 success, 2 configuration error, 3 data error, 1 anything else.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..errors import AVSRError, ConfigError, DataError, PipelineError
from . import plotting
from .config import RunConfig
from .params import count_decoder, count_table, rows_to_tsv
from .pipeline import (Workspace, run_pipeline, step_cluster, step_decode, step_evaluate, step_featurize,
                       step_finetune, step_pretrain, step_synth)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DATA = 0, 1, 2, 3

log = logging.getLogger("avsr")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI run configuration")
    common.add_argument("--seed", type=int, help="global seed (overrides [run] seed)")
    common.add_argument("--out-dir", type=Path, default=Path("avsr_out"), help="workspace directory")
    common.add_argument("--manifest", type=Path, help="corpus manifest (default: <out-dir>/corpus/manifest.tsv)")
    common.add_argument("--visual-backbone", choices=("resnet", "mobilenet"))
    common.add_argument("--encoder-backbone", choices=("transformer", "conformer"))
    common.add_argument("--fusion", choices=("glu", "concat"))
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one configuration value (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="avsr", description="Audio-visual masked-prediction toolkit.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("synth", parents=[common], help="generate the procedural corpus")
    sub.add_parser("featurize", parents=[common], help="dump stacked audio features")
    c = sub.add_parser("cluster", parents=[common], help="pseudo-labels for one phase")
    c.add_argument("--phase", type=int, default=1)
    c.add_argument("--checkpoint", type=Path, help="previous-phase checkpoint (phase >= 2)")
    t = sub.add_parser("pretrain", parents=[common], help="masked-prediction training for one phase")
    t.add_argument("--phase", type=int, default=1)
    f = sub.add_parser("finetune", parents=[common], help="seq2seq fine-tuning")
    f.add_argument("--checkpoint", type=Path, help="pre-trained checkpoint (default: latest phase)")
    for name, helptext in (("decode", "greedy decoding of the corpus"),
                           ("evaluate", "clean and noisy A/AV evaluation report")):
        d = sub.add_parser(name, parents=[common], help=helptext)
        d.add_argument("--checkpoint", type=Path, help="fine-tuned checkpoint")
    pc = sub.add_parser("param-count", parents=[common], help="exact counts of full-size configurations")
    pc.add_argument("--decoder-vocab", type=int, default=1000)
    sub.add_parser("pipeline", parents=[common], help="synth/cluster/pretrain every phase/finetune/decode/evaluate")
    return p


def resolve_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.set("run.seed", args.seed)
    if args.visual_backbone:
        cfg.set("visual.backbone", args.visual_backbone)
    if args.encoder_backbone:
        cfg.set("encoder.backbone", args.encoder_backbone)
    if args.fusion:
        cfg.set("fusion.mode", args.fusion)
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
        cfg.set(key.strip(), value.strip())
    return cfg


def _emit(rows: list[dict]) -> None:
    if not rows:
        return
    cols = list(rows[0])
    print("\t".join(cols))
    for r in rows:
        print("\t".join(_fmt(r[c]) for c in cols))


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _run(args) -> None:
    cfg = resolve_config(args)
    ws = Workspace(args.out_dir)
    ws.record_config(cfg)
    manifest = args.manifest or ws.manifest
    cmd = args.command
    if cmd == "synth":
        path = step_synth(cfg, ws)
        _emit([{"manifest": path, "utterances": cfg.corpus.num_utts}])
    elif cmd == "featurize":
        path = step_featurize(cfg, ws, manifest)
        print(Path(path).read_text(encoding="utf-8"), end="")
    elif cmd == "cluster":
        out = step_cluster(cfg, ws, manifest, args.phase, args.checkpoint)
        k = cfg.schedule().phases[args.phase - 1][0]
        _emit([{"phase": args.phase, "k": k, "labels": out}])
    elif cmd == "pretrain":
        _emit([step_pretrain(cfg, ws, manifest, args.phase)])
    elif cmd == "finetune":
        _emit([step_finetune(cfg, ws, manifest, args.checkpoint)])
    elif cmd == "decode":
        _emit([step_decode(cfg, ws, manifest, args.checkpoint)])
    elif cmd == "evaluate":
        report = step_evaluate(cfg, ws, manifest, args.checkpoint)
        print(report.to_tsv(), end="")
    elif cmd == "param-count":
        rows = count_table()
        out = ws.root / "params"
        out.mkdir(parents=True, exist_ok=True)
        text = rows_to_tsv(rows)
        (out / "param_counts.tsv").write_text(text, encoding="utf-8")
        plotting.plot_param_counts(rows, out / "param_counts.png")
        print(text, end="")
        print(f"# decoder (6 layers, vocab {args.decoder_vocab}): {count_decoder(args.decoder_vocab)}")
    elif cmd == "pipeline":
        report = run_pipeline(cfg, ws, args.manifest)
        print(report.to_tsv(), end="")


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        _run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, PipelineError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except AVSRError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
