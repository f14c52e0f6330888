"""Command-line entry point: ``degradekit <subcommand> ...``.

Exit codes: 0 success, 2 I/O, 3 config, 4 replay mismatch, 5 malformed data,
6 external tool failure.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import replace
from pathlib import Path

from .. import imagecore as ic
from ..degrade import ENGINE_VERSION, Manifest, degrade_batch, replay
from ..ensemble import VoteConfig, VoteMode, vote_table
from ..errors import (ConfigError, DegradeKitError, DetectorError, ExternalCommandFailed,
                      InvalidSeverity, MalformedData, MalformedFile, UnsupportedFormat)
from ..facegeom import (FACE_EXPANSION, STREAM_SIZE, CommandDetector, DetectionRecord,
                        FileDetector, HookConfig, Status, center_crop, crop_resize,
                        expand_bbox, recover_batch, recovery_report, recovery_steps)
from ..formats import (fmt6, read_activation_map, read_detections, read_embedding,
                       read_label_table, read_score_table, read_sweep_or_scores, severity_tag,
                       split_severity, write_detections, write_sweep)
from ..metrics import (attribution_entropy, cosine_similarity, pearson_matrix, roc_auc,
                       sweep_aggregate)
from .charts import ChartSpec, render_svg
from .config import DEFAULT_SEVERITIES, ExperimentConfig, as_argv, check_severity_value

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_MISMATCH, EXIT_DATA, EXIT_EXTERNAL = 0, 2, 3, 4, 5, 6

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# --------------------------------------------------------------------------
# helpers


def _info(args, message):
    if not args.quiet:
        print(message, file=sys.stderr)


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.jobs is not None:
        cfg.jobs = args.jobs
    return cfg


def _list_images(directory) -> list[tuple[str, Path]]:
    directory = Path(directory)
    if not directory.is_dir():
        raise CliError(EXIT_IO, f"input directory not found: {directory}")
    found = {}
    for path in sorted(directory.iterdir()):
        if path.suffix.lower() in IMAGE_SUFFIXES and path.is_file():
            if path.stem in found:
                raise CliError(EXIT_DATA, f"two inputs share the image id {path.stem!r}")
            found[path.stem] = path
    return sorted(found.items())


def _read(path):
    try:
        return ic.read_image(path)
    except FileNotFoundError:
        raise CliError(EXIT_IO, f"input file not found: {path}") from None
    except (MalformedFile, UnsupportedFormat) as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from None


def _write_text(path, text):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _named_paths(items, flag):
    out = {}
    for item in items:
        name, sep, path = item.partition("=")
        if not sep:
            name, path = Path(item).stem, item
        if name in out:
            raise CliError(EXIT_DATA, f"{flag}: duplicate name {name!r}")
        out[name] = path
    return out


def _parse_severities(text) -> tuple:
    return tuple(check_severity_value(s) for s in text.split(",") if s.strip())


# --------------------------------------------------------------------------
# subcommands


def cmd_degrade(args) -> int:
    cfg = _load_config(args)
    severities = _parse_severities(args.severity) if args.severity else cfg.severities
    if not severities:
        raise ConfigError("invalid value for severity: empty list")
    inputs = [(image_id, _read(path)) for image_id, path in _list_images(args.input)]
    out_dir = Path(args.output)
    written = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        manifest, records = None, []
        for severity in severities:
            outputs, manifest = degrade_batch(inputs, cfg.degradation, severity, cfg.seed, cfg.jobs)
            for (image_id, _), img, record in zip(inputs, outputs, manifest.images):
                name = f"{image_id}__s{severity_tag(severity)}.png"
                target = out_dir / name
                written.append(target)
                ic.write_png(target, img)
                records.append(replace(record, output=name))
        manifest = replace(manifest, images=records)
        target = out_dir / "manifest.json"
        written.append(target)
        _write_text(target, manifest.to_json())
    except BaseException:
        for path in written:
            try:
                path.unlink()
            except OSError:
                pass
        raise
    _info(args, f"wrote {len(inputs) * len(severities)} images and {out_dir / 'manifest.json'}")
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        manifest = Manifest.load(args.manifest)
    except FileNotFoundError:
        raise CliError(EXIT_IO, f"manifest not found: {args.manifest}") from None
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_DATA, f"malformed manifest: {exc}") from None
    if manifest.engine_version != ENGINE_VERSION:
        print(f"warning: manifest engine {manifest.engine_version!r} differs from "
              f"{ENGINE_VERSION!r}; replaying anyway", file=sys.stderr)
    available = dict(_list_images(args.input))
    out_dir = Path(args.output) if args.output else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    cache = {}
    mismatched = []
    for record in manifest.images:
        if record.image_id not in available:
            raise CliError(EXIT_IO, f"input for {record.image_id!r} not found in {args.input}")
        if record.image_id not in cache:
            cache[record.image_id] = _read(available[record.image_id])
        out = replay(cache[record.image_id], record, ENGINE_VERSION)
        if ic.raster_sha256(out) != record.output_sha256:
            mismatched.append(f"{record.image_id}@{severity_tag(record.plan.severity)}")
        if out_dir:
            name = record.output or f"{record.image_id}__s{severity_tag(record.plan.severity)}.png"
            ic.write_png(out_dir / name, out)
    if mismatched:
        print("replay mismatch: " + ", ".join(mismatched), file=sys.stderr)
        return EXIT_MISMATCH
    _info(args, f"replayed {len(manifest.images)} records, all hashes match")
    return EXIT_OK


def cmd_crop(args) -> int:
    if args.mode == "face" and not args.bbox:
        raise CliError(EXIT_CONFIG, "invalid value for bbox: face mode requires --bbox")
    detections = read_detections(args.bbox) if args.mode == "face" else {}
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    skipped = []
    count = 0
    for image_id, path in _list_images(args.input):
        img = _read(path)
        if args.mode == "global":
            crop = center_crop(img, args.size)
        else:
            candidates = detections.get(image_id, [])
            if not candidates:
                skipped.append(image_id)
                continue
            box, _ = max(candidates, key=lambda c: c[1])
            h, w = img.shape[:2]
            crop = crop_resize(img, expand_bbox(box, args.factor, w, h), args.size)
        ic.write_png(out_dir / f"{image_id}.png", crop)
        count += 1
    if skipped:
        print("skipped (no detection): " + ", ".join(skipped), file=sys.stderr)
    _info(args, f"wrote {count} crops to {out_dir}")
    return EXIT_OK


def cmd_recover(args) -> int:
    cfg = _load_config(args)
    detector_cmd = as_argv(args.detector_cmd) or cfg.detector_command
    if args.detector_file:
        detector = FileDetector.from_csv(args.detector_file)
    elif detector_cmd:
        detector = CommandDetector(detector_cmd)
    else:
        raise CliError(EXIT_CONFIG, "invalid value for detector: give --detector-file or --detector-cmd")
    hooks = HookConfig(enhancer=tuple(as_argv(args.enhancer_cmd) or cfg.enhancer_command or ()) or None)
    base = cfg.base_threshold if args.base_threshold is None else args.base_threshold
    steps = [] if args.no_chain else recovery_steps(base)
    images = [(image_id, _read(path)) for image_id, path in _list_images(args.input)]
    outcomes = recover_batch(images, detector, steps, base, hooks, cfg.jobs)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = [o.detection or DetectionRecord(o.image_id) for o in outcomes]
    write_detections(out_dir / "detections.csv", records)
    report = recovery_report(outcomes)
    report["outcomes"] = [
        {"image_id": o.image_id, "status": o.status.value, "recovered_step": o.recovered_step,
         "steps_attempted": o.steps_attempted, "skipped_steps": list(o.skipped_steps)}
        for o in sorted(outcomes, key=lambda o: o.image_id)
    ]
    _write_text(out_dir / "recovery_report.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    failed = [o.image_id for o in outcomes if o.status is Status.FAILED]
    if failed:
        _info(args, "local stream bypassed for: " + ", ".join(sorted(failed)))
    _info(args, f"failure_rate {fmt6(report['failure_rate'])}")
    return EXIT_OK


def cmd_ensemble(args) -> int:
    cfg = _load_config(args)
    weights = VoteConfig.parse_weights(args.weights) if args.weights else cfg.weights
    mode = args.mode or cfg.mode
    try:
        vote_cfg = VoteConfig(weights, VoteMode(mode), args.bin)
    except ValueError as exc:
        raise CliError(EXIT_CONFIG, f"invalid value for weights/mode/bin: {exc}") from None
    local = read_score_table(args.local) if args.local else {}
    result = vote_table(local, read_score_table(args.global_), read_score_table(args.fusion), vote_cfg)
    buf = io.StringIO()
    buf.write("image_id,score\n")
    for image_id in sorted(result):
        buf.write(f"{image_id},{fmt6(result[image_id])}\n")
    _write_text(args.output, buf.getvalue())
    return EXIT_OK


def cmd_eval(args) -> int:
    scores = read_score_table(args.scores)
    labels = read_label_table(args.labels)
    if not args.by_severity:
        auc = roc_auc(scores, labels)
        print(fmt6(auc))
        if args.output:
            _write_text(args.output, f"metric,value\nroc_auc,{fmt6(auc)}\n")
        return EXIT_OK
    groups = {}
    for key, value in scores.items():
        base, severity = split_severity(key)
        if severity is None:
            raise MalformedData(f"score id {key!r} has no __s<severity> suffix")
        if base not in labels:
            raise MalformedData(f"no label for {base!r} (from {key!r})")
        groups.setdefault(severity, ({}, {}))
        groups[severity][0][key] = value
        groups[severity][1][key] = labels[base]
    buf = io.StringIO()
    buf.write("severity,count,roc_auc\n")
    for severity in sorted(groups):
        s, y = groups[severity]
        buf.write(f"{severity_tag(severity)},{len(s)},{fmt6(roc_auc(s, y))}\n")
    _write_text(args.output, buf.getvalue())
    return EXIT_OK


def _files(directory, suffixes):
    directory = Path(directory)
    if not directory.is_dir():
        raise CliError(EXIT_IO, f"directory not found: {directory}")
    return sorted(p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in suffixes)


def cmd_xai_entropy(args) -> int:
    rows = []
    for path in _files(args.maps, (".amap", ".csv")):
        base, severity = split_severity(path.stem)
        try:
            value = attribution_entropy(read_activation_map(path), normalize=args.normalize)
        except DegradeKitError as exc:
            raise MalformedData(f"{path.name}: {exc}") from None
        rows.append((0.0 if severity is None else severity, base, value))
    if not rows:
        raise MalformedData(f"no activation maps found in {args.maps}")
    _write_rows(args.output, rows)
    return EXIT_OK


def cmd_xai_cosine(args) -> int:
    vectors = {}
    for path in _files(args.embeddings, (".evec",)):
        base, severity = split_severity(path.stem)
        if severity is None:
            raise MalformedData(f"{path.name}: embedding name lacks the __s<severity> suffix")
        vectors[(base, severity)] = path
    if not vectors:
        raise MalformedData(f"no embeddings found in {args.embeddings}")
    rows = []
    for (base, severity), path in sorted(vectors.items()):
        ref = vectors.get((base, 0.0))
        if ref is None:
            raise MalformedData(f"no severity-0.00 reference embedding for {base!r}")
        try:
            value = cosine_similarity(read_embedding(ref), read_embedding(path))
        except DegradeKitError as exc:
            raise MalformedData(f"{path.name}: {exc}") from None
        rows.append((severity, base, value))
    _write_rows(args.output, rows)
    return EXIT_OK


def _write_rows(output, rows):
    if output is None or output == "-":
        buf = io.StringIO()
        buf.write("severity,image_id,value\n")
        for sev, image_id, value in sorted(rows, key=lambda r: (r[0], r[1])):
            buf.write(f"{severity_tag(sev)},{image_id},{fmt6(value)}\n")
        sys.stdout.write(buf.getvalue())
    else:
        write_sweep(output, rows)


def cmd_correlate(args) -> int:
    paths = _named_paths(args.table, "--table")
    if len(paths) < 2:
        raise CliError(EXIT_CONFIG, "invalid value for table: give at least two --table NAME=PATH")
    names, r = pearson_matrix({name: read_score_table(p) for name, p in paths.items()})
    buf = io.StringIO()
    buf.write("stream," + ",".join(names) + "\n")
    for name, row in zip(names, r):
        buf.write(name + "," + ",".join(fmt6(v) for v in row) + "\n")
    _write_text(args.output, buf.getvalue())
    return EXIT_OK


def cmd_curve(args) -> int:
    paths = _named_paths(args.sweep, "--sweep")
    series = {}
    buf = io.StringIO()
    buf.write("series,severity,aggregate,count\n")
    for name, path in paths.items():
        agg = sweep_aggregate(read_sweep_or_scores(path), args.stat)
        series[name] = [(sev, value) for sev, value, _ in agg]
        for sev, value, count in agg:
            buf.write(f"{name},{severity_tag(sev)},{fmt6(value)},{count}\n")
    spec = ChartSpec(title=args.title or "", x_label=args.xlabel,
                     y_label=args.ylabel or f"{args.stat} value", series=series)
    svg = render_svg(spec)
    prefix = Path(args.output)
    if prefix.parent and not prefix.parent.exists():
        prefix.parent.mkdir(parents=True, exist_ok=True)
    _write_text(f"{prefix}.csv", buf.getvalue())
    _write_text(f"{prefix}.svg", svg)
    _info(args, f"wrote {prefix}.csv and {prefix}.svg")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


GLOBAL_DEFAULTS = {"config": None, "seed": None, "jobs": None, "quiet": False}


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset by the
    # subparser's own default
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="experiment config JSON (degradation ops, severities, seed, commands)")
    common.add_argument("--seed", type=int, help="global seed (default: config or 0)")
    common.add_argument("--jobs", type=int, help="parallel workers; results do not depend on it")
    common.add_argument("--quiet", action="store_true", help="suppress progress messages on stderr")

    parser = argparse.ArgumentParser(prog="degradekit", description=__doc__.splitlines()[0],
                                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("degrade", parents=[common], help="apply sampled degradation plans to a directory")
    p.add_argument("--input", required=True, help="directory of PNG/JPEG inputs; the file stem is the image id")
    p.add_argument("--output", required=True, help="output directory for <id>__s<severity>.png and manifest.json")
    p.add_argument("--severity", default=None,
                   help="comma-separated severities, multiples of 0.1 in [0, 1] "
                        f"(default: config or {','.join(str(s) for s in DEFAULT_SEVERITIES)})")
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("replay", parents=[common], help="regenerate outputs from a manifest and verify hashes")
    p.add_argument("--manifest", required=True, help="manifest.json written by degrade")
    p.add_argument("--input", required=True, help="directory holding the original inputs")
    p.add_argument("--output", default=None, help="optional directory for the regenerated images")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("crop", parents=[common], help="252x252 face or global crops")
    p.add_argument("--mode", choices=("face", "global"), required=True, help="face: expanded bbox crop; global: center crop")
    p.add_argument("--bbox", default=None, help="detections CSV (image_id,x,y,w,h,confidence); face mode only")
    p.add_argument("--input", required=True, help="input image directory")
    p.add_argument("--output", required=True, help="output directory for <id>.png crops")
    p.add_argument("--size", type=int, default=STREAM_SIZE, help="output side, multiple of 14 (default 252)")
    p.add_argument("--factor", type=float, default=FACE_EXPANSION, help="face box expansion (default 1.3)")
    p.set_defaults(func=cmd_crop)

    p = sub.add_parser("recover", parents=[common], help="face detection with the 7-step recovery chain")
    p.add_argument("--input", required=True, help="input image directory")
    p.add_argument("--output", required=True, help="directory for detections.csv and recovery_report.json")
    p.add_argument("--detector-file", default=None, help="file-backed detector: detections CSV")
    p.add_argument("--detector-cmd", default=None, help="detector command template using {input} and {image_id}")
    p.add_argument("--enhancer-cmd", default=None, help="enhancer command template using {input} and {output}")
    p.add_argument("--base-threshold", type=float, default=None, help="acceptance for raw detection and steps 1-6 (default 0.5)")
    p.add_argument("--no-chain", action="store_true", help="disable the recovery chain (raw detection only)")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("ensemble", parents=[common], help="weighted discretized vote over three score tables")
    p.add_argument("--local", default=None, help="local-stream scores CSV (ids missing here bypass the local stream)")
    p.add_argument("--global", dest="global_", required=True, help="global-stream scores CSV")
    p.add_argument("--fusion", required=True, help="fusion-stream scores CSV")
    p.add_argument("--weights", default=None, help="Local:Global:Fusion weights (default 1:2:2)")
    p.add_argument("--mode", choices=("discretized", "continuous"), default=None, help="default discretized")
    p.add_argument("--bin", type=float, default=0.1, help="quantization step (default 0.1)")
    p.add_argument("--output", default=None, help="output CSV (default stdout)")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("eval", parents=[common], help="ROC-AUC of a score table against labels")
    p.add_argument("--scores", required=True, help="scores CSV (image_id,score)")
    p.add_argument("--labels", required=True, help="labels CSV (image_id,label)")
    p.add_argument("--by-severity", action="store_true",
                   help="group <id>__s<severity> score ids by severity; labels keyed by <id>")
    p.add_argument("--output", default=None, help="optional CSV output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("xai-entropy", parents=[common], help="spatial attribution entropy per activation map")
    p.add_argument("--maps", required=True, help="directory of .amap or .csv grids named <id>[__s<severity>]")
    p.add_argument("--normalize", action="store_true", help="min-max normalize signed maps first")
    p.add_argument("--output", default=None, help="sweep CSV output (default stdout)")
    p.set_defaults(func=cmd_xai_entropy)

    p = sub.add_parser("xai-cosine", parents=[common], help="cosine similarity to the severity-0.00 embedding")
    p.add_argument("--embeddings", required=True, help="directory of .evec files named <id>__s<severity>")
    p.add_argument("--output", default=None, help="sweep CSV output (default stdout)")
    p.set_defaults(func=cmd_xai_cosine)

    p = sub.add_parser("correlate", parents=[common], help="pairwise Pearson correlation of score tables")
    p.add_argument("--table", action="append", required=True, help="NAME=PATH (repeat)")
    p.add_argument("--output", default=None, help="output CSV (default stdout)")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("curve", parents=[common], help="aggregate sweeps into CSV and an SVG line chart")
    p.add_argument("--sweep", action="append", required=True, help="NAME=PATH (repeat); a severity,image_id,value sweep CSV or an "
                        "image_id,score table with <id>__s<severity> ids")
    p.add_argument("--stat", choices=("mean", "median"), default="mean", help="aggregate (default mean)")
    p.add_argument("--output", required=True, help="output prefix; writes <prefix>.csv and <prefix>.svg")
    p.add_argument("--title", default=None, help="chart title")
    p.add_argument("--xlabel", default="severity", help="x axis label")
    p.add_argument("--ylabel", default=None, help="y axis label")
    p.set_defaults(func=cmd_curve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in GLOBAL_DEFAULTS.items():
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.jobs is not None and args.jobs < 1:
        print("error: invalid value for jobs: must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except CliError as exc:
        code, message = exc.code, str(exc)
    except (ConfigError, InvalidSeverity) as exc:
        code, message = EXIT_CONFIG, str(exc)
    except (DetectorError, ExternalCommandFailed) as exc:
        code, message = EXIT_EXTERNAL, str(exc)
    except (MalformedFile, UnsupportedFormat) as exc:
        code, message = EXIT_IO, str(exc)
    except DegradeKitError as exc:
        code, message = EXIT_DATA, str(exc)
    except OSError as exc:
        code, message = EXIT_IO, str(exc)
    print(f"error: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
