"""Command-line surface: every pipeline stage as a subcommand.

Tensors travel as ``.volt`` files, poses/skeletons/transforms as JSON, and
images optionally as 8-bit PNG (by file extension). All subcommands are
deterministic for fixed inputs, flags, and seed, at any ``--threads``
value; only ``--report`` output embeds wall-clock timings.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .mannequin import MannequinSpec, make_mannequin
from .metrics import pck_auc, ssim, ssim_fg
from .pipeline import MODES, fit_part_transforms, pipeline_repose
from .png_io import read_png, write_png
from .sampler import load_manifest, sample_eval_pairs, _entry_json
from .skeleton import default_skeleton, load_pose, load_skeleton
from .tensor import Image, Volume, lift, project
from .transform import load_transforms, save_transforms
from .volt import read_volt, write_volt
from .voxelize import (
    HeatmapParams,
    PartMask,
    background_mask,
    gaussian_heatmaps,
    heatmaps_2d_mode,
    part_masks,
)
from .warp import composite, inpaint_background, masked_warp_2d, masked_warp_3d

__all__ = ["cli_main", "main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_dims(text: str):
    parts = text.lower().split("x")
    if len(parts) != 3 or not all(p.isdigit() for p in parts):
        raise _UsageError(f"--dims must look like HxWxD, got {text!r}")
    return tuple(int(p) for p in parts)


def _load_pose_file(path):
    return load_pose(Path(path).read_bytes())


def _load_skeleton_arg(path):
    if path is None:
        return default_skeleton()
    return load_skeleton(Path(path).read_bytes())


def _load_image_any(path) -> Image:
    if str(path).lower().endswith(".png"):
        return read_png(path)
    tensor = read_volt(path)
    if not isinstance(tensor, Image):
        raise ValueError(f"{path}: expected an image tensor")
    return tensor


def _write_image_any(path, image: Image):
    if str(path).lower().endswith(".png"):
        write_png(path, image)
    else:
        write_volt(path, image)


def _load_volume(path) -> Volume:
    tensor = read_volt(path)
    if not isinstance(tensor, Volume):
        raise ValueError(f"{path}: expected a volume tensor")
    return tensor


def _read_mask_dir(path):
    """Masks written by the mask subcommand, in filename (= part) order."""
    files = sorted(Path(path).glob("*.volt"))
    if not files:
        raise ValueError(f"{path}: no .volt masks found")
    masks, names = [], []
    for f in files:
        m = read_volt(f)
        if not isinstance(m, PartMask):
            raise ValueError(f"{f}: expected a mask tensor")
        masks.append(m)
        pieces = f.stem.split("_", 2)
        names.append(pieces[2] if len(pieces) == 3 else f.stem)
    return masks, names


def _json_17g(value) -> str:
    """Deterministic JSON text with floats at 17 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, str):
        import json

        return json.dumps(value)
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ",".join(_json_17g(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ",".join(f"{_json_17g(str(k))}:{_json_17g(v)}" for k, v in value.items()) + "}"
    if value is None:
        return "null"
    raise TypeError(f"cannot serialize {type(value)!r}")


def _emit_json(args, payload: dict):
    text = _json_17g(payload)
    print(text)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n", encoding="utf-8")


def _write_report(args, report: dict):
    if getattr(args, "report", None):
        Path(args.report).write_text(_json_17g(report) + "\n", encoding="utf-8")


def _heatmap_params(args) -> HeatmapParams:
    return HeatmapParams(sigma=args.sigma, truncation=args.truncation)


# --- subcommand implementations ---------------------------------------------


def _cmd_mask(args):
    pose = _load_pose_file(args.inp)
    cfg = _load_skeleton_arg(args.skeleton)
    masks = part_masks(pose, cfg, _parse_dims(args.dims), args.radius_scale)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, mask in enumerate(masks):
        write_volt(out / f"mask_{i:02d}_{mask.name}.volt", mask)
    return 0


def _cmd_heatmap(args):
    pose = _load_pose_file(args.inp)
    dims = _parse_dims(args.dims)
    params = _heatmap_params(args)
    if args.mode in ("3d", "2d-warp"):
        hm = gaussian_heatmaps(pose, dims, params)
    else:
        hm = heatmaps_2d_mode(pose, dims, params)
    write_volt(args.out, hm)
    return 0


def _cmd_fit(args):
    pose_in = _load_pose_file(args.inp)
    pose_tgt = _load_pose_file(args.target)
    cfg = _load_skeleton_arg(args.skeleton)
    fits = fit_part_transforms(pose_in, pose_tgt, cfg, args.mode)
    Path(args.out).write_bytes(save_transforms(fits))
    return 0


def _cmd_warp(args):
    volume = _load_volume(args.inp)
    masks, names = _read_mask_dir(args.masks)
    table = load_transforms(Path(args.transforms).read_bytes())
    try:
        ordered = [table[name] for name in names]
    except KeyError as missing:
        raise ValueError(f"transform file has no entry for part {missing}") from None
    if args.mode in ("3d", "2d-pose"):
        warped = masked_warp_3d(volume, masks, ordered, threads=args.threads)
    else:
        warped = masked_warp_2d(volume, masks, ordered, threads=args.threads)
    write_volt(args.out, warped)
    return 0


def _cmd_composite(args):
    fg = _load_image_any(args.fg)
    bg = _load_image_any(args.bg)
    mask = _load_image_any(args.mask)
    _write_image_any(args.out, composite(fg, mask, bg))
    return 0


def _cmd_bgmask(args):
    masks, _ = _read_mask_dir(args.masks)
    write_volt(args.out, background_mask(masks, dilate=args.dilate))
    return 0


def _cmd_inpaint(args):
    img = _load_image_any(args.inp)
    mask = _load_image_any(args.mask)
    _write_image_any(args.out, inpaint_background(img, mask))
    return 0


def _cmd_lift(args):
    img = _load_image_any(args.inp)
    write_volt(args.out, lift(img, args.depth, args.channels))
    return 0


def _cmd_project(args):
    write_volt(args.out, project(_load_volume(args.inp)))
    return 0


def _cmd_ssim(args):
    if len(args.inp) != 2:
        raise _UsageError("ssim needs exactly two --in images")
    a = _load_image_any(args.inp[0])
    b = _load_image_any(args.inp[1])
    payload = {"ssim": ssim(a, b)}
    if args.fg_mask:
        mask = _load_image_any(args.fg_mask)
        payload["ssim_fg"] = ssim_fg(a, b, mask)
    _emit_json(args, payload)
    return 0


def _cmd_pose_auc(args):
    if len(args.inp) != 2:
        raise _UsageError("pose-auc needs exactly two --in pose files")
    predicted = _load_pose_file(args.inp[0])
    reference = _load_pose_file(args.inp[1])
    curve, auc = pck_auc(predicted, reference)
    _emit_json(args, {"pck_auc": auc, "pck_curve": list(curve.pck)})
    return 0


def _cmd_mannequin(args):
    pose = _load_pose_file(args.inp)
    cfg = _load_skeleton_arg(args.skeleton)
    spec = MannequinSpec(
        dims=_parse_dims(args.dims),
        channels=args.channels,
        pose=pose,
        skeleton=cfg,
        falloff=args.falloff,
    )
    volume, masks = make_mannequin(spec)
    write_volt(args.out, volume)
    if args.masks_out:
        out = Path(args.masks_out)
        out.mkdir(parents=True, exist_ok=True)
        for i, mask in enumerate(masks):
            write_volt(out / f"mask_{i:02d}_{mask.name}.volt", mask)
    return 0


def _cmd_eval_pairs(args):
    manifest = load_manifest(Path(args.inp).read_bytes())
    pairs = sample_eval_pairs(manifest, n=args.n, seed=args.seed)
    seed = manifest.seed if args.seed is None else args.seed
    payload = {
        "seed": seed,
        "n": args.n,
        "pairs": [
            {"source": _entry_json(s), "target": _entry_json(t)} for s, t in pairs
        ],
    }
    Path(args.out).write_text(_json_17g(payload) + "\n", encoding="utf-8")
    return 0


def _cmd_pipeline(args):
    pose_in = _load_pose_file(args.pose_in)
    pose_tgt = _load_pose_file(args.pose_tgt)
    cfg = _load_skeleton_arg(args.skeleton)
    if args.inp:
        volume = _load_volume(args.inp)
    else:
        if args.channels is None:
            raise _UsageError("pipeline needs --in or --channels (mannequin mode)")
        spec = MannequinSpec(
            dims=_parse_dims(args.dims),
            channels=args.channels,
            pose=pose_in,
            skeleton=cfg,
        )
        volume, _ = make_mannequin(spec)
    warped, heatmaps, report = pipeline_repose(
        volume,
        pose_in,
        pose_tgt,
        cfg,
        args.mode,
        heatmap=_heatmap_params(args),
        radius_scale=args.radius_scale,
        threads=args.threads,
    )
    write_volt(args.out, warped)
    if args.heatmap_out:
        write_volt(args.heatmap_out, heatmaps)
    _write_report(args, report)
    return 0


# --- parser wiring -----------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="volwarp", description=__doc__)
    parser.add_argument("--version", action="version", version=f"volwarp {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("mask", _cmd_mask, "rasterize the ten part masks for a pose")
    p.add_argument("--in", dest="inp", required=True, help="pose JSON")
    p.add_argument("--dims", required=True, help="grid size HxWxD")
    p.add_argument("--skeleton", help="skeleton config JSON")
    p.add_argument("--radius-scale", type=float, default=1.0)
    p.add_argument("--out", required=True, help="output directory for .volt masks")

    p = add("heatmap", _cmd_heatmap, "render per-joint Gaussian heatmaps")
    p.add_argument("--in", dest="inp", required=True, help="pose JSON")
    p.add_argument("--dims", required=True)
    p.add_argument("--sigma", type=float, default=2.0)
    p.add_argument("--truncation", type=float, default=3.0)
    p.add_argument("--mode", choices=MODES, default="3d")
    p.add_argument("--out", required=True)

    p = add("fit", _cmd_fit, "fit per-part transforms between two poses")
    p.add_argument("--in", dest="inp", required=True, help="input pose JSON")
    p.add_argument("--target", required=True, help="target pose JSON")
    p.add_argument("--skeleton")
    p.add_argument("--mode", choices=MODES, default="3d")
    p.add_argument("--out", required=True, help="transforms JSON")

    p = add("warp", _cmd_warp, "warp a volume with precomputed masks + transforms")
    p.add_argument("--in", dest="inp", required=True, help="volume .volt")
    p.add_argument("--masks", required=True, help="mask directory")
    p.add_argument("--transforms", required=True, help="transforms JSON")
    p.add_argument("--mode", choices=MODES, default="3d")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)

    p = add("composite", _cmd_composite, "alpha-blend foreground over background")
    p.add_argument("--fg", required=True)
    p.add_argument("--mask", required=True, help="1-channel weight image")
    p.add_argument("--bg", required=True)
    p.add_argument("--out", required=True)

    p = add("bgmask", _cmd_bgmask, "background mask from projected part masks")
    p.add_argument("--masks", required=True, help="mask directory")
    p.add_argument("--dilate", type=int, default=2)
    p.add_argument("--out", required=True)

    p = add("inpaint", _cmd_inpaint, "fill foreground pixels from the background")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--mask", required=True, help="background mask (1 = known)")
    p.add_argument("--out", required=True)

    p = add("lift", _cmd_lift, "reshape a (H,W,D*C) image into a volume")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--channels", type=int, required=True)
    p.add_argument("--out", required=True)

    p = add("project", _cmd_project, "flatten a volume into a (H,W,D*C) image")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)

    p = add("ssim", _cmd_ssim, "structural similarity between two images")
    p.add_argument("--in", dest="inp", action="append", default=[], help="give twice")
    p.add_argument("--fg-mask", help="restrict a second score to this foreground")
    p.add_argument("--out", help="also write the JSON report here")

    p = add("pose-auc", _cmd_pose_auc, "PCK curve and AUC between two mm poses")
    p.add_argument("--in", dest="inp", action="append", default=[], help="give twice")
    p.add_argument("--out")

    p = add("mannequin", _cmd_mannequin, "build a synthetic part-coded volume")
    p.add_argument("--in", dest="inp", required=True, help="pose JSON")
    p.add_argument("--dims", required=True)
    p.add_argument("--channels", type=int, required=True)
    p.add_argument("--skeleton")
    p.add_argument("--falloff", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--masks-out", help="also write the part masks here")

    p = add("eval-pairs", _cmd_eval_pairs, "sample seeded evaluation pairs")
    p.add_argument("--in", dest="inp", required=True, help="manifest JSON")
    p.add_argument("--seed", type=int, default=None, help="overrides manifest seed")
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--out", required=True)

    p = add("pipeline", _cmd_pipeline, "full repose: masks, fit, warp, heatmaps")
    p.add_argument("--in", dest="inp", help="volume .volt (else mannequin mode)")
    p.add_argument("--pose-in", required=True, dest="pose_in")
    p.add_argument("--pose-tgt", required=True, dest="pose_tgt")
    p.add_argument("--skeleton")
    p.add_argument("--mode", choices=MODES, default="3d")
    p.add_argument("--dims", default="64x64x16", help="mannequin grid (no --in)")
    p.add_argument("--channels", type=int, help="mannequin channels (no --in)")
    p.add_argument("--sigma", type=float, default=2.0)
    p.add_argument("--truncation", type=float, default=3.0)
    p.add_argument("--radius-scale", type=float, default=1.0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True, help="warped volume .volt")
    p.add_argument("--heatmap-out", help="heatmap volume .volt")
    p.add_argument("--report", help="JSON report (includes timings)")

    return parser


def cli_main(argv=None) -> int:
    """Run one subcommand; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            raise _UsageError("missing subcommand")
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse --help/--version
        return 0 if not exc.code else 1
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))
