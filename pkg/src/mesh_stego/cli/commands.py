"""
Subcommand implementations. Each takes the parsed arguments plus settings and
returns a report model; human-readable progress goes to stdout unless --json.
"""
import argparse
import csv
import logging
import math
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import directed_hausdorff

from mesh_stego.cli.reports import (
    BenchReport,
    BenchRow,
    CapacityChannel,
    CapacityReport,
    ChannelSummary,
    CostmapReport,
    EmbedReport,
    ExtractReport,
    StatsReport,
)
from mesh_stego.core.config import Settings
from mesh_stego.core.errors import ConfigError, ParamsMismatchError
from mesh_stego.distortion.export import costmap_text
from mesh_stego.distortion.fpd import SUB_FEATURE_NAMES, FeatureCache, ifpd_raw_tables, ofpd_rows
from mesh_stego.distortion.profiles import compute_cost_table
from mesh_stego.embedding.changeset import PRESETS, normalize_steps, pad_changeset, parse_steps, preset_steps
from mesh_stego.embedding.params import StegoParams
from mesh_stego.embedding.pipeline import (
    bits_to_bytes,
    bytes_to_bits,
    embed,
    entropy_target,
    extract,
    max_alpha,
    plan_channel,
)
from mesh_stego.features.tensors import PATTERNS
from mesh_stego.mesh.io import format_from_path, read_mesh, save_mesh
from mesh_stego.mesh.mesh import Mesh
from mesh_stego.optimizer.gibbs import max_entropy, split_payload
from mesh_stego.quant.domain import CHANNELS, detect_k_star, integer_map

logger = logging.getLogger(__name__)

# payload used when an empty message is embedded without --alpha
EMPTY_MESSAGE_ALPHA = 1.5


def _pick(value, default):
    return default if value is None else value


def _threads(args: argparse.Namespace, settings: Settings) -> int:
    return args.threads or settings.worker_count()


def _say(args: argparse.Namespace, text: str):
    if not args.json:
        print(text)


def _steps(args: argparse.Namespace, alpha: Optional[float], default: Optional[str] = None) -> np.ndarray:
    if args.changes:
        steps = parse_steps(args.changes)
    elif alpha is not None:
        steps = preset_steps(alpha)
    elif default is not None:
        steps = PRESETS[default]
    else:
        raise ConfigError(f"{args.command} needs --alpha or --changes")
    return normalize_steps(steps)


def _sibling(source: str, suffix: str) -> Path:
    path = Path(source)
    return path.with_name(path.stem + suffix)


def _read_message(args: argparse.Namespace) -> bytes:
    if args.text is not None:
        return args.text.encode("utf-8")
    if args.message == "-":
        return sys.stdin.buffer.read()
    return Path(args.message).read_bytes()


def _alpha_split(text: Optional[str]) -> Optional[Sequence[float]]:
    if not text:
        return None
    return [float(t) for t in text.split(",")]


def _load(path: str, k_star: int) -> Mesh:
    mesh = read_mesh(path)
    digits = detect_k_star(mesh)
    if digits > k_star:
        logger.warning(f"{path} has {digits} fractional digits; coordinates are rounded to k*={k_star}")
    return mesh


def cmd_embed(args: argparse.Namespace, settings: Settings) -> EmbedReport:
    k_star = _pick(args.kstar, settings.k_star)
    stc_h = _pick(args.stc_height, settings.stc_height)
    seed = _pick(args.seed, settings.seed)
    profile = args.profile or settings.profile
    threads = _threads(args, settings)

    cover = _load(args.cover, k_star)
    data = _read_message(args)
    bits = bytes_to_bits(data)
    n = cover.n_vertices
    if args.alpha is not None:
        alpha = args.alpha
    elif bits.size:
        alpha = bits.size / max(n, 1)
    else:
        alpha = EMPTY_MESSAGE_ALPHA
    steps = _steps(args, alpha)
    change_set = pad_changeset(steps)

    _say(args, f"[EMBED] {args.cover}: {n} vertices, {cover.n_faces} faces")
    _say(args, f"[EMBED] Payload {bits.size} bits (α={alpha:.4g} bpv), changes {steps.tolist()}, Q={change_set.q}, "
               f"profile {profile}")

    table = compute_cost_table(cover, steps, k_star, profile, settings, threads)
    result = embed(cover, bits, table, alpha, k_star, stc_h=stc_h, stc_seed=seed, safety=settings.safety,
                   alpha_split=_alpha_split(args.alpha_split), threads=threads)

    fmt = format_from_path(args.cover, args.format)
    stego_path = Path(args.out) if args.out else _sibling(args.cover, f".stego.{fmt}")
    params_path = Path(args.params) if args.params else _sibling(args.cover, ".params")
    save_mesh(stego_path, result.stego, k_star, fmt, result.stego_integers)
    params_path.write_text(result.params.to_text(), encoding="utf-8")

    capacity = sum(sum(c.capacity_bits) for c in result.channels)
    for c in result.channels:
        _say(args, f"[EMBED] Channel {c.channel}: λ={c.lam:.6g}, H={c.entropy_nats:.2f} nats, "
                   f"layers {c.msg_lens} of {c.capacity_bits} bits, E[D]={c.expected_distortion:.6g}")
    _say(args, f"[EMBED] Used {bits.size}/{capacity} bits, expected distortion {result.expected_distortion:.6g}")
    _say(args, f"[EMBED] Wrote {stego_path} and {params_path} in {result.elapsed:.2f}s")

    return EmbedReport(
        cover=str(args.cover), stego=str(stego_path), params=str(params_path), profile=table.profile,
        n_vertices=n, message_bits=int(bits.size), alpha=float(alpha),
        changes=[int(s) for s in steps], q=change_set.q, k_star=k_star, h_star=result.params.h_star,
        capacity_bits=capacity, expected_distortion=result.expected_distortion,
        elapsed_seconds=result.elapsed,
        channels=[ChannelSummary(**c.to_dict()) for c in result.channels],
    )


def cmd_extract(args: argparse.Namespace, settings: Settings) -> ExtractReport:
    if args.json and not args.out:
        raise ConfigError("--json needs --out so the message does not mix with the report")
    start = time.time()
    params = StegoParams.from_text(Path(args.params).read_text(encoding="utf-8"))
    stego = read_mesh(args.stego)
    bits = extract(stego, params)
    if bits.size % 8:
        logger.warning(f"Extracted {bits.size} bits, not a whole number of bytes; padding with zeros")
    data = bits_to_bytes(bits)
    if args.out:
        Path(args.out).write_bytes(data)
        _say(args, f"[EXTRACT] Recovered {bits.size} bits ({len(data)} bytes) into {args.out}")
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    return ExtractReport(stego=str(args.stego), params=str(args.params), out=args.out,
                         message_bits=int(bits.size), message_bytes=len(data),
                         elapsed_seconds=time.time() - start)


def cmd_costmap(args: argparse.Namespace, settings: Settings) -> CostmapReport:
    if args.json and not args.out:
        raise ConfigError("--json needs --out so the cost map does not mix with the report")
    k_star = _pick(args.kstar, settings.k_star)
    profile = args.profile or settings.profile
    start = time.time()
    mesh = _load(args.cover, k_star)
    steps = _steps(args, args.alpha, default="table")
    table = compute_cost_table(mesh, steps, k_star, profile, settings, _threads(args, settings))
    text = costmap_text(table)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    rows = mesh.n_vertices * 3 * steps.size
    if args.out:
        _say(args, f"[COSTMAP] {rows} rows ({table.profile}) written to {args.out}")
    return CostmapReport(mesh=str(args.cover), out=args.out or "-", profile=table.profile,
                         changes=[int(s) for s in steps], rows=rows, elapsed_seconds=time.time() - start)


def cmd_capacity(args: argparse.Namespace, settings: Settings) -> CapacityReport:
    k_star = _pick(args.kstar, settings.k_star)
    mesh = _load(args.cover, k_star)
    n = mesh.n_vertices
    steps = _steps(args, args.alpha)
    change_set = pad_changeset(steps)
    size = steps.size
    best = max_alpha(n, size, change_set.q, settings.safety)
    report = CapacityReport(mesh=str(args.cover), n_vertices=n, changes=[int(s) for s in steps],
                            q=change_set.q, max_entropy_bpv=3.0 * math.log2(size), max_alpha=best)
    _say(args, f"[CAPACITY] {args.cover}: {n} vertices, |I|={size}, Q={change_set.q}")
    _say(args, f"[CAPACITY] Entropy ceiling {report.max_entropy_bpv:.4f} bpv, embeddable up to {best:.4f} bpv "
               f"at safety {settings.safety}")
    if args.alpha is None:
        return report

    profile = args.profile or settings.profile
    report.alpha = args.alpha
    report.profile = profile
    plan = split_payload(args.alpha, _alpha_split(args.alpha_split))
    table = compute_cost_table(mesh, steps, k_star, profile, settings, _threads(args, settings))
    ceiling = max_entropy(n, size)
    total = 0
    for j, name in enumerate(CHANNELS):
        alpha_j = plan.per_channel[j]
        target = entropy_target(alpha_j, n, change_set.q, settings.safety)
        row = CapacityChannel(channel=name, alpha=alpha_j, target_nats=target, feasible=target < ceiling)
        if row.feasible:
            cp = plan_channel(integer_map(mesh, j, k_star), table.channel(j), change_set, alpha_j, settings.safety)
            row.lam = cp.distribution.lam
            row.entropy_nats = cp.distribution.entropy
            row.capacity_bits = cp.capacities
            total += sum(cp.capacities)
            _say(args, f"[CAPACITY] Channel {name}: α={alpha_j:.4g}, λ={row.lam:.6g}, layers {cp.capacities} bits")
        else:
            _say(args, f"[CAPACITY] Channel {name}: α={alpha_j:.4g} infeasible (target {target:.2f} nats "
                       f"≥ ceiling {ceiling:.2f})")
        report.channels.append(row)
    report.capacity_bits = total
    _say(args, f"[CAPACITY] Total {total} bits at α={args.alpha:g} ({profile})")
    return report


def displacement_stats(cover: Mesh, stego: Mesh):
    """Per-vertex offsets, displacement norms and RMSE over the three channels."""
    if cover.n_vertices != stego.n_vertices:
        raise ParamsMismatchError(f"Cover has {cover.n_vertices} vertices, stego has {stego.n_vertices}")
    diff = stego.vertices - cover.vertices
    displacement = np.linalg.norm(diff, axis=1)
    rmse = np.sqrt(np.mean(diff ** 2, axis=1))
    return diff, displacement, rmse


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    if a.size == 0 or b.size == 0:
        return 0.0
    return float(max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0]))


def cmd_stats(args: argparse.Namespace, settings: Settings) -> StatsReport:
    cover = read_mesh(args.cover)
    stego = read_mesh(args.stego)
    diff, displacement, rmse = displacement_stats(cover, stego)
    n = cover.n_vertices
    report = StatsReport(
        cover=str(args.cover), stego=str(args.stego), n_vertices=n,
        changed_vertices=int(np.count_nonzero(displacement)),
        max_displacement=float(displacement.max(initial=0.0)),
        mean_displacement=float(displacement.mean()) if n else 0.0,
        max_rmse=float(rmse.max(initial=0.0)), mean_rmse=float(rmse.mean()) if n else 0.0,
        hausdorff=hausdorff(cover.vertices, stego.vertices), csv=args.csv,
    )
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["vertex", "dx", "dy", "dz", "displacement", "rmse"])
            for i in range(n):
                writer.writerow([i, *(repr(float(x)) for x in diff[i]), repr(float(displacement[i])),
                                 repr(float(rmse[i]))])
    _say(args, f"[STATS] {report.changed_vertices}/{n} vertices moved")
    _say(args, f"[STATS] Displacement max {report.max_displacement:.3e}, mean {report.mean_displacement:.3e}")
    _say(args, f"[STATS] RMSE max {report.max_rmse:.3e}, mean {report.mean_rmse:.3e}")
    _say(args, f"[STATS] Hausdorff {report.hausdorff:.3e}")
    return report


def bench_sample(n_vertices: int, sample: int, seed: int) -> np.ndarray:
    """Sorted seeded vertex subset; 0 or a size >= N selects every vertex."""
    if sample <= 0 or sample >= n_vertices:
        return np.arange(n_vertices)
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n_vertices, size=sample, replace=False))


def cmd_bench(args: argparse.Namespace, settings: Settings) -> BenchReport:
    k_star = _pick(args.kstar, settings.k_star)
    seed = _pick(args.seed, settings.seed)
    threads = _threads(args, settings)
    mesh = _load(args.cover, k_star)
    n = mesh.n_vertices
    steps = _steps(args, args.alpha, default="table")
    sample = bench_sample(n, args.ofpd_sample, seed)
    cache = FeatureCache.build(mesh, PATTERNS, settings.smooth_iterations, settings.smooth_factor)

    rows = []
    for p in PATTERNS:
        start = time.time()
        ifpd = ifpd_raw_tables(mesh, steps, k_star, (p,), cache, threads)[p]
        ifpd_seconds = time.time() - start

        start = time.time()
        ofpd = ofpd_rows(mesh, steps, k_star, p, sample, cache)
        ofpd_seconds = time.time() - start
        extrapolated = ofpd_seconds * n / max(sample.size, 1)

        diff = float(np.max(np.abs(ofpd - ifpd[sample]))) if sample.size else 0.0
        rows.append(BenchRow(sub_feature=SUB_FEATURE_NAMES[p], ofpd_vertices=int(sample.size),
                             ofpd_seconds=ofpd_seconds, ofpd_extrapolated_seconds=extrapolated,
                             ifpd_seconds=ifpd_seconds, speedup=extrapolated / max(ifpd_seconds, 1e-9),
                             max_abs_diff=diff))
        if diff > 1e-9:
            logger.warning(f"OFPD and IFPD disagree on {SUB_FEATURE_NAMES[p]} by {diff:.3e}")

    _say(args, "=" * 72)
    _say(args, f"Cost benchmark: {args.cover} ({n} vertices, |I|={steps.size}, OFPD on {sample.size} vertices)")
    _say(args, "=" * 72)
    _say(args, f"{'feature':<8} {'OFPD (s)':>12} {'OFPD full (s)':>14} {'IFPD (s)':>10} {'speedup':>9} {'max |diff|':>11}")
    for r in rows:
        _say(args, f"{r.sub_feature:<8} {r.ofpd_seconds:>12.3f} {r.ofpd_extrapolated_seconds:>14.3f} "
                   f"{r.ifpd_seconds:>10.3f} {r.speedup:>8.1f}x {r.max_abs_diff:>11.2e}")
    _say(args, "=" * 72)
    return BenchReport(mesh=str(args.cover), n_vertices=n, changes=[int(s) for s in steps], k_star=k_star, rows=rows)


COMMANDS = {
    "embed": cmd_embed,
    "extract": cmd_extract,
    "costmap": cmd_costmap,
    "capacity": cmd_capacity,
    "stats": cmd_stats,
    "bench": cmd_bench,
}
