#!/usr/bin/env python3
"""
Round-trip sweep for mesh-stego.
Embeds random messages into every mesh of a directory over a grid of payloads
and seeds, extracts them again and reports every mismatch.
"""

import argparse
import concurrent.futures
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

# Ensure src is in python path
src_path = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src")
sys.path.append(src_path)

from mesh_stego.core.config import get_settings
from mesh_stego.core.errors import MeshStegoError
from mesh_stego.core.log import configure_logging
from mesh_stego.distortion.profiles import compute_cost_table
from mesh_stego.embedding.changeset import preset_steps
from mesh_stego.embedding.pipeline import change_frequency_z, embed, extract
from mesh_stego.mesh.io import FORMATS, parse_mesh, read_mesh, write_mesh

DEFAULT_ALPHAS = "1.5,3,4.5,6"
# realized change counts must stay inside this many multinomial standard deviations
Z_LIMIT = 3.0


@dataclass
class SweepResult:
    mesh: str
    alpha: float
    seed: int
    success: bool
    duration_ms: float
    bits: int = 0
    rmse: float = 0.0
    max_z: float = 0.0
    error: Optional[str] = None


def run_case(path: Path, alpha: float, seed: int, profile: str, k_star: int) -> SweepResult:
    """Embed, serialize, parse and extract one random message."""
    start_time = time.time()
    settings = get_settings()
    try:
        mesh = read_mesh(path)
        steps = np.array(preset_steps(alpha))
        rng = np.random.default_rng(seed)
        bits = rng.integers(0, 2, int(alpha * mesh.n_vertices)).astype(np.uint8)
        table = compute_cost_table(mesh, steps, k_star, profile, settings, threads=1)
        result = embed(mesh, bits, table, alpha, k_star, stc_h=settings.stc_height, stc_seed=seed,
                       safety=settings.safety)
        text = write_mesh(result.stego, "off", k_star, result.stego_integers)
        stego = parse_mesh(text)
        recovered = np.array_equal(extract(stego, result.params), bits)
        max_z = float(np.max(change_frequency_z(result.deltas, steps, result.probabilities)))
        success = recovered and max_z <= Z_LIMIT
        diff = stego.vertices - mesh.vertices
        if not recovered:
            error = "Recovered bits differ"
        elif not success:
            error = f"Change frequencies off by |z|={max_z:.2f}"
        else:
            error = None
        return SweepResult(
            mesh=path.name, alpha=alpha, seed=seed, success=success,
            duration_ms=(time.time() - start_time) * 1000, bits=int(bits.size),
            rmse=float(np.sqrt(np.mean(diff ** 2))),
            max_z=max_z, error=error,
        )
    except MeshStegoError as e:
        return SweepResult(path.name, alpha, seed, False, (time.time() - start_time) * 1000,
                           error=f"{type(e).__name__}: {e.message}")
    except Exception as e:
        return SweepResult(path.name, alpha, seed, False, (time.time() - start_time) * 1000, error=str(e)[:100])


def run_sweep(meshes: List[Path], alphas: List[float], seeds: int, workers: int, profile: str, k_star: int) -> bool:
    print("=" * 60)
    print("mesh-stego Round-Trip Sweep")
    print("=" * 60)
    print(f"Meshes:       {len(meshes)}")
    print(f"Payloads:     {', '.join(f'{a:g}' for a in alphas)}")
    print(f"Profile:      {profile}")
    print(f"Seeds:        {seeds}")
    print(f"Workers:      {workers}")
    print("=" * 60)
    print()

    start_time = time.time()
    results: List[SweepResult] = []
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(run_case, m, a, s, profile, k_star)
                   for m in meshes for a in alphas for s in range(seeds)]
        for future in concurrent.futures.as_completed(futures):
            res = future.result()
            results.append(res)
            status = "ok" if res.success else f"FAILED ({res.error})"
            print(f"  [{res.mesh} α={res.alpha:g} seed={res.seed}] {res.bits} bits, RMSE {res.rmse:.3e}, "
                  f"max |z| {res.max_z:.2f}, {res.duration_ms:.0f} ms: {status}")

    total_time = time.time() - start_time
    failed = [r for r in results if not r.success]

    print()
    print("=" * 60)
    print("Results Summary")
    print("=" * 60)
    print(f"Runs:                       {len(results)}")
    print(f"Successful:                 {len(results) - len(failed)}")
    print(f"Failed:                     {len(failed)}")
    print(f"Wall time:                  {total_time:.2f}s")
    print("-" * 30)
    print("Per payload (mean time / mean RMSE / worst |z|):")
    for a in alphas:
        done = [r for r in results if r.alpha == a and r.success]
        if done:
            print(f"  α={a:g}: {np.mean([r.duration_ms for r in done]):.0f} ms / "
                  f"{np.mean([r.rmse for r in done]):.3e} / {max(r.max_z for r in done):.2f}")
    if failed:
        print("-" * 30)
        print("Failures:")
        for r in sorted(failed, key=lambda r: (r.mesh, r.alpha, r.seed)):
            print(f"  {r.mesh} α={r.alpha:g} seed={r.seed}: {r.error}")
    print("=" * 60)
    return not failed


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description='Round-trip sweep for mesh-stego')
    parser.add_argument('--meshes', type=str, default=os.path.join("scripts", "data"),
                        help='Directory of .off/.ply covers (see generate_fixtures.py)')
    parser.add_argument('--alphas', type=str, default=DEFAULT_ALPHAS, help=f'Payloads in bpv (default: {DEFAULT_ALPHAS})')
    parser.add_argument('--profile', type=str, default=None, help='Cost profile (default: MESH_STEGO_PROFILE)')
    parser.add_argument('--seeds', type=int, default=1, help='Seeds per mesh and payload (default: 1)')
    parser.add_argument('--workers', type=int, default=4, help='Concurrent runs (default: 4)')
    parser.add_argument('--kstar', type=int, default=None, help='Fractional digits kept (default: MESH_STEGO_KSTAR)')
    args = parser.parse_args()

    configure_logging("WARNING")
    settings = get_settings()
    covers = sorted(p for p in Path(args.meshes).iterdir() if p.suffix.lstrip(".") in FORMATS)
    if not covers:
        print(f"No meshes found in {args.meshes}")
        sys.exit(2)
    ok = run_sweep(covers, [float(a) for a in args.alphas.split(",")], args.seeds, args.workers,
                   args.profile or settings.profile, settings.k_star if args.kstar is None else args.kstar)
    sys.exit(0 if ok else 1)
