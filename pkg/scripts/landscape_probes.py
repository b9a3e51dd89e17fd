#!/usr/bin/env python3
"""Diagnostics of the two-objective damage-identification landscape.

Three probes on the three-damage 15-element case explain why center-sampling
search has an easy time locating damage but a hard time pinning severities:

1. scale flatness: both objectives along the ray c * alpha_true are nearly
   constant in c (the correlation objectives measure direction, not length),
   so amplitude information is second order;
2. first-division ranking: with the default box [0, 0.3] the first sample is
   the uniform 15%-damage vector, whose mode shapes equal the healthy ones;
   the per-dimension samples of the first trisection rank *wrong* elements
   ahead of true ones;
3. archive amplitude: after a budgeted run, the surviving archive entries
   concentrate on whichever amplitude shell the partition refined deepest,
   not necessarily the true one.
"""

import argparse
import sys

import numpy as np

from modirect import engine
from modirect.cases import build_model, make_case, simulate_measurement, true_alpha
from modirect.moo import fast_nondominated_sort
from modirect.objectives import Evaluator
from modirect.posterior import sparse_select


def probe_scale_flatness(evaluator, truth):
    print("objectives along c * alpha_true (flat in c => severity is weakly "
          "identified):")
    for c in (0.25, 0.5, 1.0, 1.5, 2.0):
        f = evaluator(np.clip(c * truth, 0.0, 1.0))
        print(f"  c = {c:4.2f}: f = ({f[0]:+.6f}, {f[1]:+.6f})")


def probe_first_division(evaluator, config, truth):
    lo, hi = config.bounds
    center = np.full(config.n_elements, 0.5 * (lo + hi))
    omega = (hi - lo) / 3.0
    samples, labels = [], []
    for dim in range(config.n_elements):
        for sign in (-1.0, 1.0):
            p = center.copy()
            p[dim] += sign * omega
            samples.append(evaluator(p))
            labels.append((dim + 1, sign))
    samples.append(evaluator(center))
    ranks = fast_nondominated_sort(np.array(samples))
    best = np.argsort(ranks[:-1], kind="stable")[:6]
    damaged = {e for e, _ in config.damages}
    print(f"\nfirst trisection around the box center {center[0]:.3f} * ones:")
    for k in best:
        elem, sign = labels[k]
        marker = "TRUE DAMAGE" if elem in damaged else "healthy"
        print(f"  element {elem:2d} ({'+' if sign > 0 else '-'}): rank "
              f"{ranks[k]}, f = ({samples[k][0]:+.4f}, {samples[k][1]:+.4f})"
              f"  [{marker}]")


def probe_archive_amplitude(evaluator, config, truth, evals):
    n = config.n_elements
    bounds = (np.full(n, config.bounds[0]), np.full(n, config.bounds[1]))
    archive, state = engine.run(evaluator, bounds, config.strategy, evals)
    _, posterior = sparse_select(archive)
    scale = float(posterior @ truth / (truth @ truth))
    print(f"\nafter {state.evaluations_used} evaluations "
          f"({config.strategy}): archive size {len(archive)}")
    print(f"  posterior at damaged elements: "
          f"{[round(float(posterior[e - 1]), 4) for e, _ in config.damages]}")
    print(f"  truth at damaged elements:     "
          f"{[s for _, s in config.damages]}")
    print(f"  projection of posterior onto the truth ray: {scale:.2f}x")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--evals", type=int, default=30_000)
    args = parser.parse_args(argv)

    config = make_case("3", noise_sigma=0.0, q_frequencies=9)
    model = build_model(config)
    evaluator = Evaluator(model, simulate_measurement(config, model))
    truth = true_alpha(config)

    probe_scale_flatness(evaluator, truth)
    probe_first_division(evaluator, config, truth)
    probe_archive_amplitude(evaluator, config, truth, args.evals)
    return 0


if __name__ == "__main__":
    sys.exit(main())
