"""Command-line entry points: ``robust-eig run`` and ``robust-eig selftest``.

The run command reads an optional flat JSON config file; flags win over the
file, which wins over the built-in defaults. Outputs are ``results.csv``
and ``summary.json`` in the chosen output directory.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .experiment import (
    ExperimentConfig,
    Method,
    OmegaRule,
    run_experiment,
    write_csv,
    write_summary_json,
)
from .filtering import ProxyMode, RemovalMode

_CONFIG_KEYS = {
    "d": int,
    "r": int,
    "r_star_ratio": float,
    "delta": float,
    "m": int,
    "n_per_r": int,
    "alpha_grid": lambda raw: tuple(float(a) for a in raw),
    "trials": int,
    "failure_prob": float,
    "omega_rule": OmegaRule,
    "omega_value": lambda v: None if v is None else float(v),
    "removal_mode": RemovalMode,
    "proxy_mode": ProxyMode,
    "master_seed": int,
    "record_wall_time": bool,
    "workers": int,
}


def load_config_file(path: Path) -> dict:
    """Flat key-value JSON; unknown keys are an error, not a silent skip."""
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise SystemExit(f"cannot read config file {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise SystemExit(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise SystemExit(f"config file {path} must hold a JSON object")
    parsed = {}
    for key, value in raw.items():
        if key not in _CONFIG_KEYS:
            raise SystemExit(f"unknown config key {key!r} in {path}")
        parsed[key] = _CONFIG_KEYS[key](value)
    return parsed


def _parse_alpha_grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad alpha grid {text!r}, want e.g. 0,0.05,0.1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robust-eig",
        description="Robust distributed eigenspace estimation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a corruption sweep and write CSV/JSON results")
    run.add_argument("--config", type=Path, help="flat JSON config file")
    run.add_argument("--out-dir", type=Path, required=True)
    run.add_argument("--d", type=int)
    run.add_argument("--r", type=int)
    run.add_argument("--r-star-ratio", dest="r_star_ratio", type=float)
    run.add_argument("--delta", type=float)
    run.add_argument("--m", type=int)
    run.add_argument("--n-per-r", dest="n_per_r", type=int)
    run.add_argument("--alpha-grid", dest="alpha_grid", type=_parse_alpha_grid)
    run.add_argument("--trials", type=int)
    run.add_argument("--p", dest="failure_prob", type=float)
    run.add_argument(
        "--omega",
        dest="omega_value",
        type=float,
        help="fixed lower grid bound; default rule is sqrt(1/(m n))",
    )
    run.add_argument(
        "--removal-mode",
        dest="removal_mode",
        type=RemovalMode,
        choices=list(RemovalMode),
    )
    run.add_argument(
        "--proxy-mode", dest="proxy_mode", type=ProxyMode, choices=list(ProxyMode)
    )
    run.add_argument("--seed", dest="master_seed", type=int)
    run.add_argument(
        "--timings",
        dest="record_wall_time",
        action="store_true",
        default=None,
        help="record wall-clock per estimate (makes the CSV non-reproducible)",
    )
    run.add_argument("--workers", type=int)

    sub.add_parser("selftest", help="fast subset of the property suite")
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    settings = load_config_file(args.config) if args.config else {}
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if "omega_value" in settings and settings["omega_value"] is not None:
        settings.setdefault("omega_rule", OmegaRule.FIXED)
    try:
        return ExperimentConfig(**settings)
    except (TypeError, ValueError) as exc:
        raise SystemExit(f"bad experiment configuration: {exc}")


def cmd_run(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    out_dir: Path = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    records = run_experiment(config)
    write_csv(records, out_dir / "results.csv")
    write_summary_json(records, out_dir / "summary.json", config)
    failures = [rec for rec in records if math.isnan(rec.dist)]
    n_cells = len({(rec.alpha, rec.trial_index) for rec in records})
    print(f"wrote {len(records)} records ({n_cells} trial cells) to {out_dir}")
    if failures:
        print(f"{len(failures)} estimate(s) aborted; see NaN rows", file=sys.stderr)
        return 1
    return 0


def _selftest_checks():
    from .linalg import OrthonormalFrame, procrustes_rotation, subspace_dist
    from .pipeline import robust_estimate, PipelineConfig
    from .reference import robust_reference
    from .filtering import (
        FilterConfig,
        MatrixSampleSet,
        RemovalMode,
        Termination,
        filter_samples,
    )
    from .synthetic import haar_frame

    rng = np.random.default_rng(20240617)

    def frames(k, d=12, r=3):
        return [haar_frame(rng, d, r) for _ in range(k)]

    def check_dist_examples():
        e1 = OrthonormalFrame(np.array([[1.0], [0.0]]))
        e2 = OrthonormalFrame(np.array([[0.0], [1.0]]))
        diag = OrthonormalFrame(np.array([[1.0], [1.0]]) / math.sqrt(2))
        return (
            subspace_dist(e1, e1) == 0.0
            and abs(subspace_dist(e1, e2) - 1.0) < 1e-12
            and abs(subspace_dist(e1, diag) - math.sin(math.pi / 4)) < 1e-12
        )

    def check_procrustes_grid():
        angles = np.arange(0.0, 2 * math.pi, 1e-4)
        cos, sin = np.cos(angles), np.sin(angles)
        for _ in range(10):
            y, y_ref = frames(2, d=8, r=2)
            mat = y.data.T @ y_ref.data
            rot = cos * (mat[0, 0] + mat[1, 1]) + sin * (mat[1, 0] - mat[0, 1])
            ref = cos * (mat[0, 0] - mat[1, 1]) + sin * (mat[1, 0] + mat[0, 1])
            base = 2 * y.r - 2 * max(rot.max(), ref.max())
            z = procrustes_rotation(y, y_ref)
            closed = float(np.linalg.norm(y.data @ z - y_ref.data, "fro")) ** 2
            if closed > base + 1e-6:
                return False
        return True

    def check_majority_selection():
        for _ in range(10):
            truth = haar_frame(rng, 12, 3)
            cluster = [
                OrthonormalFrame(
                    np.linalg.qr(truth.data + 0.02 * rng.standard_normal((12, 3)))[0]
                )
                for _ in range(6)
            ]
            noise = frames(4)
            result = robust_reference(cluster + noise)
            eps = max(subspace_dist(c, truth) for c in cluster)
            if subspace_dist(result.frame, truth) > 3 * eps:
                return False
        return True

    def check_filter_modes():
        base = rng.standard_normal((6, 2))
        samples = np.stack([base + 0.001 * rng.standard_normal((6, 2)) for _ in range(10)])
        samples = np.concatenate([samples, samples[:2] + 25.0], axis=0)
        sample_set = MatrixSampleSet(samples)
        for mode in RemovalMode:
            out = filter_samples(
                sample_set, FilterConfig(lambda_ub=1e-4, removal_mode=mode, rng_seed=5)
            )
            if out.terminated_by is not Termination.THRESHOLD_MET:
                return False
            if not set(out.removed) >= {10, 11}:
                return False
        return True

    def check_pipeline_determinism():
        truth = haar_frame(rng, 10, 2)
        responses = [
            OrthonormalFrame(
                np.linalg.qr(truth.data + 0.05 * rng.standard_normal((10, 2)))[0]
            )
            for _ in range(12)
        ]
        cfg = PipelineConfig(alpha=0.1, omega=0.01, rng_seed=33)
        a = robust_estimate(responses, cfg)
        b = robust_estimate(responses, cfg)
        return np.array_equal(a.raw_mean, b.raw_mean) and subspace_dist(
            a.orthonormalized, truth
        ) < 0.5

    return [
        ("subspace distance basics", check_dist_examples),
        ("procrustes closed form vs grid", check_procrustes_grid),
        ("majority reference selection", check_majority_selection),
        ("filter purges gross outliers", check_filter_modes),
        ("pipeline determinism", check_pipeline_determinism),
    ]


def cmd_selftest() -> int:
    failed = 0
    for name, check in _selftest_checks():
        try:
            ok = check()
        except Exception as exc:  # a crash is a failure, keep going
            ok = False
            print(f"FAIL {name}: {exc!r}")
        if ok:
            print(f"PASS {name}")
        else:
            failed += 1
            print(f"FAIL {name}")
    return 1 if failed else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    return cmd_selftest()


if __name__ == "__main__":
    sys.exit(main())
