"""Command-line experiment harness.

    yauyau run --preset cubic1d [--seed N] [--out DIR]
    yauyau run --config experiment.json [--out DIR]
    yauyau run --preset cubic1d --preset cubic3d --jobs 2 --out DIR
    yauyau presets
    yauyau oracle --kind pf|kalman --config experiment.json [--out DIR]
    yauyau serve [--port 8000] [--workers 2] [--persist-dir DIR] [--static-dir DIR]
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import ExperimentConfig, get_preset, preset_names
from .errors import ConfigError, YauYauError
from .harness import rmse, run_experiment
from .oracles import kalman_oracle_for_model, particle_oracle
from .sde import simulate_paths


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print("configuration error:", file=sys.stderr)
        for field, message in exc.issues:
            print(f"  {field}: {message}", file=sys.stderr)
        return 2
    except YauYauError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="yauyau", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one or more experiments")
    run.add_argument("--config", action="append", default=[], help="JSON config file")
    run.add_argument("--preset", action="append", default=[], choices=preset_names())
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--out", default=None, help="output directory (per-run subdirs for multiple runs)")
    run.add_argument("--jobs", type=int, default=1, help="run this many experiments concurrently")
    run.set_defaults(handler=cmd_run)

    presets = sub.add_parser("presets", help="list built-in experiment presets")
    presets.set_defaults(handler=cmd_presets)

    oracle = sub.add_parser("oracle", help="run a reference filter on a config's data")
    oracle.add_argument("--kind", choices=("pf", "kalman"), required=True)
    oracle.add_argument("--config", required=True)
    oracle.add_argument("--seed", type=int, default=None)
    oracle.add_argument("--particles", type=int, default=5000)
    oracle.add_argument("--out", default=None)
    oracle.set_defaults(handler=cmd_oracle)

    serve = sub.add_parser("serve", help="start the HTTP job service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--workers", type=int, default=2, help="concurrent filter jobs")
    serve.add_argument("--queue-depth", type=int, default=8)
    serve.add_argument("--persist-dir", default=None)
    serve.add_argument("--static-dir", default=None, help="built web UI assets to serve at /")
    serve.set_defaults(handler=cmd_serve)
    return parser


def _load_configs(args) -> list:
    configs = []
    for name in args.preset:
        configs.append(get_preset(name, seed=args.seed))
    for path in args.config:
        cfg = ExperimentConfig.from_file(path)
        if args.seed is not None:
            cfg.seed = args.seed
            cfg.validate()
        configs.append(cfg)
    if not configs:
        raise ConfigError([("run", "give at least one --preset or --config")])
    return configs


def cmd_run(args) -> int:
    configs = _load_configs(args)
    multi = len(configs) > 1

    def out_dir_for(cfg, i):
        base = args.out or cfg.out_dir
        if base is None:
            return None
        return os.path.join(base, cfg.preset or f"run{i}") if multi else base

    def one(item):
        i, cfg = item
        result = run_experiment(cfg, out_dir=out_dir_for(cfg, i))
        return cfg, result

    if args.jobs > 1 and multi:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(one, enumerate(configs)))
    else:
        results = [one(item) for item in enumerate(configs)]

    for cfg, result in results:
        label = cfg.preset or "config"
        print(
            f"{label}: rmse={result.rmse:.6g} zero_estimator_rmse={result.zero_rmse:.6g} "
            f"ns={result.grid.ns} ntau={result.tg.ntau} wall={result.wall_time:.2f}s"
        )
    return 0


def cmd_presets(args) -> int:
    for name in preset_names():
        cfg = get_preset(name)
        bounds = "data-driven" if cfg.bounds == "data-driven" else f"[{cfg.lo}, {cfg.hi}]"
        print(
            f"{name}: D={cfg.dim} f={cfg.drift_texts} h={cfg.obs_texts} "
            f"T={cfg.total_time} dt={cfg.dt} dtau={cfg.dtau} ds={cfg.ds} "
            f"bounds={bounds} seed={cfg.seed}"
        )
    return 0


def cmd_oracle(args) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    cfg.validate()
    model = cfg.model()
    tg = cfg.time_grid()
    paths = simulate_paths(model, tg, cfg.x0_vector(), cfg.seed)
    truth = paths.states[:: tg.nt]

    if args.kind == "kalman":
        p0 = cfg.init_sigma ** 2 * np.eye(cfg.dim)
        estimates = kalman_oracle_for_model(
            model, paths.observations, tg, x0_mean=cfg.x0_vector(), p0=p0
        )
    else:
        estimates = particle_oracle(
            model,
            paths.observations,
            tg,
            n_particles=args.particles,
            seed=cfg.seed,
            init_mean=cfg.x0_vector(),
            init_sigma=cfg.init_sigma,
        )

    score = rmse(estimates, truth)
    print(f"{args.kind} oracle: rmse={score:.6g} over {tg.ntau} coarse steps")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        out_path = os.path.join(args.out, f"oracle_{args.kind}_estimates.csv")
        header = ["tau"] + [f"xhat{d + 1}" for d in range(cfg.dim)]
        taus = tg.coarse_times()
        with open(out_path, "w") as fh:
            fh.write(",".join(header) + "\n")
            for k in range(estimates.shape[0]):
                row = [taus[k]] + list(estimates[k])
                fh.write(",".join(format(float(v), ".17g") for v in row) + "\n")
        with open(os.path.join(args.out, f"oracle_{args.kind}_summary.json"), "w") as fh:
            json.dump({"kind": args.kind, "rmse": score, "config": cfg.to_dict()}, fh, indent=2)
            fh.write("\n")
        print(f"wrote {out_path}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        max_workers=args.workers,
        queue_depth=args.queue_depth,
        persist_dir=args.persist_dir,
        static_dir=args.static_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
