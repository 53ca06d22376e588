"""Command-line entry points: node, keygen, gateway, bench."""

from __future__ import annotations

import argparse
import json
import logging
import signal
import sys
import threading
import time
from pathlib import Path

from medchain.bench.calibrate import calibrate_difficulty
from medchain.bench.config import BenchConfig
from medchain.bench.runner import run_benchmark
from medchain.gateway.app import create_app
from medchain.gateway.records import RecordStore
from medchain.keys import KeyPair, load_key_directory
from medchain.node.config import NodeConfig
from medchain.node.node import Node


def _run_node(args: argparse.Namespace) -> int:
    config = NodeConfig.load(args.config) if args.config else NodeConfig(node_name="node")
    if args.listen:
        config.listen_endpoint = args.listen
    if args.peers:
        config.peers = args.peers.split(",")
    if args.mine:
        config.miner_enabled = True
    if args.data_dir:
        config.data_dir = args.data_dir
    if args.genesis:
        config.genesis_path = args.genesis
    node = Node(config)
    node.start()
    print(f"node {config.node_name} listening on {node.endpoint} (height {node.height()})")
    _wait_for_interrupt()
    node.stop()
    return 0


def _run_keygen(_args: argparse.Namespace) -> int:
    print(json.dumps(KeyPair.generate().to_json(), indent=2))
    return 0


def _run_gateway(args: argparse.Namespace) -> int:
    import uvicorn

    config = NodeConfig(
        node_name="gateway",
        listen_endpoint="127.0.0.1:0",
        peers=[args.node] if args.node else [],
        genesis_path=args.genesis,
        data_dir=args.data_dir,
    )
    node = Node(config)
    node.start()
    records = RecordStore(args.records)
    keys = load_key_directory(args.keys) if args.keys else {}
    app = create_app(node, records, key_directory=keys)
    host, port = args.listen.rsplit(":", 1)
    try:
        uvicorn.run(app, host=host, port=int(port), log_level="warning")
    finally:
        node.stop()
    return 0


def _run_bench(args: argparse.Namespace) -> int:
    if args.bench_command == "calibrate":
        low, _, high = args.target.partition("..")
        result = calibrate_difficulty((float(low), float(high)), probe_ms=args.probe_ms)
        print(json.dumps(result.to_json(), indent=2))
        if args.update_config:
            path = Path(args.update_config)
            cfg = BenchConfig.load(path) if path.exists() else BenchConfig()
            cfg.difficulty_bits = result.difficulty_bits
            path.write_text(json.dumps(cfg.to_json(), indent=2) + "\n")
            print(f"wrote difficulty {result.difficulty_bits} to {path}")
        return 0

    cfg = BenchConfig.load(args.config) if args.config else BenchConfig()
    if args.difficulty is not None:
        cfg.difficulty_bits = args.difficulty
    summary_path = args.summary or (str(Path(args.out).with_suffix(".summary.json")) if args.out else None)
    started = time.monotonic()
    records, summary = run_benchmark(cfg, out_csv=args.out, out_summary=summary_path, progress=True)
    summary["wall_s"] = round(time.monotonic() - started, 1)
    print(json.dumps(summary, indent=2))
    return 0 if summary["status"] == "ok" else 1


def _wait_for_interrupt() -> None:
    stop = threading.Event()
    signal.signal(signal.SIGINT, lambda *_: stop.set())
    signal.signal(signal.SIGTERM, lambda *_: stop.set())
    stop.wait()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="medchain", description="Consortium RBAC blockchain")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    node = sub.add_parser("node", help="run a consortium node")
    node.add_argument("--config", help="node config JSON")
    node.add_argument("--listen", help="host:port override")
    node.add_argument("--peers", help="comma-separated host:port list")
    node.add_argument("--mine", action="store_true", help="enable mining")
    node.add_argument("--data-dir")
    node.add_argument("--genesis", help="genesis file path")
    node.set_defaults(fn=_run_node)

    keygen = sub.add_parser("keygen", help="generate an account keypair")
    keygen.set_defaults(fn=_run_keygen)

    gateway = sub.add_parser("gateway", help="run the HTTP gateway")
    gateway.add_argument("--node", help="peer node endpoint host:port")
    gateway.add_argument("--genesis", required=True)
    gateway.add_argument("--records", required=True, help="patient records directory")
    gateway.add_argument("--keys", help="key directory JSON file")
    gateway.add_argument("--listen", default="127.0.0.1:8080")
    gateway.add_argument("--data-dir")
    gateway.set_defaults(fn=_run_gateway)

    bench = sub.add_parser("bench", help="latency experiment")
    bench_sub = bench.add_subparsers(dest="bench_command", required=True)
    run = bench_sub.add_parser("run", help="run the experiment")
    run.add_argument("--config", help="bench config JSON")
    run.add_argument("--out", help="CSV output path")
    run.add_argument("--summary", help="summary JSON path")
    run.add_argument("--difficulty", type=int, help="override difficulty bits")
    run.set_defaults(fn=_run_bench)
    cal = bench_sub.add_parser("calibrate", help="pick difficulty for a target block time")
    cal.add_argument("--target", default="1.1..2.8", help="seconds, e.g. 1.1..2.8")
    cal.add_argument("--probe-ms", type=int, default=1500)
    cal.add_argument("--update-config", help="bench config JSON to write difficulty into")
    cal.set_defaults(fn=_run_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
