"""Command-line entry point.

Subcommands mirror the pipeline stages: ``harvest`` pulls the ranked
query results, ``screen-serve`` exposes the review queue over HTTP for
the browser client, ``snowball`` expands the screened seed set through
cited-by layers, ``analyze`` recomputes reports from a snapshot,
``report`` prints the headline numbers, and ``run`` does everything.
``init-demo`` writes the bundled deterministic demo workspace.

Exit codes: 0 success, 2 config error, 3 source failure after retries,
4 invariant violation, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .corpus import CorpusStore, SnapshotError, StoreInvariantError
from .demodata import build_workspace
from .harvest import SourceError, SourceFailure
from .httpapi import ScreeningServer
from .pipeline import Pipeline, PipelineError, analyze_store, sha256_file

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOURCE = 3
EXIT_INVARIANT = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="litmap",
        description="literature mapping: harvest, screen, snowball, analyze",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="pipeline config file")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--source", help="replay:PATH or live (overrides config)")
        p.add_argument("--resume", action="store_true",
                       help="continue from the last checkpoint")

    for name, desc in (
        ("run", "run every stage end to end"),
        ("harvest", "fetch ranked query results only"),
        ("snowball", "screen (from decisions file) and expand citations"),
        ("analyze", "recompute reports from the stored snapshot"),
        ("report", "print headline numbers from existing reports"),
    ):
        common(sub.add_parser(name, help=desc))

    serve = sub.add_parser("screen-serve", help="serve the screening HTTP API")
    common(serve)
    serve.add_argument("--serve-addr", default="127.0.0.1:8571",
                       metavar="HOST:PORT")

    demo = sub.add_parser("init-demo", help="write the bundled demo workspace")
    demo.add_argument("dir", help="destination directory")
    return parser


def _summary_lines(manifest: dict) -> list[str]:
    flow = manifest["flow"]
    inter = manifest["intersections"]
    lines = [
        "flow: scoping={scoping} pruned={pruned} eligible={eligible} "
        "notable={notable_added} seeds={seeds} corpus={citation_corpus}".format(**flow),
        "intersections: memberships={total_memberships} unique_docs={unique_docs} "
        "max_overlap={max_overlap} ({max_overlap_docs} docs)".format(**inter),
    ]
    snow = manifest.get("snowball") or {}
    if snow:
        layers = " ".join(
            f"layer{k}={v}" for k, v in sorted(snow["per_layer_new"].items())
        )
        lines.append(f"snowball: seeds={snow['seeds']} {layers} "
                     f"edges={snow['edges_added']}")
    return lines


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SourceFailure, SourceError) as exc:
        print(f"source failure: {exc}", file=sys.stderr)
        print("checkpoint retained; rerun with --resume", file=sys.stderr)
        return EXIT_SOURCE
    except (StoreInvariantError, SnapshotError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except KeyboardInterrupt:
        print("interrupted; checkpoint retained", file=sys.stderr)
        return 130


def _dispatch(args) -> int:
    if args.command == "init-demo":
        ws = build_workspace(args.dir)
        print(f"demo workspace written to {ws.root}")
        print(f"next: litmap run --config {ws.config_path}")
        return EXIT_OK

    config = load_config(args.config, out_override=args.out,
                         source_override=args.source)

    if args.command == "run":
        pipeline = Pipeline(config, resume=args.resume)
        manifest = pipeline.run()
        for line in _summary_lines(manifest):
            print(line)
        print(f"artifacts: {pipeline.paths.manifest}")
        return EXIT_OK

    if args.command == "harvest":
        pipeline = Pipeline(config, resume=args.resume)
        pipeline.stage_harvest()
        print(f"harvested {len(pipeline.store)} documents "
              f"({len(pipeline.store.memberships)} memberships)")
        return EXIT_OK

    if args.command == "snowball":
        pipeline = Pipeline(config, resume=True)
        if not pipeline.progress["stages_done"]:
            raise PipelineError("nothing harvested yet; run harvest first")
        pipeline.stage_screen()
        pipeline.stage_snowball()
        snow = pipeline.progress["snowball"]
        print(f"snowball: seeds={snow['seeds']} per-layer={snow['per_layer_new']} "
              f"edges={snow['edges_added']}")
        return EXIT_OK

    if args.command == "analyze":
        paths = Pipeline(config, resume=True).paths
        snapshot = paths.snapshot if paths.snapshot.exists() else paths.working_snapshot
        if not snapshot.exists():
            raise PipelineError(f"no snapshot at {paths.snapshot}; run the pipeline first")
        before = sha256_file(snapshot)
        store = CorpusStore.load_snapshot(snapshot)
        summary = analyze_store(store, config, paths.reports)
        after = sha256_file(snapshot)
        if before != after:
            raise StoreInvariantError("analyze must not modify the snapshot")
        print(json.dumps(summary, sort_keys=True, indent=2))
        return EXIT_OK

    if args.command == "report":
        paths = Pipeline(config, resume=True).paths
        flow_path = paths.reports / "flow.json"
        if not flow_path.exists():
            raise PipelineError("no reports yet; run the pipeline first")
        manifest = {
            "flow": json.loads(flow_path.read_text("utf-8")),
            "intersections": json.loads(
                (paths.reports / "summary.json").read_text("utf-8")
            )["intersections"],
        }
        for line in _summary_lines(manifest):
            print(line)
        centrality = paths.reports / "centrality.csv"
        if centrality.exists():
            import csv
            print("top bridging documents:")
            with open(centrality, encoding="utf-8") as fh:
                rows = list(csv.reader(fh))[1:6]
            for doc_id, title, *_ in rows:
                print(f"  {doc_id}  {title[:70]}")
        return EXIT_OK

    if args.command == "screen-serve":
        host, _, port = args.serve_addr.partition(":")
        pipeline = Pipeline(config, resume=True)
        server = ScreeningServer(
            pipeline.store, config.routing, host, int(port or 0)
        )
        bound_host, bound_port = server.address
        print(f"screening API on http://{bound_host}:{bound_port}/api/")
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            server.shutdown()
            pipeline.store.save_snapshot(
                pipeline.paths.working_snapshot, pipeline.created_at()
            )
            print(f"state saved to {pipeline.paths.working_snapshot}")
        return EXIT_OK

    raise PipelineError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
