"""Command line entry points: ingest, serve, export-svg, report."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .aggregation import FilterSpec, filter_cases
from .pipeline import Dataset, PipelineError, run_pipeline
from .projection import build_glyphs, tsne_embed
from .server import create_app
from .svgexport import projection_svg, propagation_svg


def _add_data_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--posts", required=True, help="posts dump (JSON lines)")
    parser.add_argument("--users", required=True, help="user dump (JSON lines)")
    parser.add_argument("--config", default=None,
                        help="config JSON path (default: $RUMORCAST_CONFIG or built-ins)")


def _load(args) -> Dataset:
    return run_pipeline(args.posts, args.users, args.config)


def cmd_ingest(args) -> int:
    dataset = _load(args)
    report = dataset.report
    if args.report_out:
        Path(args.report_out).write_text(
            json.dumps(report, indent=2, ensure_ascii=False), encoding="utf-8")
    counts = report["counts"]
    print(f"posts={counts['posts']} users={counts['users']} cases={counts['cases']} "
          f"dropped={counts['dropped_posts']} diagnostics={counts['diagnostics']} "
          f"({report['timings_s']['total']:.2f}s)")
    return 0


def cmd_report(args) -> int:
    dataset = _load(args)
    json.dump(dataset.report, sys.stdout, indent=2, ensure_ascii=False)
    print()
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    dataset = _load(args)
    app = create_app(dataset, audit_path=args.audit)
    port = args.port if args.port is not None else dataset.config.server.port
    print(f"serving {len(dataset.cascades)} cases on {args.host}:{port}")
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def cmd_export_svg(args) -> int:
    dataset = _load(args)
    if args.view == "propagation":
        if not args.case:
            print("--case is required for the propagation view", file=sys.stderr)
            return 2
        if args.case not in dataset.cascades_by_root:
            print(f"unknown case id: {args.case}", file=sys.stderr)
            return 1
        svg = propagation_svg(dataset.layout_for(args.case), dataset.config.colors)
    else:
        spec = FilterSpec.from_json(json.loads(args.filter)) if args.filter else FilterSpec()
        case_ids = filter_cases(dataset, spec)
        if not case_ids:
            print("filter matches no cases", file=sys.stderr)
            return 1
        subset = [dataset.features_by_case[cid] for cid in case_ids]
        import numpy as np

        embedding = tsne_embed(np.vstack([cf.vector for cf in subset]),
                               dataset.config.tsne)
        glyphs = build_glyphs(embedding, subset, dataset.config.geometry,
                              dataset.topic_labels)
        svg = projection_svg(glyphs, dataset.config.colors, dataset.config.geometry)
    Path(args.out).write_text(svg, encoding="utf-8")
    print(f"wrote {args.out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rumorcast",
        description="Rumor cascade analytics: ingest dumps, serve the read-only "
                    "API, export propagation/projection SVGs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="run the pipeline and write a build report")
    _add_data_args(p_ingest)
    p_ingest.add_argument("--report-out", default=None, help="report JSON output path")
    p_ingest.set_defaults(func=cmd_ingest)

    p_report = sub.add_parser("report", help="print the build report as JSON")
    _add_data_args(p_report)
    p_report.set_defaults(func=cmd_report)

    p_serve = sub.add_parser("serve", help="serve the HTTP API")
    _add_data_args(p_serve)
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--audit", default=None, help="verdict audit file path")
    p_serve.set_defaults(func=cmd_serve)

    p_svg = sub.add_parser("export-svg", help="render a view to an SVG file")
    _add_data_args(p_svg)
    p_svg.add_argument("--view", choices=("propagation", "projection"), required=True)
    p_svg.add_argument("--case", default=None, help="case id (propagation view)")
    p_svg.add_argument("--filter", default=None, help="filter JSON (projection view)")
    p_svg.add_argument("--out", required=True)
    p_svg.set_defaults(func=cmd_export_svg)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for diag in exc.diagnostics[:50]:
            print(f"  [{diag.kind}] {diag.message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
