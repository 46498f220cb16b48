"""Command-line interface.

Subcommands: index build|export, query, eval, segment, gen-corpus, serve.
Machine-readable output goes to stdout, diagnostics to stderr. Exit codes:
0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import evaluation, indexing
from .errors import RcbirError
from .imaging import load_image, save_pgm
from .retrieval import MODES, query
from .segmentation import segment


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rcbir", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="build or export an image index")
    index_sub = p_index.add_subparsers(dest="index_command", required=True)

    p_build = index_sub.add_parser("build", help="segment a corpus and build the bucket index")
    p_build.add_argument("--input", required=True, help="corpus directory (manifest.json or raster files)")
    p_build.add_argument("--out", required=True, help="index file to write")
    p_build.add_argument("--ng", type=int, default=16, help="gray-tone quantization levels (default 16)")
    p_build.add_argument("--d", type=int, default=1, help="co-occurrence distance (default 1)")

    p_export = index_sub.add_parser("export", help="dump an index as JSON")
    p_export.add_argument("--index", required=True)
    p_export.add_argument("--json", action="store_true", help="JSON output (the only format)")

    p_query = sub.add_parser("query", help="query by example image")
    p_query.add_argument("--index", required=True)
    p_query.add_argument("--image", required=True)
    p_query.add_argument("--mode", choices=MODES, default="rbir")
    p_query.add_argument("-k", "--k", type=int, default=10)

    p_eval = sub.add_parser("eval", help="run the query-everything protocol")
    p_eval.add_argument("--index", required=True)
    p_eval.add_argument("--mode", choices=MODES, default="rbir")
    p_eval.add_argument("--csv", action="store_true", help="CSV tables (default)")
    p_eval.add_argument("--json", action="store_true", help="JSON report instead of CSV")
    p_eval.add_argument("--plot", metavar="FILE", help="also write a precision-vs-k SVG chart")
    p_eval.add_argument("--include-self", action="store_true", help="keep each query in its own candidates")

    p_segment = sub.add_parser("segment", help="segment one image and dump diagnostics")
    p_segment.add_argument("--image", required=True)
    p_segment.add_argument("--dump-mask", metavar="FILE", help="write the region mask as binary PGM")
    p_segment.add_argument("--json", action="store_true", help="print threshold report and bbox as JSON")

    p_gen = sub.add_parser("gen-corpus", help="generate the synthetic 4-class corpus")
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--per-class", type=int, default=25)
    p_gen.add_argument("--size", type=int, default=256)

    p_serve = sub.add_parser("serve", help="serve the query HTTP API")
    p_serve.add_argument("--index", required=True)
    p_serve.add_argument("--corpus-root", default=".", help="directory the indexed paths resolve against")
    p_serve.add_argument("--bind", default="127.0.0.1:8731", help="host:port (default 127.0.0.1:8731)")
    p_serve.add_argument("--cors-origin", default=None, help="origin allowed to call the API")

    return parser


def _cmd_index(args) -> int:
    if args.index_command == "build":
        corpus = evaluation.load_corpus(args.input)
        idx = indexing.build_index(corpus, ng=args.ng, d=args.d)
        indexing.save_index(idx, args.out)
        for s in idx.skipped:
            print(f"skipped {s.image_id}: {s.reason}", file=sys.stderr)
        print(json.dumps({"entries": len(idx), "skipped": len(idx.skipped), "out": args.out}))
        return 0
    idx = indexing.load_index(args.index)
    print(indexing.export_index_json(idx))
    return 0


def _cmd_query(args) -> int:
    idx = indexing.load_index(args.index)
    img = load_image(args.image)
    res = query(idx, img, mode=args.mode, k=args.k)
    print(
        json.dumps(
            {
                "mode": res.mode,
                "query_key": res.query_key,
                "candidates_examined": res.candidates_examined,
                "results": [
                    {
                        "image_id": r.image_id,
                        "class_label": r.class_label,
                        "distance": r.distance,
                        "bbox": list(r.roi_bbox),
                        "cell": r.location_cell,
                    }
                    for r in res.results
                ],
            }
        )
    )
    return 0


def _cmd_eval(args) -> int:
    idx = indexing.load_index(args.index)
    report = evaluation.run_protocol(idx, args.mode, include_self=args.include_self)
    if args.json:
        print(json.dumps(evaluation.report_to_json(report), indent=2))
    else:
        sys.stdout.write(evaluation.report_to_csv(report))
    if args.plot:
        evaluation.plot_precision_svg(report, args.plot)
        print(f"wrote {args.plot}", file=sys.stderr)
    return 0


def _cmd_segment(args) -> int:
    img = load_image(args.image)
    roi, report = segment(img)
    if args.dump_mask:
        save_pgm(roi.mask * 255, args.dump_mask)
        print(f"wrote {args.dump_mask}", file=sys.stderr)
    if args.json:
        print(
            json.dumps(
                {
                    "t_iterative": report.t_iterative,
                    "t_otsu": report.t_otsu,
                    "t_star": report.t_star,
                    "iterations": report.iterations,
                    "bbox": list(roi.bbox),
                    "area": roi.area,
                }
            )
        )
    return 0


def _cmd_gen_corpus(args) -> int:
    manifest = evaluation.generate_synthetic_corpus(
        args.out, seed=args.seed, per_class=args.per_class, size=args.size
    )
    print(json.dumps({"images": len(manifest["images"]), "out": args.out}))
    return 0


def _cmd_serve(args) -> int:
    # imported lazily so the CLI works without the service extras loaded
    from .service import run_service

    try:
        host, port = args.bind.rsplit(":", 1)
        port = int(port)
    except ValueError:
        print(f"error: --bind expects host:port, got {args.bind!r}", file=sys.stderr)
        return 2
    return run_service(args.index, args.corpus_root, host, port, cors_origin=args.cors_origin)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "index": _cmd_index,
        "query": _cmd_query,
        "eval": _cmd_eval,
        "segment": _cmd_segment,
        "gen-corpus": _cmd_gen_corpus,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except (RcbirError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
